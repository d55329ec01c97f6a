import random

import pytest

from propertopes._canon import enc
from propertopes.builtins import TerminalProp, endomorphism_bool
from propertopes.core import ColorError, CompositionError
from propertopes.freeprop import FreeProp, FreeSampler, free_prop
from propertopes.graphs import (
    Component,
    DecoratedGraph,
    MNGraph,
    canonicalize,
    decorate,
    evaluate,
    evaluate_component,
    level_decompose,
    make_graph,
    single_vertex_component,
    substitute,
    validate_decoration,
    validate_mn_graph,
)
from propertopes.lawcheck import check_prop_laws
from propertopes.perms import Perm
from propertopes.randgen import random_decorated_graph, random_layouts


def worked_graph() -> MNGraph:
    """The (5,3)-graph with seven vertices used as the evaluation oracle."""
    comp = Component(
        vertex_ports=((1, 1), (2, 1), (2, 2), (1, 2), (2, 2), (1, 2), (2, 3)),
        edges=(
            (2, 0, 3, 0),  # v3.out1 -> v4.in1
            (2, 1, 4, 0),  # v3.out2 -> v5.in1
            (5, 0, 4, 1),  # v6.out1 -> v5.in2
            (5, 1, 0, 0),  # v6.out2 -> v1.in1
            (3, 0, 6, 0),  # v4.out1 -> v7.in1
            (3, 1, 1, 0),  # v4.out2 -> v2.in1
            (4, 0, 6, 1),  # v5.out1 -> v7.in2
            (4, 1, 1, 1),  # v5.out2 -> v2.in2
        ),
        inputs=((5, 0), (2, 0), (2, 1)),  # legs 1,2,3
        outputs=((6, 2), (0, 0), (6, 0), (1, 0), (6, 1)),  # legs 1..5
    )
    return make_graph([comp])


def worked_free_prop() -> FreeProp:
    return free_prop(
        ["*"],
        {
            "a1": (("*",), ("*",)),
            "a2": (("*",), ("*", "*")),
            "a3": (("*", "*"), ("*", "*")),
            "a4": (("*", "*"), ("*",)),
            "a5": (("*", "*"), ("*", "*")),
            "a6": (("*", "*"), ("*",)),
            "a7": (("*", "*", "*"), ("*", "*")),
        },
    )


def worked_decorated(F: FreeProp, tokens: bool = True) -> DecoratedGraph:
    decs = [F.gen_token(f"a{i}") if tokens else F.generator(f"a{i}") for i in range(1, 8)]
    return decorate(worked_graph(), [decs])


def test_worked_graph_validates():
    report = validate_mn_graph(worked_graph())
    assert report.ok, report.failures()


def test_one_vertex_graph_validates():
    g = make_graph([single_vertex_component(1, 1)])
    assert validate_mn_graph(g).ok


def test_two_cycle_rejected_as_wheel():
    comp = Component(
        vertex_ports=((2, 2), (1, 1)),
        edges=((0, 0, 1, 0), (1, 0, 0, 0)),
        inputs=((0, 1),),
        outputs=((0, 1),),
    )
    report = validate_mn_graph(make_graph([comp]))
    assert not report.ok
    assert any("no-wheels" in c.law and not c.passed for c in report.checks)


def test_canonicalize_idempotent_and_order_insensitive():
    g = worked_graph()
    assert canonicalize(canonicalize(g)) == canonicalize(g)
    shuffled = MNGraph(
        (
            Component(
                g.components[0].vertex_ports,
                tuple(reversed(g.components[0].edges)),
                g.components[0].inputs,
                g.components[0].outputs,
            ),
        )
    )
    assert enc(canonicalize(shuffled)) == enc(canonicalize(g))


def test_canonicalize_idempotent_on_random_graphs():
    T = TerminalProp()
    rng = random.Random(0)
    for _ in range(30):
        dg = random_decorated_graph(T, rng)
        assert canonicalize(canonicalize(dg.graph)) == canonicalize(dg.graph)


def test_decoration_color_mismatch_detected():
    E = endomorphism_bool()
    T = TerminalProp()
    g = make_graph([single_vertex_component(2, 1)])
    tok = T.component(("*",), ("*", "*"))[0]
    dg = decorate(g, [[tok]])
    assert validate_decoration(T, dg).ok
    # swap one input leg color to a bogus color: per-port mismatch is reported
    bad = DecoratedGraph(dg.graph, dg.decorations, dg.edge_colors, (("*", "x"),), dg.out_colors)
    rep = validate_decoration(T, bad)
    assert not rep.ok
    assert any(c.law == "color-matching-in" and not c.passed for c in rep.checks)


# ---------------------------------------------------------------------------
# Level decomposition of the worked example
# ---------------------------------------------------------------------------

def test_worked_level_decomposition_matches_displayed_permutations():
    F = worked_free_prop()
    dg = worked_decorated(F)
    dec = level_decompose(dg, 0)
    layer_kinds = [tuple(e for e in layer) for layer in dec.layers]
    assert layer_kinds[0] == (("v", 2), ("v", 5))                      # a3 (x) a6
    assert layer_kinds[1] == (("v", 3), ("v", 4), ("v", 0))            # a4 (x) a5 (x) a1
    assert layer_kinds[2][:2] == (("v", 6), ("v", 1))                  # a7 (x) a2 (x) 1
    assert layer_kinds[2][2][0] == "id"
    assert dec.interfaces[0].is_identity()
    assert dec.interfaces[1] == Perm.from_one_based([1, 3, 2, 4, 5])   # tau, the middle crossing
    assert dec.top == Perm.from_one_based([3, 5, 1, 4, 2])             # sigma_1
    assert dec.bottom.inverse() == Perm.from_one_based([2, 3, 1])      # sigma_2^-1


def test_worked_evaluation_matches_displayed_composite():
    F = worked_free_prop()
    a = {i: F.generator(f"a{i}") for i in range(1, 8)}
    unit = F.unit_single("*")
    layer1 = F.hcomp(a[3], a[6])
    layer2 = F.hcomp(F.hcomp(a[4], a[5]), a[1])
    layer3 = F.hcomp(F.hcomp(a[7], a[2]), unit)
    tau = Perm.from_one_based([1, 3, 2, 4, 5])
    sigma1 = Perm.from_one_based([3, 5, 1, 4, 2])
    sigma2 = Perm.from_one_based([3, 1, 2])
    bracket = F.vcomp(F.vcomp(layer3, F.biact(tau, layer2, Perm.identity(4))), layer1)
    expected = F.biact(sigma1, bracket, sigma2)
    # evaluating element-decorated copies composes to the same canonical element
    assert evaluate(F, worked_decorated(F, tokens=False)) == expected
    # and in the free PROP, evaluation is normalization of the graph itself
    assert F.element_from_graph(worked_decorated(F, tokens=True)) == expected


def test_one_vertex_graph_evaluates_to_its_decoration():
    F = worked_free_prop()
    dg = decorate(make_graph([single_vertex_component(2, 1)]), [[F.generator("a2")]])
    assert evaluate(F, dg) == F.generator("a2")
    dec = level_decompose(dg, 0)
    assert len(dec.layers) == 1 and dec.top.is_identity() and dec.bottom.is_identity()


def test_twisted_unit_graph_evaluates_to_biact():
    F = worked_free_prop()
    sigma = Perm.from_one_based([2, 3, 1])
    tau = Perm.from_one_based([2, 1])
    # legs attached so that out leg l sits on port sigma^-1(l), in leg l on port tau(l)
    comp = Component(
        vertex_ports=((2, 3),),
        edges=(),
        inputs=tuple((0, tau(l)) for l in range(2)),
        outputs=tuple((0, sigma.inverse()(l)) for l in range(3)),
    )
    dg = decorate(make_graph([comp]), [[F.generator("a7")]])
    assert evaluate(F, dg) == F.biact(sigma, F.generator("a7"), tau)
    dgt = decorate(make_graph([comp]), [[F.gen_token("a7")]])
    assert F.element_from_graph(dgt) == F.biact(sigma, F.generator("a7"), tau)


def test_two_layer_chain_has_identity_interface():
    F = free_prop(["*"], {"f": (("*",), ("*",)), "g": (("*",), ("*",))})
    comp = Component(
        vertex_ports=((1, 1), (1, 1)),
        edges=((0, 0, 1, 0),),
        inputs=((0, 0),),
        outputs=((1, 0),),
    )
    dg = decorate(make_graph([comp]), [[F.generator("f"), F.generator("g")]])
    dec = level_decompose(dg, 0)
    assert len(dec.layers) == 2
    assert all(p.is_identity() for p in dec.interfaces)
    assert evaluate(F, dg) == F.vcomp(F.generator("g"), F.generator("f"))


def test_evaluation_level_independence_over_terminal_and_bool():
    rng = random.Random(7)
    for prop in (TerminalProp(), endomorphism_bool()):
        for _ in range(12):
            dg = random_decorated_graph(prop, rng)
            base = evaluate(prop, dg)
            for leveling, orders in random_layouts(dg, 0, rng, count=3):
                assert evaluate_component(prop, dg, 0, leveling, orders) == base


def test_evaluate_over_terminal_prop_is_point():
    T = TerminalProp()
    rng = random.Random(3)
    for _ in range(5):
        dg = random_decorated_graph(T, rng)
        v = evaluate(T, dg)
        assert v.payload == "pt"
        assert v.arity == (len(dg.out_profile), len(dg.in_profile))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def test_substitute_unit_graph_returns_host():
    T = TerminalProp()
    rng = random.Random(11)
    for _ in range(10):
        host = random_decorated_graph(T, rng)
        ci, vi = 0, rng.randrange(host.graph.components[0].n_vertices)
        d = host.decorations[ci][vi]
        unit_graph = decorate(
            make_graph([single_vertex_component(len(d.in_profile), len(d.out_profile))]),
            [[d]],
        )
        assert enc(substitute(host, ci, vi, unit_graph)) == enc(host)


def test_substitution_preserves_validity_and_evaluation():
    T = TerminalProp()
    rng = random.Random(13)
    for _ in range(12):
        host = random_decorated_graph(T, rng, max_depth=2)
        ci, vi = 0, rng.randrange(host.graph.components[0].n_vertices)
        d = host.decorations[ci][vi]
        inner = None
        for _ in range(40):
            cand = random_decorated_graph(T, rng, max_depth=2)
            if enc(cand.out_profile) == enc(d.out_profile) and enc(cand.in_profile) == enc(d.in_profile):
                inner = cand
                break
        if inner is None:
            # build the trivial inner graph instead
            inner = decorate(
                make_graph([single_vertex_component(len(d.in_profile), len(d.out_profile))]), [[d]]
            )
        out = substitute(host, ci, vi, inner)
        assert validate_mn_graph(out.graph).ok
        assert validate_decoration(T, out).ok
        assert evaluate(T, out) == evaluate(T, host)


def test_substitution_boundary_mismatch_rejected():
    T = TerminalProp()
    host = decorate(make_graph([single_vertex_component(1, 1)]), [[T.component(("*",), ("*",))[0]]])
    inner = decorate(make_graph([single_vertex_component(2, 2)]), [[T.component(("*", "*"), ("*", "*"))[0]]])
    with pytest.raises(CompositionError):
        substitute(host, 0, 0, inner)


def test_substitution_associativity_on_nested_triples():
    T = TerminalProp()
    rng = random.Random(17)
    for _ in range(8):
        g = random_decorated_graph(T, rng, max_depth=2)
        vi = rng.randrange(g.graph.components[0].n_vertices)
        d = g.decorations[0][vi]
        h = decorate(
            make_graph([single_vertex_component(len(d.in_profile), len(d.out_profile))]), [[d]]
        )
        # replace, then replace inside the replaced piece vs substitute the composed graph
        hk = random_decorated_graph(T, rng, max_depth=1)
        dk = h.decorations[0][0]
        k = decorate(
            make_graph([single_vertex_component(len(dk.in_profile), len(dk.out_profile))]), [[dk]]
        )
        lhs = substitute(substitute(g, 0, vi, h), 0, vi, k)
        rhs = substitute(g, 0, vi, substitute(h, 0, 0, k))
        assert enc(lhs) == enc(rhs)


# ---------------------------------------------------------------------------
# Free PROP laws
# ---------------------------------------------------------------------------

def test_free_prop_law_suite():
    F = free_prop(["*"], {"m": (("*",), ("*", "*")), "w": (("*", "*"), ("*",)), "e": (("*", "*"), ("*", "*"))})
    sampler = FreeSampler(F)
    report = check_prop_laws(F, sampler=sampler, samples=50, seed=4)
    assert report.ok, report.failures()


def test_free_prop_units_and_generators():
    F = free_prop(["a", "b"], {"f": (("b",), ("a",))})
    f = F.generator("f")
    assert F.vcomp(f, F.unit(("a",))) == f
    assert F.vcomp(F.unit(("b",)), f) == f
    u = F.unit(("a", "b"))
    assert u.arity == (2, 2)


def test_free_prop_interchange_random():
    F = free_prop(["*"], {"m": (("*",), ("*", "*")), "w": (("*", "*"), ("*",))})
    sampler = FreeSampler(F)
    rng = random.Random(21)
    for x1, x2, y1, y2 in sampler.interchange_quads(rng, 60):
        lhs = F.hcomp(F.vcomp(x1, x2), F.vcomp(y1, y2))
        rhs = F.vcomp(F.hcomp(x1, y1), F.hcomp(x2, y2))
        assert lhs == rhs
