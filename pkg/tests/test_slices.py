import random

import pytest

from propertopes._canon import enc
from propertopes.builtins import TerminalProp, endomorphism_bool
from propertopes.core import CompositionError, PropElement
from propertopes.fixtures import (
    diag_monoid_prop,
    identity_over,
    over_terminal,
    z2_mult,
)
from propertopes.graphs import evaluate
from propertopes.lawcheck import check_algebra_laws, check_prop_laws, check_prop_map
from propertopes.perms import Perm
from propertopes.slices import (
    SliceProp,
    SliceSampler,
    differentiate,
    integrate,
    make_special,
    slice_prop,
    unit_graph,
    validate_slice_element,
)


def T():
    return TerminalProp()


def t_elem(P, m, n):
    return P.component(("*",) * m, ("*",) * n)[0]


def test_unit_is_one_vertex_graph():
    P = T()
    S = slice_prop(P)
    alpha = t_elem(P, 2, 3)
    u = S.unit_single(alpha)
    entries, sigma, tau = S.parts(u)
    assert len(entries) == 1 and sigma.is_identity() and tau.is_identity()
    dg, sg, tg = entries[0]
    assert enc(dg) == enc(unit_graph(P, alpha))
    assert sg.is_identity() and tg.is_identity()
    assert u.out_profile == (alpha,) and u.in_profile == (alpha,)


def test_tensor_special_has_two_one_vertex_components():
    P = T()
    S = slice_prop(P)
    a, b = t_elem(P, 1, 2), t_elem(P, 2, 1)
    e = make_special(S, "tensor", a, b)
    entries, _, _ = S.parts(e)
    assert len(entries) == 1
    assert len(entries[0][0].graph.components) == 2
    assert all(c.n_vertices == 1 for c in entries[0][0].graph.components)
    assert e.out_profile == (P.hcomp(a, b),)
    assert e.in_profile == (a, b)


def test_twisted_unit_with_identities_is_unit():
    P = T()
    S = slice_prop(P)
    alpha = t_elem(P, 2, 2)
    e = make_special(S, "twisted_unit", Perm.identity(2), alpha, Perm.identity(2))
    assert e == S.unit_single(alpha)


def test_circ_special_evaluates_to_vcomp():
    P = endomorphism_bool()
    S = slice_prop(P)
    rng = random.Random(5)
    a = P.sample_element(("b",), ("b", "b"), rng)
    b = P.sample_element(("b", "b"), ("b",), rng)
    e = make_special(S, "circ", a, b)
    entries, _, _ = S.parts(e)
    from propertopes.slices import entry_ev
    assert entry_ev(P, entries[0]) == P.vcomp(a, b)
    assert e.out_profile == (P.vcomp(a, b),)


def test_validate_slice_element_conditions():
    P = T()
    S = slice_prop(P)
    alpha = t_elem(P, 1, 2)
    assert validate_slice_element(P, S.unit_single(alpha)).ok
    a, b = t_elem(P, 1, 2), t_elem(P, 2, 1)
    good = make_special(S, "circ", a, b)
    assert validate_slice_element(P, good).ok
    # same graphs, wrong declared output color: rejected by the evaluation condition
    entries, sigma, tau = S.parts(good)
    bad = PropElement(S.name, (P.hcomp(a, b),), good.in_profile, ("slice", entries, sigma, tau))
    rep = validate_slice_element(P, bad)
    assert not rep.ok
    assert any("evaluation" in c.law and not c.passed for c in rep.checks)


def test_slice_identity_composite_of_chain():
    # vcomp(G_{c.(b.a)}, 1_c (x) G_{b.a}) == G_{c.b.a} with the three-vertex chain
    for P in (T(), endomorphism_bool()):
        S = slice_prop(P)
        rng = random.Random(23)
        for _ in range(6):
            if isinstance(P, TerminalProp):
                gamma = t_elem(P, 2, 2)
                beta = t_elem(P, 2, 3)
                alpha = t_elem(P, 3, 1)
            else:
                gamma = P.sample_element(("b",) * 2, ("b",) * 2, rng)
                beta = P.sample_element(("b",) * 2, ("b",) * 3, rng)
                alpha = P.sample_element(("b",) * 3, ("b",), rng)
            beta_alpha = P.vcomp(beta, alpha)
            lhs = S.vcomp(
                make_special(S, "circ", gamma, beta_alpha),
                S.hcomp(S.unit_single(gamma), make_special(S, "circ", beta, alpha)),
            )
            chain = S.vcomp(make_special(S, "circ", P.vcomp(gamma, beta), alpha),
                            S.hcomp(make_special(S, "circ", gamma, beta), S.unit_single(alpha)))
            # both ways of assembling the 3-chain agree, and match the direct graph
            assert lhs == chain
            entries, sigma, tau = S.parts(lhs)
            assert len(entries) == 1
            comp = entries[0][0].graph.components[0]
            assert comp.n_vertices == 3
            assert lhs.in_profile == (gamma, beta, alpha)
            assert lhs.out_profile == (P.vcomp(P.vcomp(gamma, beta), alpha),)


def test_slice_unit_laws_against_twists():
    P = T()
    S = slice_prop(P)
    rng = random.Random(3)
    sampler = SliceSampler(S)
    for _ in range(25):
        x = sampler.element(rng)
        assert S.vcomp(x, S.unit(x.in_profile)) == x
        assert S.vcomp(S.unit(x.out_profile), x) == x


@pytest.mark.parametrize("base", ["T", "EBool"], ids=["sliceT", "sliceEBool"])
def test_slice_law_suites(base):
    P = T() if base == "T" else endomorphism_bool()
    S = slice_prop(P)
    sampler = SliceSampler(S)
    report = check_prop_laws(S, sampler=sampler, samples=40, seed=9)
    assert report.ok, report.failures()


def test_slice_vcomp_graphs_evaluate_to_declared_colors():
    P = endomorphism_bool()
    S = slice_prop(P)
    sampler = SliceSampler(S)
    rng = random.Random(31)
    for x, y in sampler.vcomp_pairs(rng, 20):
        z = S.vcomp(x, y)
        assert validate_slice_element(P, z).ok


# ---------------------------------------------------------------------------
# integrate / differentiate
# ---------------------------------------------------------------------------

def t_elements_window(P, max_arity=2):
    out = []
    for m in range(1, max_arity + 1):
        for n in range(1, max_arity + 1):
            out.extend(P.component(("*",) * m, ("*",) * n))
    return out


def test_differentiate_identity_over_terminal():
    P = T()
    A = differentiate(identity_over(P), elements=t_elements_window(P))
    for alpha in A.carrier.colors():
        assert A.carrier.fiber(alpha) == (alpha.payload,)
    # action on a circ shape is evaluation in P
    S = slice_prop(P)
    a, b = t_elem(P, 1, 2), t_elem(P, 2, 2)
    theta = make_special(S, "circ", a, b)
    assert A.apply(theta, ("pt", "pt")) == ("pt",)


def test_differentiate_is_algebra_over_slice():
    Q = diag_monoid_prop(["0", "1"], z2_mult, "0", window=2, name="Z2diag")
    A = differentiate(over_terminal(Q))
    S = A.prop
    sampler = SliceSampler(S)
    report = check_algebra_laws(A, sampler=sampler, samples=30, seed=2)
    assert report.ok, report.failures()


def test_differentiate_action_on_circ_matches_source_vcomp():
    Q = diag_monoid_prop(["0", "1"], z2_mult, "0", window=2, name="Z2diag")
    over = over_terminal(Q)
    A = differentiate(over)
    S = A.prop
    P = over.target
    rng = random.Random(7)
    for _ in range(10):
        q1, q2 = rng.choice(Q.elements()), None
        cands = [e for e in Q.elements() if enc(e.out_profile) == enc(q1.in_profile)]
        if not cands:
            continue
        q2 = rng.choice(cands)
        alpha, beta = over(q1), over(q2)
        theta = make_special(S, "circ", alpha, beta)
        got = A.apply(theta, (q1.payload, q2.payload))
        assert got == (Q.vcomp(q1, q2).payload,)


def test_integrate_of_differentiate_recovers_tables():
    Q = diag_monoid_prop(["0", "1"], z2_mult, "0", window=2, name="Z2diag")
    over = over_terminal(Q)
    A = differentiate(over)
    R = integrate(A)
    # carrier: same elements componentwise
    for m in range(1, 3):
        orig = Q.component(("*",) * m, ("*",) * m)
        got = R.component(("*",) * m, ("*",) * m)
        assert len(orig) == len(got)
    # binary operation tables agree through the tagging
    for q1 in Q.component(("*",), ("*",)):
        for q2 in Q.component(("*",), ("*",)):
            expect = Q.vcomp(q1, q2).payload
            x = [e for e in R.elements() if e.payload[2] == q1.payload and e.arity == (1, 1)][0]
            y = [e for e in R.elements() if e.payload[2] == q2.payload and e.arity == (1, 1)][0]
            assert R.vcomp(x, y).payload[2] == expect
            assert R.hcomp(x, y).payload[2] == Q.hcomp(q1, q2).payload
    # the projection to the base is a PROP map
    proj = R.projection().as_prop_map()
    rep = check_prop_map(proj, samples=30, seed=3, max_arity=2)
    assert rep.ok, rep.failures()


def test_differentiate_of_integrate_recovers_algebra():
    Q = diag_monoid_prop(["0", "1"], z2_mult, "0", window=2, name="Z2diag")
    A = differentiate(over_terminal(Q))
    R = integrate(A)
    B = differentiate(R.projection(), elements=R.elements())
    # carriers agree fiberwise up to the integration tagging
    assert A.carrier.colors() == B.carrier.colors()
    for alpha in A.carrier.colors():
        tagged = B.carrier.fiber(alpha)
        plain = A.carrier.fiber(alpha)
        assert len(tagged) == len(plain)
        assert tuple(sorted(t[2] for t in tagged)) == tuple(sorted(plain))
    # actions agree on the special shapes within the window
    S = A.prop
    rng = random.Random(11)
    sampler = SliceSampler(S)
    for _ in range(20):
        theta = sampler.element(rng)
        args_a = []
        ok = True
        for alpha in theta.in_profile:
            fib = A.carrier.fiber(alpha)
            if not fib:
                ok = False
                break
            args_a.append(rng.choice(fib))
        if not ok:
            continue
        try:
            got_a = A.apply(theta, tuple(args_a))
        except Exception:
            continue
        args_b = []
        for alpha, a in zip(theta.in_profile, args_a):
            (match,) = [t for t in B.carrier.fiber(alpha) if t[2] == a]
            args_b.append(match)
        got_b = B.apply(theta, tuple(args_b))
        assert tuple(t[2] for t in got_b) == got_a
