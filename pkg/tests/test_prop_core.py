import itertools
import random

import pytest

from propertopes.builtins import (
    EndomorphismProp,
    InitialProp,
    TableProp,
    TerminalColoredProp,
    TerminalProp,
    endomorphism_bool,
    make_builtin,
)
from propertopes.core import (
    CompositionError,
    GradedSet,
    OwnershipError,
    PropError,
)
from propertopes.lawcheck import check_prop_laws
from propertopes.perms import Perm


def test_initial_components():
    I = InitialProp()
    assert I.component(("*",) * 2, ("*",) * 2) != []
    assert I.component(("*",) * 2, ("*",) * 3) == []


def test_terminal_components_are_points():
    T = TerminalProp()
    for m, n in itertools.product(range(1, 4), repeat=2):
        assert len(T.component(("*",) * m, ("*",) * n)) == 1


def test_terminal_vcomp_and_units():
    T = TerminalProp()
    x = T.component(("*",), ("*", "*"))[0]
    u = T.unit(x.in_profile)
    assert T.vcomp(x, u) == x
    assert T.vcomp(T.unit(x.out_profile), x) == x
    star = T.component(("*",), ("*",))[0]
    assert T.hcomp(star, star).arity == (2, 2)


def test_ownership_checked():
    T, I = TerminalProp(), InitialProp()
    x = T.component(("*",), ("*",))[0]
    with pytest.raises(OwnershipError):
        I.vcomp(x, x)


def test_vcomp_profile_mismatch_rejected():
    T = TerminalProp()
    x = T.component(("*",), ("*", "*"))[0]
    with pytest.raises(CompositionError):
        T.vcomp(x, x)


# ---------------------------------------------------------------------------
# Endomorphism PROP over Bool
# ---------------------------------------------------------------------------

def bool_not(E):
    return E.from_function(("b",), ("b",), lambda a: ("1" if a[0] == "0" else "0",))


def test_endomorphism_component_count():
    # all maps Bool^2 -> Bool, counted independently by enumeration
    E = endomorphism_bool()
    comp = E.component(("b",), ("b", "b"))
    expected = len(list(itertools.product(["0", "1"], repeat=4)))
    assert expected == 16
    assert len(comp) == 16
    # component (1,2) of the underlying biarity decomposition has 16 tables


def test_endomorphism_hcomp_is_product_of_functions():
    E = endomorphism_bool()
    n = bool_not(E)
    nn = E.hcomp(n, n)
    for a, b in itertools.product("01", repeat=2):
        got = E.apply(nn, (a, b))
        assert got == E.apply(n, (a,)) + E.apply(n, (b,))


def test_endomorphism_not_squared_is_identity():
    E = endomorphism_bool()
    n = bool_not(E)
    assert E.vcomp(n, n) == E.unit_single("b")


def test_endomorphism_biact_swap_post_composes():
    E = endomorphism_bool()
    f = E.sample_element(("b", "b"), ("b", "b"), random.Random(3))
    swap = Perm.from_one_based([2, 1])
    g = E.biact(swap, f, Perm.identity(2))
    for args in itertools.product("01", repeat=2):
        v = E.apply(f, args)
        assert E.apply(g, args) == (v[1], v[0])


def test_endomorphism_unit_is_identity_table():
    E = endomorphism_bool()
    u = E.unit_single("b")
    for a in "01":
        assert E.apply(u, (a,)) == (a,)


def test_unit_is_two_sided_for_random_elements():
    E = endomorphism_bool()
    rng = random.Random(11)
    for _ in range(50):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        x = E.sample_element(("b",) * m, ("b",) * n, rng)
        assert E.vcomp(x, E.unit(x.in_profile)) == x
        assert E.vcomp(E.unit(x.out_profile), x) == x


def test_biact_fixes_terminal_points():
    T = TerminalProp()
    x = T.component(("*", "*"), ("*", "*"))[0]
    for s in Perm.all_perms(2):
        for t in Perm.all_perms(2):
            assert T.biact(s, x, t) == x


# ---------------------------------------------------------------------------
# Law suite on the built-ins
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "prop,exhaustive",
    [
        (InitialProp(), True),
        (TerminalProp(), True),
        (TerminalColoredProp(["a", "b"]), True),
        (endomorphism_bool(), False),
    ],
    ids=["I", "T", "T2", "EBool"],
)
def test_builtin_law_suites(prop, exhaustive):
    report = check_prop_laws(prop, exhaustive=exhaustive, samples=60, max_arity=2 if exhaustive else 3)
    assert report.ok, report.failures()


def test_corrupted_table_prop_rejected_with_witness():
    # two-element PROP on the window {(1,1)}: vcomp deliberately broken
    components = {(("c",), ("c",)): ["u", "g"]}
    vcomp = {("u", "u"): "u", ("u", "g"): "g", ("g", "u"): "g", ("g", "g"): "u"}
    hcomp = {}
    good = TableProp("Z2", ["c"], components, vcomp, hcomp, units={"c": "u"})
    assert good.vcomp(good._mk("g"), good._mk("g")) == good._mk("u")

    bad_vcomp = dict(vcomp)
    bad_vcomp[("g", "g")] = "g"  # breaks associativity/unit interplay? actually breaks inverse law only
    bad_vcomp[("g", "u")] = "u"  # breaks the unit law outright
    with pytest.raises(PropError, match="violates"):
        TableProp("Z2bad", ["c"], components, bad_vcomp, hcomp, units={"c": "u"})


def test_make_builtin_dispatch():
    assert make_builtin("initial").name == "I"
    assert make_builtin("terminal").name == "T"
    assert make_builtin("terminal_colored", {"colors": ["x", "y"]}).is_color("x")
    E = make_builtin("endomorphism", {"fibers": {"b": ["0", "1"]}})
    assert E.is_color("b")
    with pytest.raises(PropError):
        make_builtin("nope")
