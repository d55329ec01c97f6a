import itertools
import math
import random

import pytest

from propertopes._canon import enc
from propertopes.builtins import TerminalProp, endomorphism_bool
from propertopes.lawcheck import check_prop_laws
from propertopes.operads import (
    AssociativeOperad,
    OperadView,
    TerminalOperad,
    UnitOperad,
    check_operad_laws,
    compositions,
    operad_to_prop,
    prop_to_operad,
)
from propertopes.perms import Perm


def test_compositions():
    assert compositions(3, 2) == [(1, 2), (2, 1)]
    assert compositions(2, 3) == []
    assert compositions(4, 1) == [(4,)]


@pytest.mark.parametrize(
    "operad",
    [TerminalOperad(arity_cap=3), UnitOperad(), AssociativeOperad(arity_cap=3)],
    ids=["T_op", "I_op", "As"],
)
def test_operad_law_suites(operad):
    report = check_operad_laws(operad, exhaustive=True, max_arity=2)
    assert report.ok, report.failures()


def test_underlying_operad_of_endomorphism_prop_is_lawful():
    # U of a lawful PROP must satisfy the operad axioms as formulated here
    U = OperadView(endomorphism_bool())
    report = check_operad_laws(U, samples=40, max_arity=2, seed=5)
    assert report.ok, report.failures()


def test_underlying_operad_of_terminal_prop_is_terminal():
    U = prop_to_operad(TerminalProp())
    for n in range(1, 4):
        assert len(U.component("*", ("*",) * n)) == 1


def test_underlying_endomorphism_operad_composition_is_cartesian():
    E = endomorphism_bool()
    U = prop_to_operad(E)
    rng = random.Random(2)
    f = U._wrap(E.sample_element(("b",), ("b", "b"), rng))
    g1 = U._wrap(E.sample_element(("b",), ("b",), rng))
    g2 = U._wrap(E.sample_element(("b",), ("b", "b"), rng))
    composite = U.rho(f, (g1, g2))
    for args in itertools.product("01", repeat=3):
        inner = E.apply(U._unwrap(g1), args[:1]) + E.apply(U._unwrap(g2), args[1:])
        assert E.apply(U._unwrap(composite), args) == E.apply(U._unwrap(f), inner)


# ---------------------------------------------------------------------------
# Free PROP on an operad
# ---------------------------------------------------------------------------

def surjection_count(n: int, m: int) -> int:
    """Independent oracle: number of surjections {1..n} -> {1..m} by enumeration."""
    return sum(1 for f in itertools.product(range(m), repeat=n) if len(set(f)) == m)


def test_terminal_operad_prop_components_empty_above_diagonal():
    P = operad_to_prop(TerminalOperad(arity_cap=4))
    for m in range(2, 5):
        for n in range(1, m):
            assert P.component(("*",) * m, ("*",) * n) == []


def test_terminal_operad_prop_component_counts_match_surjections():
    P = operad_to_prop(TerminalOperad(arity_cap=4))
    for m, n in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (1, 3)]:
        got = len(P.component(("*",) * m, ("*",) * n))
        assert got == surjection_count(n, m), (m, n, got)
    assert surjection_count(3, 2) == 6  # the (2,3) brute-force count


def test_unit_operad_prop_diagonal_carries_permutation_classes():
    # Mechanical computation of the quotient: component (n,n) has n! classes,
    # so the PROP generated by the one-point unital operad is the permutation
    # PROP, not the initial PROP with singleton diagonal components.
    P = operad_to_prop(UnitOperad())
    for n in range(1, 4):
        comp = P.component(("*",) * n, ("*",) * n)
        assert len(comp) == math.factorial(n)


def test_unit_operad_prop_component_1_1_single_class():
    P = operad_to_prop(UnitOperad())
    assert len(P.component(("*",), ("*",))) == 1


def test_operad_prop_twisted_units_compose_like_permutations():
    P = operad_to_prop(UnitOperad())
    u = P.unit_single("*")
    rng = random.Random(0)
    for _ in range(20):
        s1, s2 = Perm.random(3, rng), Perm.random(3, rng)
        x = P.biact(s1, P.unit(("*",) * 3), Perm.identity(3))
        y = P.biact(s2, P.unit(("*",) * 3), Perm.identity(3))
        assert P.vcomp(x, y) == P.biact(s1.compose(s2), P.unit(("*",) * 3), Perm.identity(3))
    assert P.vcomp(u, u) == u


@pytest.mark.parametrize(
    "operad,max_arity",
    [(TerminalOperad(arity_cap=4), 3), (UnitOperad(), 3), (AssociativeOperad(arity_cap=3), 2)],
    ids=["T_op", "I_op", "As"],
)
def test_operad_prop_law_suites(operad, max_arity):
    P = operad_to_prop(operad)
    report = check_prop_laws(P, exhaustive=True, max_arity=max_arity)
    assert report.ok, report.failures()


def test_normal_form_agrees_with_orbit_closure():
    # the sorted normal form must pick exactly one representative per move orbit
    rng = random.Random(9)
    for operad in (TerminalOperad(arity_cap=3), AssociativeOperad(arity_cap=3)):
        P = operad_to_prop(operad)
        tuples = []
        for _ in range(12):
            m = rng.randint(1, 3)
            factors = []
            for _ in range(m):
                k = rng.randint(1, 2)
                factors.append(rng.choice(operad.component("*", ("*",) * k)))
            n = sum(f.arity for f in factors)
            tuples.append((tuple(factors), Perm.random(m, rng), Perm.random(n, rng)))
        closures = [P.orbit_closure(*t) for t in tuples]
        elems = [P.make(*t) for t in tuples]
        for i in range(len(tuples)):
            for j in range(len(tuples)):
                same_class = bool(closures[i] & closures[j])
                assert same_class == (elems[i] == elems[j]), (i, j)


@pytest.mark.parametrize(
    "operad", [TerminalOperad(arity_cap=3), AssociativeOperad(arity_cap=2), UnitOperad()],
    ids=["T_op", "As", "I_op"],
)
def test_forgetful_after_free_recovers_operad(operad):
    P = operad_to_prop(operad)
    U = prop_to_operad(P)
    for d in operad.colors:
        for k in range(1, 3):
            for c_profile in itertools.product(operad.colors, repeat=k):
                orig = operad.component(d, c_profile)
                free = U.component(d, c_profile)
                assert len(orig) == len(free)
                embedded = {P.make((o,), Perm.identity(1), Perm.identity(k)).enc for o in orig}
                assert embedded == {U._unwrap(o).enc for o in free}
    # composition agrees with the original operad through the embedding
    rng = random.Random(1)
    for _ in range(10):
        f = operad.sample(operad.colors[0], (operad.colors[0],) * 2, rng)
        if f is None:
            continue
        gs = tuple(operad.sample(c, (c,), rng) for c in f.in_profile)
        if any(g is None for g in gs):
            continue
        lhs = P.make((operad.rho(f, gs),), Perm.identity(1), Perm.identity(2))
        rhs = U._unwrap(U.rho(U._wrap(P.make((f,), Perm.identity(1), Perm.identity(2))),
                              tuple(U._wrap(P.make((g,), Perm.identity(1), Perm.identity(1))) for g in gs)))
        assert lhs == rhs
