import itertools
import random

import pytest

from propertopes._canon import enc
from propertopes.builtins import InitialProp, TerminalProp
from propertopes.core import PropError, PropMap, PropElement
from propertopes.facecat import FaceMap, Propertope, iterated, propertope_from_element
from propertopes.fixtures import (
    bool_or_algebra,
    join_algebra,
    one_point_algebra,
    terminal_universe,
    weak1_fixture,
)
from propertopes.presheaves import (
    Boundary,
    Horn,
    PropertopicMap,
    PropertopicSet,
    boundaries_of,
    check_weak_n,
    compose_cells,
    em_reflect,
    face_closure,
    fillings,
    horns_of,
    is_fibration,
    map_propertope,
    map_to_terminal,
    phi_extract,
    psi_build,
    pullback,
    special_universe,
    standard_sets,
    terminal_set,
    underlying_category,
    validate_presheaf,
    validate_propertopic_map,
)
from propertopes.slices import make_special

T = TerminalProp()


def t_elem(m, n):
    return T.component(("*",) * m, ("*",) * n)[0]


@pytest.fixture(scope="module")
def or_setup():
    A = bool_or_algebra(T)
    universe = terminal_universe(3)
    X = psi_build(A, 0, 3, universe)
    return A, universe, X


@pytest.fixture(scope="module")
def term_setup():
    universe = terminal_universe(3)
    return universe, terminal_set(T, universe, 3)


def test_terminal_set_validates_and_fills(term_setup):
    universe, star = term_setup
    assert validate_presheaf(star).ok
    for dim in (1, 2, 3):
        for g in star.shapes(dim):
            for h in horns_of(star, g):
                assert len(fillings(star, h)) == 1
    for n in (0, 1, 2):
        assert check_weak_n(star, n, 3).ok
    assert check_weak_n(star, None, 3).ok  # fibrancy


def test_psi_or_validates_and_is_weak0(or_setup):
    A, universe, X = or_setup
    rep = validate_presheaf(X)
    assert rep.ok, rep.failures()
    rep2 = check_weak_n(X, 0, 3)
    assert rep2.ok, rep2.failures()


def test_psi_or_horn_filling_is_join(or_setup):
    A, universe, X = or_setup
    gamma = Propertope(T.name, 1, t_elem(1, 2))
    for a, b in itertools.product("01", repeat=2):
        got = fillings(X, Horn(gamma, (a, b)))
        assert len(got) == 1
        out = X.face(gamma, "out", 0, got[0])
        assert out == ("1" if "1" in (a, b) else "0")  # brute-force join oracle


def test_psi_one_point_algebra_is_terminal(or_setup):
    _, universe, _ = or_setup
    X = psi_build(one_point_algebra(T), 0, 3, universe)
    for dim in X.universe:
        for g in X.shapes(dim):
            assert len(X.cells_of(g)) == 1
    assert validate_presheaf(X).ok


def test_compose_cells_on_diagonal_universe():
    A = bool_or_algebra(T)
    universe = terminal_universe(3, diagonal_free=False, per_dim=3, arities=[(1, 1), (2, 2)])
    X = psi_build(A, 0, 3, universe)
    assert check_weak_n(X, 0, 3).ok
    g22 = Propertope(T.name, 1, t_elem(2, 2))
    for a, b in itertools.product("01", repeat=2):
        join = "1" if "1" in (a, b) else "0"
        assert compose_cells(X, g22, (a, b)) == {(join, join)}
    # but the unital family genuinely fails for the join structure maps:
    # the diagonal point is forced to act as both the identity and the join
    rep = validate_presheaf(X)
    assert not rep.ok
    assert any(c.law == "consistency-families" and not c.passed for c in rep.checks)


def test_corrupted_out_face_breaks_consistency(or_setup):
    A, universe, X = or_setup
    # find a chain shape and flip one out-face value at dimension 1
    target = None
    for g in X.shapes(2):
        v = g.value
        if len(v.in_profile) == 2 and len(v.out_profile) == 1:
            if enc(v.in_profile[0].in_profile) == enc(v.in_profile[1].out_profile):
                target = g
                break
    assert target is not None
    broken_faces = {k: dict(v) for k, v in X.face_fn.items()}
    down = FaceMap(target, "out", 0).target
    key = (down.enc, "out", 0)
    flip = {"0": "1", "1": "0"}
    broken_faces[key] = {c: flip[v] for c, v in broken_faces[key].items()}
    Y = PropertopicSet(X.base, X.bound, X.universe, X.cells, broken_faces, X.default, name="broken")
    rep = validate_presheaf(Y)
    assert not rep.ok


def test_phi_extract_recovers_structure_maps(or_setup):
    A, universe, X = or_setup
    extracted = phi_extract(X, 0)
    for g in X.shapes(1):
        x = g.value
        for args in itertools.product(*[A.carrier.fiber(c) for c in x.in_profile]):
            assert extracted.apply(x, args) == A.apply(x, args)


def test_phi_extract_random_semilattices():
    rng = random.Random(5)
    universe = terminal_universe(3)
    for joiner in (min, max):
        B = join_algebra(T, ["0", "1", "2"], lambda a, b: joiner(a, b), f"join-{joiner.__name__}")
        X = psi_build(B, 0, 3, universe)
        assert check_weak_n(X, 0, 3).ok
        assert validate_presheaf(X).ok
        extracted = phi_extract(X, 0)
        for g in X.shapes(1):
            x = g.value
            for args in itertools.product(*[B.carrier.fiber(c) for c in x.in_profile]):
                assert extracted.apply(x, args) == B.apply(x, args)


def test_mu_formula_brute_force():
    # mu(m,n) = Delta^(m-1) . mu^(n-1): the structure map repeats the total join
    A = bool_or_algebra(T)
    for m in range(1, 5):
        for n in range(1, 5):
            x = t_elem(m, n)
            for args in itertools.product("01", repeat=n):
                join = args[0]
                for a in args[1:]:
                    join = "1" if "1" in (join, a) else "0"
                assert A.apply(x, args) == (join,) * m


# ---------------------------------------------------------------------------
# EM / weak-1
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def weak1_setup():
    B, universe = weak1_fixture()
    X = psi_build(B, 1, 3, universe)
    return B, universe, X


def test_weak1_fixture_validates_and_checks(weak1_setup):
    B, universe, X = weak1_setup
    rep = validate_presheaf(X)
    assert rep.ok, rep.failures()
    rep2 = check_weak_n(X, 1, 3)
    assert rep2.ok, rep2.failures()


def test_weak1_phi_round_trip(weak1_setup):
    B, universe, X = weak1_setup
    extracted = phi_extract(X, 1)
    for g in X.shapes(2):
        theta = g.value
        spaces = [B.carrier.fiber(c) for c in theta.in_profile]
        for args in itertools.product(*spaces):
            assert extracted.apply(theta, args) == B.apply(theta, args)


def test_underlying_category_associativity(weak1_setup):
    B, universe, X = weak1_setup
    cat = underlying_category(X, 1)
    morphisms = [m for homs in cat.hom.values() for m in homs]
    # restrict to endomorphisms of the unique object at the (1,1) shape
    composable = [(g, f) for g in morphisms for f in cat_composable(cat, g, morphisms)]
    assert composable
    tested = 0
    for g in morphisms:
        for f in morphisms:
            if not composable_pair(g, f):
                continue
            for h in morphisms:
                if not composable_pair(h, g):
                    continue
                gf = cat.compose(g, f)
                hg = cat.compose(h, g)
                lhs = cat.compose(h, gf) if composable_pair(h, gf) else None
                rhs = cat.compose(hg, f) if composable_pair(hg, f) else None
                assert lhs is not None and rhs is not None
                assert lhs[0].enc == rhs[0].enc and lhs[1] == rhs[1]
                tested += 1
    assert tested >= 27


def composable_pair(g, f):
    # in this fixture all shapes are endomorphisms of the point, so
    # composability is just matching (1,1)-style shapes
    return len(g[0].value.in_profile) == 1 and len(f[0].value.out_profile) == 1


def cat_composable(cat, g, morphisms):
    return [f for f in morphisms if composable_pair(g, f)]


def test_em_reflect_terminal_and_weak1(weak1_setup, term_setup):
    universe, star = term_setup
    assert em_reflect(star, 0).cells == star.cells
    B, uni, X = weak1_setup
    R = em_reflect(X, 1)
    for g in R.shapes(0):
        assert R.cells_of(g) == ("*",)
    for dim in (1, 2, 3):
        for g in R.shapes(dim):
            assert len(R.cells_of(g)) == len(X.cells_of(g))
    assert validate_presheaf(R).ok


def test_em_reflect_of_weak0_is_identity(or_setup):
    A, universe, X = or_setup
    R = em_reflect(X, 0)
    assert R.cells == X.cells


# ---------------------------------------------------------------------------
# Fibrations
# ---------------------------------------------------------------------------

def test_fibrant_and_identity_fibration(or_setup):
    A, universe, X = or_setup
    star = terminal_set(T, X.universe, 3)
    p = map_to_terminal(X, star)
    assert validate_propertopic_map(p).ok
    assert is_fibration(p, 3).ok
    ident = PropertopicMap(X, X, {g.enc: {c: c for c in X.cells_of(g)} for d in X.universe for g in X.universe[d]})
    assert is_fibration(ident, 3).ok


def test_non_fibrant_example_detected():
    # one shape at dimension 1 with a missing horn filler
    gamma = Propertope(T.name, 1, t_elem(1, 1))
    zero = Propertope(T.name, 0, "*")
    universe = {0: [zero], 1: [gamma]}
    cells = {zero.enc: ("a", "b"), gamma.enc: ("aa",)}
    face_fn = {
        (gamma.enc, "in", 0): {"aa": "a"},
        (gamma.enc, "out", 0): {"aa": "a"},
    }
    X = PropertopicSet(T, 1, universe, cells, face_fn, name="holey")
    star = terminal_set(T, universe, 1)
    rep = is_fibration(map_to_terminal(X, star), 1)
    assert not rep.ok


# ---------------------------------------------------------------------------
# Pullback
# ---------------------------------------------------------------------------

def initial_to_terminal() -> PropMap:
    I = InitialProp()

    def fn(x):
        return PropElement(T.name, x.out_profile, x.in_profile, "pt")

    return PropMap(I, T, fn, name="I->T")


def test_map_propertope_preserves_specials():
    phi = initial_to_terminal()
    I = phi.source
    a = I.component(("*",) * 2, ("*",) * 2)[0]
    b = I.component(("*",) * 2, ("*",) * 2)[0]
    g = propertope_from_element(I, make_special(iterated(I, 1), "circ", a, b))
    image = map_propertope(phi, g)
    expected = make_special(iterated(T, 1), "circ", phi(a), phi(b))
    assert enc(image.value) == enc(expected)


def test_pullback_along_identity(or_setup):
    A, universe, X = or_setup
    ident = PropMap(T, T, lambda x: x, name="id")
    Y = pullback(ident, X, X.universe)
    assert Y.cells == X.cells


def test_pullback_weak0_along_initial_inclusion():
    phi = initial_to_terminal()
    I = phi.source
    A = bool_or_algebra(T)
    dim1_I = [I.component(("*",) * n, ("*",) * n)[0] for n in (1, 2)]
    universe_I = face_closure(special_universe(I, 3, dim1_I, per_dim=3, twists=1))
    # the structure downstairs is built exactly on the image shapes
    universe_T = face_closure(
        {dim: [map_propertope(phi, g) for g in shapes] for dim, shapes in universe_I.items()}
    )
    X = psi_build(A, 0, 3, universe_T)
    assert check_weak_n(X, 0, 3).ok
    Y = pullback(phi, X, universe_I)
    rep = check_weak_n(Y, 0, 3)
    assert rep.ok, rep.failures()


# ---------------------------------------------------------------------------
# Standard sets
# ---------------------------------------------------------------------------

def test_standard_sets_basics():
    S = iterated(T, 1)
    g = propertope_from_element(T, make_special(S, "tensor", t_elem(1, 2), t_elem(2, 1)))
    delta, exact = standard_sets(T, g, "delta")
    assert exact
    assert delta.cells_of(g) != () and len(delta.cells_of(g)) == 1  # the identity chain
    boundary, _ = standard_sets(T, g, "boundary")
    assert boundary.cells_of(g) == ()
    horn, _ = standard_sets(T, g, "horn")
    for dim in sorted(horn.universe):
        for shape in horn.universe[dim]:
            h = set(horn.cells_of(shape))
            b = set(boundary.cells_of(shape))
            d = set(delta.cells_of(shape))
            assert h <= b <= d or (shape.enc == g.enc and h <= d)


def test_boundary_maps_biject_with_coherent_boundaries(or_setup):
    A, universe, X = or_setup
    # small shape: a unit at a (1,2)-element
    S = iterated(T, 1)
    alpha = t_elem(1, 2)
    g = propertope_from_element(T, S.unit_single(alpha))
    assert X.supported(g)
    bset, exact = standard_sets(T, g, "boundary")
    assert exact
    # enumerate propertopic maps boundary -> X by brute force
    shapes = [s for dim in sorted(bset.universe) for s in bset.universe[dim] if bset.cells_of(s)]
    spaces = []
    for s in shapes:
        spaces.append([(s, dict(zip(bset.cells_of(s), combo))) for combo in
                       itertools.product(X.cells_of(s), repeat=len(bset.cells_of(s)))])
    count_maps = 0
    for combo in itertools.product(*spaces):
        comp = {s.enc: fn for (s, fn) in combo}
        F = PropertopicMap(bset, X, comp)
        if validate_propertopic_map(F).ok:
            count_maps += 1
    coherent = list(boundaries_of(X, g))
    assert count_maps == len(coherent)
