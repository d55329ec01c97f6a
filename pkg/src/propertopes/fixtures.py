"""Reusable finite fixtures: diagonal monoid PROPs, bimonoid-style algebras.

``diag_monoid_prop`` builds the truncated tensor-power PROP of a finite
monoid M: the (n, n) component is M^n for n up to a window bound (collapsing
to a point above it), vertical composition is pointwise multiplication,
horizontal composition is concatenation, and the permutation actions are
declared trivial.  These are the workhorse finitely-supported PROPs over the
initial and terminal PROPs.
"""

from __future__ import annotations

import itertools
from typing import Any, Callable, Sequence

from .builtins import InitialProp, TableProp, TerminalProp
from .core import GradedSet, PropAlgebra, PropElement, PropImpl
from .slices import PropOverP


def diag_monoid_prop(
    elements: Sequence[str],
    mult: Callable[[str, str], str],
    unit: str,
    window: int = 2,
    collapse_to: int = 2,
    name: str = "M",
) -> TableProp:
    """The PROP with (n,n) = M^n for n <= window; other components empty.

    ``collapse_to`` keeps components above the window as single points so the
    horizontal composition stays total on the declared window (mirroring the
    truncation of a tensor algebra).
    """
    elements = list(elements)
    total = window + collapse_to
    components: dict[tuple, list[str]] = {}
    names: dict[tuple[int, tuple[str, ...]], str] = {}

    def tuples(n: int) -> list[tuple[str, ...]]:
        if n <= window:
            return [t for t in itertools.product(elements, repeat=n)]
        return [("#",) * n]  # collapsed point

    def nm(n: int, t: tuple[str, ...]) -> str:
        key = (n, t)
        if key not in names:
            names[key] = f"{n}:{','.join(t)}"
        return names[key]

    for n in range(1, total + 1):
        components[(("*",) * n, ("*",) * n)] = [nm(n, t) for t in tuples(n)]

    def collapse(n: int, t: tuple[str, ...]) -> tuple[str, ...]:
        return t if n <= window else ("#",) * n

    vcomp = {}
    for n in range(1, total + 1):
        for t1 in tuples(n):
            for t2 in tuples(n):
                if n <= window:
                    prod = tuple(mult(a, b) for a, b in zip(t1, t2))
                else:
                    prod = ("#",) * n
                vcomp[(nm(n, t1), nm(n, t2))] = nm(n, prod)
    hcomp = {}
    for n1 in range(1, total + 1):
        for n2 in range(1, total - n1 + 1):
            for t1 in tuples(n1):
                for t2 in tuples(n2):
                    joined = collapse(n1 + n2, tuple(t1 + t2) if n1 + n2 <= window else ("#",) * (n1 + n2))
                    hcomp[(nm(n1, t1), nm(n2, t2))] = nm(n1 + n2, joined)
    units = {"*": nm(1, (unit,))}
    return TableProp(name, ["*"], components, vcomp, hcomp, units=units)


def over_initial(Q: TableProp, name: str | None = None) -> PropOverP:
    """The unique color-preserving map from a diagonal table PROP to I."""
    I = InitialProp()

    def fn(x: PropElement) -> PropElement:
        return PropElement(I.name, ("*",) * len(x.out_profile), ("*",) * len(x.in_profile), "pt")

    return PropOverP(Q, I, fn, name or f"{Q.name}->I")


def over_terminal(Q: PropImpl, name: str | None = None) -> PropOverP:
    """The unique map from any 1-colored PROP to the terminal PROP."""
    T = TerminalProp()

    def fn(x: PropElement) -> PropElement:
        return PropElement(T.name, ("*",) * len(x.out_profile), ("*",) * len(x.in_profile), "pt")

    return PropOverP(Q, T, fn, name or f"{Q.name}->T")


def identity_over(P: PropImpl) -> PropOverP:
    return PropOverP(P, P, lambda x: x, name=f"id:{P.name}")


def z2_mult(a: str, b: str) -> str:
    return "0" if a == b else "1"


def or_mult(a: str, b: str) -> str:
    return "1" if "1" in (a, b) else "0"


# ---------------------------------------------------------------------------
# Bimonoid-style structure maps over the terminal PROP
# ---------------------------------------------------------------------------

def join_algebra(T: TerminalProp, elements: Sequence[str], join: Callable[[str, str], str], name: str) -> PropAlgebra:
    """The structure maps mu(m,n) = Delta^(m-1) . mu^(n-1) of a semilattice.

    The table sends the point of T(m,n) to the map repeating the join of all
    arguments m times.  This realizes the bicommutative-bimonoid reading of
    the terminal PROP; it is not a unital PROP algebra (the diagonal
    component law fails for more than one element), which the law report
    makes visible rather than hiding.
    """
    carrier = GradedSet.from_dict({"*": list(elements)})

    def act(x: PropElement, args: tuple) -> tuple:
        acc = args[0]
        for a in args[1:]:
            acc = join(acc, a)
        return (acc,) * len(x.out_profile)

    return PropAlgebra(T, carrier, act, name=name)


def bool_or_algebra(T: TerminalProp | None = None) -> PropAlgebra:
    return join_algebra(T or TerminalProp(), ["0", "1"], or_mult, "bool-or")


def one_point_algebra(P: PropImpl, name: str = "point") -> PropAlgebra:
    colors = P.colors or ()
    carrier = GradedSet.from_dict({c: ["*"] for c in colors})

    def act(x: PropElement, args: tuple) -> tuple:
        return ("*",) * len(x.out_profile)

    return PropAlgebra(P, carrier, act, name=name)


# ---------------------------------------------------------------------------
# Ready-made weak-n fixtures
# ---------------------------------------------------------------------------

def off_diagonal(v: PropElement) -> bool:
    """Admissibility for bimonoid-style fixtures: no higher diagonal units.

    The join-style structure maps cannot send the diagonal points of the
    terminal PROP to identities, so universes for those fixtures avoid the
    unit shapes at arity two and above.
    """
    m, n = v.arity
    return m != n or m == 1


def terminal_universe(
    D: int = 3,
    diagonal_free: bool = True,
    per_dim: int = 4,
    arities: Sequence[tuple[int, int]] | None = None,
):
    """A face-closed universe over the terminal PROP for weak-0 fixtures.

    Kept deliberately small: cell sets grow exponentially with face counts,
    so the checkable universes trade breadth for tractable enumeration.
    """
    from .presheaves import special_universe

    T = TerminalProp()
    if arities is None:
        arities = [(1, 1), (1, 2), (2, 1)]
        if not diagonal_free:
            arities = arities + [(2, 2)]
    dim1 = [T.component(("*",) * m, ("*",) * n)[0] for (m, n) in arities]
    return special_universe(
        T, D, dim1, per_dim=per_dim, allowed=off_diagonal if diagonal_free else None
    )


def weak1_fixture(window: int = 2):
    """A slice-of-terminal algebra with a three-element monoid of morphisms.

    Returns (algebra, universe): the algebra is the fibering of the diagonal
    monoid PROP over the terminal PROP, whose weak-1 structure has hom-sets
    given by the monoid (join on a three-element chain).
    """
    from .presheaves import special_universe
    from .slices import differentiate

    def join3(a: str, b: str) -> str:
        return max(a, b)

    Q = diag_monoid_prop(["0", "1", "2"], join3, "0", window=window, name="Join3")
    over = over_terminal(Q)
    B = differentiate(over)
    T = over.target
    dim1 = [T.component(("*",), ("*",))[0]]
    universe = special_universe(T, 3, dim1, per_dim=4, twists=1)
    return B, universe
