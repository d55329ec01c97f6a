"""Colors, profiles, PROP elements, and the colored PROP interface.

A colored PROP assigns to every pair of color profiles (out; in) a set of
elements, together with a horizontal composition (side-by-side tensor), a
vertical composition (plugging outputs into inputs), a bi-equivariant action
of permutation pairs, and units.  Implementations are value-oriented: every
element is an immutable ``PropElement`` whose payload is in canonical form,
so structural equality is semantic equality within one owner PROP.

Colors are either plain strings (base PROPs) or ``PropElement`` values of a
lower PROP (slice PROPs, whose colors are the elements of the PROP being
sliced).
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Callable, Iterable, Sequence

from ._canon import canon, enc
from .perms import Perm

Color = Any  # str for base PROPs, PropElement for slice PROPs
Profile = tuple[Color, ...]


class PropError(Exception):
    """Base class for contract violations raised by PROP operations."""


class ArityError(PropError):
    pass


class ColorError(PropError):
    pass


class CompositionError(PropError):
    pass


class OwnershipError(PropError):
    pass


class OutOfWindowError(PropError):
    """Raised by windowed (finite-table) PROPs when a result component is undeclared."""


def profile(*colors: Color) -> Profile:
    """Build a profile, rejecting the empty sequence."""
    if not colors:
        raise ArityError("profiles are non-empty")
    return tuple(colors)


def check_profile(p: Sequence[Color]) -> Profile:
    if len(p) == 0:
        raise ArityError("profiles are non-empty")
    return tuple(p)


def profile_act(sigma: Perm, p: Sequence[Color]) -> Profile:
    """Left action of a permutation on a profile: result[i] = p[sigma^-1(i)]."""
    if len(sigma) != len(p):
        raise ArityError(f"permutation of size {len(sigma)} cannot act on profile of length {len(p)}")
    return sigma.act(tuple(p))


def profile_ract(p: Sequence[Color], tau: Perm) -> Profile:
    """Right action: result[i] = p[tau(i)]."""
    if len(tau) != len(p):
        raise ArityError(f"profile of length {len(p)} cannot carry action of size {len(tau)}")
    return tau.ract(tuple(p))


@dataclass(frozen=True)
class PropElement:
    """An element of a colored PROP in a component (out_profile; in_profile)."""

    owner: str
    out_profile: Profile
    in_profile: Profile
    payload: Any

    def __post_init__(self) -> None:
        check_profile(self.out_profile)
        check_profile(self.in_profile)
        object.__setattr__(self, "_enc", None)

    def canon_tree(self) -> Any:
        return ("elem", self.owner, canon(self.out_profile), canon(self.in_profile), canon(self.payload))

    @property
    def enc(self) -> str:
        cached = object.__getattribute__(self, "_enc")
        if cached is None:
            cached = enc(self)
            object.__setattr__(self, "_enc", cached)
        return cached

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PropElement) and self.enc == other.enc

    def __hash__(self) -> int:
        return hash(self.enc)

    def __repr__(self) -> str:
        return f"<{self.owner}:{len(self.out_profile)},{len(self.in_profile)}:{self.payload!r}>"

    @property
    def arity(self) -> tuple[int, int]:
        return (len(self.out_profile), len(self.in_profile))


@dataclass(frozen=True)
class GradedSet:
    """A finite set graded by colors; fibers are stored sorted for determinism."""

    fibers: tuple[tuple[Color, tuple[Any, ...]], ...]

    @staticmethod
    def from_dict(d: dict[Color, Iterable[Any]]) -> "GradedSet":
        items = []
        for c in sorted(d, key=enc):
            items.append((c, tuple(sorted(d[c], key=enc))))
        return GradedSet(tuple(items))

    def fiber(self, c: Color) -> tuple[Any, ...]:
        for color, fib in self.fibers:
            if enc(color) == enc(c):
                return fib
        return ()

    def colors(self) -> tuple[Color, ...]:
        return tuple(c for c, _ in self.fibers)

    def canon_tree(self) -> Any:
        return ("graded", canon(self.fibers))


class PropImpl(ABC):
    """Interface every colored PROP implementation provides.

    ``colors`` is the finite color list for base PROPs and ``None`` when the
    color domain is not finitely enumerable (slice PROPs, where colors are
    the elements of the sliced PROP).
    """

    name: str
    unital: bool = True

    # ---- color domain -------------------------------------------------
    @property
    def colors(self) -> tuple[Color, ...] | None:
        return None

    @abstractmethod
    def is_color(self, c: Color) -> bool:
        ...

    def check_color(self, c: Color) -> Color:
        if not self.is_color(c):
            raise ColorError(f"{c!r} is not a color of {self.name}")
        return c

    def check_profile_colors(self, p: Sequence[Color]) -> Profile:
        return tuple(self.check_color(c) for c in check_profile(p))

    # ---- elements ------------------------------------------------------
    @abstractmethod
    def contains(self, x: PropElement) -> bool:
        ...

    def check_owned(self, x: PropElement) -> PropElement:
        if x.owner != self.name:
            raise OwnershipError(f"element of {x.owner!r} passed to {self.name!r}")
        return x

    def component(self, out_p: Sequence[Color], in_p: Sequence[Color]) -> list[PropElement] | None:
        """All elements with the given profile pair, or None when not enumerable."""
        return None

    @abstractmethod
    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement | None:
        """A pseudo-random element of the component, or None when it is empty."""

    # ---- operations ------------------------------------------------------
    @abstractmethod
    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        ...

    @abstractmethod
    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        ...

    @abstractmethod
    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        ...

    def unit_single(self, c: Color) -> PropElement:
        raise PropError(f"{self.name} is not unital")

    def unit(self, p: Sequence[Color]) -> PropElement:
        """The two-sided vertical unit at a profile: 1_{c1} (x) ... (x) 1_{cn}."""
        prof = self.check_profile_colors(p)
        units = [self.unit_single(c) for c in prof]
        return reduce(self.hcomp, units)

    def eq(self, x: PropElement, y: PropElement) -> bool:
        return self.check_owned(x) == self.check_owned(y)

    # ---- shared precondition helpers ----------------------------------
    def _pre_hcomp(self, x: PropElement, y: PropElement) -> None:
        self.check_owned(x)
        self.check_owned(y)

    def _pre_vcomp(self, x: PropElement, y: PropElement) -> None:
        self.check_owned(x)
        self.check_owned(y)
        if enc(x.in_profile) != enc(y.out_profile):
            raise CompositionError(
                f"vertical composition mismatch in {self.name}: "
                f"in-profile {x.in_profile!r} vs out-profile {y.out_profile!r}"
            )

    def _pre_biact(self, sigma: Perm, x: PropElement, tau: Perm) -> None:
        self.check_owned(x)
        if len(sigma) != len(x.out_profile):
            raise ArityError("output permutation size mismatch")
        if len(tau) != len(x.in_profile):
            raise ArityError("input permutation size mismatch")

    # ---- sampling helpers ----------------------------------------------
    def sample_color(self, rng: random.Random) -> Color:
        cs = self.colors
        if cs is None:
            raise PropError(f"{self.name} has no enumerable colors")
        return rng.choice(list(cs))

    def sample_profile(self, rng: random.Random, max_len: int = 3) -> Profile:
        k = rng.randint(1, max_len)
        return tuple(self.sample_color(rng) for _ in range(k))


def element(owner: PropImpl | str, out_p: Sequence[Color], in_p: Sequence[Color], payload: Any) -> PropElement:
    name = owner if isinstance(owner, str) else owner.name
    return PropElement(name, tuple(out_p), tuple(in_p), payload)


# ---------------------------------------------------------------------------
# Algebras
# ---------------------------------------------------------------------------

@dataclass
class PropAlgebra:
    """An algebra over a PROP: a graded carrier plus structure maps.

    ``act(x, args)`` takes an element ``x`` of ``prop`` and a tuple of carrier
    elements colored by the in-profile of ``x`` and returns the tuple colored
    by the out-profile.  Law conformance is checked by
    ``lawcheck.check_algebra_laws``; it is reported, not enforced, so that
    near-algebras from the literature can still be represented and probed.
    """

    prop: PropImpl
    carrier: GradedSet
    act: Callable[[PropElement, tuple[Any, ...]], tuple[Any, ...]]
    name: str = "algebra"

    def apply(self, x: PropElement, args: Sequence[Any]) -> tuple[Any, ...]:
        self.prop.check_owned(x)
        args = tuple(args)
        if len(args) != len(x.in_profile):
            raise ArityError(
                f"{self.name}: {len(args)} arguments for in-profile of length {len(x.in_profile)}"
            )
        for a, c in zip(args, x.in_profile):
            if a not in self.carrier.fiber(c):
                raise ColorError(f"{self.name}: argument {a!r} not in fiber of color {c!r}")
        out = tuple(self.act(x, args))
        if len(out) != len(x.out_profile):
            raise ArityError(f"{self.name}: structure map returned wrong arity")
        return out

    def support(self) -> tuple[Color, ...]:
        return tuple(c for c in self.carrier.colors() if self.carrier.fiber(c))


def algebra_act(algebra: PropAlgebra, x: PropElement, args: Sequence[Any]) -> tuple[Any, ...]:
    """Apply an algebra structure map; module-level spelling of PropAlgebra.apply."""
    return algebra.apply(x, args)


@dataclass
class PropMap:
    """A map of PROPs with the same color set: element-level function source -> target."""

    source: PropImpl
    target: PropImpl
    fn: Callable[[PropElement], PropElement]
    name: str = "prop-map"

    def __call__(self, x: PropElement) -> PropElement:
        self.source.check_owned(x)
        y = self.fn(x)
        self.target.check_owned(y)
        if enc(y.out_profile) != enc(x.out_profile) or enc(y.in_profile) != enc(x.in_profile):
            raise ColorError(f"{self.name} does not preserve profiles on {x!r}")
        return y


@dataclass
class CheckResult:
    law: str
    passed: bool
    witness: Any = None
    tested: int | None = None

    def as_json(self) -> dict:
        out = {"law": self.law, "passed": self.passed}
        if self.tested is not None:
            out["tested"] = self.tested
        if not self.passed:
            out["witness"] = repr(self.witness)
        return out


@dataclass
class Report:
    """Outcome of a verification pass: one entry per law or condition."""

    subject: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, law: str, passed: bool, witness: Any = None, tested: int | None = None) -> None:
        self.checks.append(CheckResult(law, passed, witness, tested))

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def as_json(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "checks": [c.as_json() for c in self.checks],
        }
