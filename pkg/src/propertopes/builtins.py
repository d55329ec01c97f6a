"""Built-in colored PROPs: initial, terminal, endomorphism, and finite tables.

The finite-table kind is *windowed*: components are declared on a finite set
of profile pairs and operations whose result would land outside the window
raise ``OutOfWindowError``.  Law checks quantify over the window only.  True
finitely-supported PROPs cannot exist (horizontal composition forces support
to be closed under concatenation), so the window is the honest finite
truncation.
"""

from __future__ import annotations

import itertools
import random
from typing import Any, Iterable, Sequence

from ._canon import enc
from .core import (
    ArityError,
    ColorError,
    CompositionError,
    GradedSet,
    OutOfWindowError,
    PropElement,
    PropError,
    PropImpl,
    Profile,
    check_profile,
    profile_act,
    profile_ract,
)
from .perms import Perm, block_sum

POINT = "pt"


class _PointedProp(PropImpl):
    """Shared machinery for PROPs whose nonempty components are single points."""

    def _point(self, out_p: Profile, in_p: Profile) -> PropElement:
        return PropElement(self.name, out_p, in_p, POINT)

    def contains(self, x: PropElement) -> bool:
        if x.owner != self.name or x.payload != POINT:
            return False
        try:
            self.check_profile_colors(x.out_profile)
            self.check_profile_colors(x.in_profile)
        except (ColorError, ArityError):
            return False
        return self._nonempty(x.out_profile, x.in_profile)

    def _nonempty(self, out_p: Profile, in_p: Profile) -> bool:
        return True

    def component(self, out_p: Sequence[Any], in_p: Sequence[Any]) -> list[PropElement]:
        out_p = self.check_profile_colors(out_p)
        in_p = self.check_profile_colors(in_p)
        if self._nonempty(out_p, in_p):
            return [self._point(out_p, in_p)]
        return []

    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement | None:
        comp = self.component(out_p, in_p)
        return comp[0] if comp else None

    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_hcomp(x, y)
        return self._point(x.out_profile + y.out_profile, x.in_profile + y.in_profile)

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_vcomp(x, y)
        return self._point(x.out_profile, y.in_profile)

    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        self._pre_biact(sigma, x, tau)
        return self._point(profile_act(sigma, x.out_profile), profile_ract(x.in_profile, tau))

    def unit_single(self, c: Any) -> PropElement:
        self.check_color(c)
        return self._point((c,), (c,))


class InitialProp(_PointedProp):
    """The 1-colored PROP with a point at (n, n) and nothing off the diagonal."""

    def __init__(self) -> None:
        self.name = "I"

    @property
    def colors(self) -> tuple[Any, ...]:
        return ("*",)

    def is_color(self, c: Any) -> bool:
        return c == "*"

    def _nonempty(self, out_p: Profile, in_p: Profile) -> bool:
        return len(out_p) == len(in_p)

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_vcomp(x, y)
        return self._point(x.out_profile, y.in_profile)


class TerminalProp(_PointedProp):
    """The terminal 1-colored PROP: every component is a single point."""

    def __init__(self) -> None:
        self.name = "T"

    @property
    def colors(self) -> tuple[Any, ...]:
        return ("*",)

    def is_color(self, c: Any) -> bool:
        return c == "*"


class TerminalColoredProp(_PointedProp):
    """Terminal object among PROPs on a fixed color set."""

    def __init__(self, colors: Sequence[str]) -> None:
        if not colors or len(set(colors)) != len(colors):
            raise ColorError("color set must be non-empty with unique identifiers")
        self._colors = tuple(sorted(colors))
        self.name = f"T[{','.join(self._colors)}]"

    @property
    def colors(self) -> tuple[Any, ...]:
        return self._colors

    def is_color(self, c: Any) -> bool:
        return c in self._colors


class EndomorphismProp(PropImpl):
    """The endomorphism PROP of a finite graded set.

    An element of the component (d; c) is the full function table of a map
    from the product of the fibers over c to the product of the fibers over
    d.  The table rows are ordered by the lexicographic order of the input
    tuples (fibers are kept sorted), which makes the payload canonical.
    """

    ENUM_CAP = 4096

    def __init__(self, graded: GradedSet, name: str | None = None) -> None:
        self.graded = graded
        for c, fib in graded.fibers:
            if not fib:
                raise ColorError(f"fiber of {c!r} is empty; endomorphism PROP needs inhabited fibers")
        self.name = name or "E[" + ";".join(f"{c}:{','.join(map(str, f))}" for c, f in graded.fibers) + "]"

    @property
    def colors(self) -> tuple[Any, ...]:
        return self.graded.colors()

    def is_color(self, c: Any) -> bool:
        return any(enc(c) == enc(col) for col in self.graded.colors())

    # ---- tables ---------------------------------------------------------
    def input_space(self, in_p: Profile) -> list[tuple[Any, ...]]:
        return list(itertools.product(*(self.graded.fiber(c) for c in in_p)))

    def output_space(self, out_p: Profile) -> list[tuple[Any, ...]]:
        return list(itertools.product(*(self.graded.fiber(c) for c in out_p)))

    def from_function(self, out_p: Sequence[Any], in_p: Sequence[Any], fn) -> PropElement:
        out_p = self.check_profile_colors(out_p)
        in_p = self.check_profile_colors(in_p)
        rows = tuple(tuple(fn(args)) for args in self.input_space(in_p))
        for row in rows:
            if len(row) != len(out_p):
                raise ArityError("function returns wrong arity")
            for v, c in zip(row, out_p):
                if v not in self.graded.fiber(c):
                    raise ColorError(f"value {v!r} not in fiber of {c!r}")
        return PropElement(self.name, out_p, in_p, ("table", rows))

    def apply(self, x: PropElement, args: tuple[Any, ...]) -> tuple[Any, ...]:
        self.check_owned(x)
        idx = self.input_space(x.in_profile).index(tuple(args))
        return x.payload[1][idx]

    def contains(self, x: PropElement) -> bool:
        if x.owner != self.name:
            return False
        try:
            self.check_profile_colors(x.in_profile)
            self.check_profile_colors(x.out_profile)
        except (ColorError, ArityError):
            return False
        if not (isinstance(x.payload, tuple) and len(x.payload) == 2 and x.payload[0] == "table"):
            return False
        rows = x.payload[1]
        if not isinstance(rows, tuple) or len(rows) != len(self.input_space(x.in_profile)):
            return False
        return all(
            len(row) == len(x.out_profile)
            and all(v in self.graded.fiber(c) for v, c in zip(row, x.out_profile))
            for row in rows
        )

    def component(self, out_p: Sequence[Any], in_p: Sequence[Any]) -> list[PropElement] | None:
        out_p = self.check_profile_colors(out_p)
        in_p = self.check_profile_colors(in_p)
        ins = self.input_space(in_p)
        outs = self.output_space(out_p)
        if len(outs) ** len(ins) > self.ENUM_CAP:
            return None
        elems = []
        for rows in itertools.product(outs, repeat=len(ins)):
            elems.append(PropElement(self.name, out_p, in_p, ("table", tuple(rows))))
        return sorted(elems, key=lambda e: e.enc)

    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement:
        out_p = self.check_profile_colors(out_p)
        in_p = self.check_profile_colors(in_p)
        outs = self.output_space(out_p)
        rows = tuple(rng.choice(outs) for _ in self.input_space(in_p))
        return PropElement(self.name, out_p, in_p, ("table", rows))

    # ---- operations -----------------------------------------------------
    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_hcomp(x, y)
        nx = len(x.in_profile)

        def fn(args: tuple[Any, ...]) -> tuple[Any, ...]:
            return tuple(self.apply(x, args[:nx])) + tuple(self.apply(y, args[nx:]))

        return self.from_function(x.out_profile + y.out_profile, x.in_profile + y.in_profile, fn)

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_vcomp(x, y)
        return self.from_function(x.out_profile, y.in_profile, lambda args: self.apply(x, self.apply(y, args)))

    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        self._pre_biact(sigma, x, tau)
        out_p = profile_act(sigma, x.out_profile)
        in_p = profile_ract(x.in_profile, tau)

        def fn(args: tuple[Any, ...]) -> tuple[Any, ...]:
            inner = tau.act(args)  # inner[j] = args[tau^-1(j)] lands in fiber of x.in_profile[j]
            return sigma.act(self.apply(x, inner))

        return self.from_function(out_p, in_p, fn)

    def unit_single(self, c: Any) -> PropElement:
        self.check_color(c)
        return self.from_function((c,), (c,), lambda args: args)


def bool_graded() -> GradedSet:
    return GradedSet.from_dict({"b": ["0", "1"]})


def endomorphism_bool() -> EndomorphismProp:
    """E_X for X the two-point set; the workhorse infinite-ish fixture."""
    return EndomorphismProp(bool_graded(), name="E[Bool]")


class TableProp(PropImpl):
    """A colored PROP given by explicit finite tables on a profile-pair window.

    ``components`` maps profile pairs to element name lists; ``vcomp_table``,
    ``hcomp_table`` and ``biact_table`` give the operations by element name.
    Missing biact entries default to the trivial action (names unchanged,
    profiles permuted), which is lawful whenever the tables are.
    Construction validates every law instance that stays inside the window
    and rejects the data with a concrete witness otherwise.
    """

    def __init__(
        self,
        name: str,
        colors: Sequence[str],
        components: dict[tuple[Profile, Profile], Sequence[str]],
        vcomp_table: dict[tuple[str, str], str] | None = None,
        hcomp_table: dict[tuple[str, str], str] | None = None,
        biact_table: dict[tuple[str, tuple[int, ...], tuple[int, ...]], str] | None = None,
        units: dict[str, str] | None = None,
        validate: bool = True,
    ) -> None:
        self.name = name
        self._colors = tuple(sorted(set(colors)))
        self._components: dict[str, tuple[Profile, Profile, tuple[str, ...]]] = {}
        for (out_p, in_p), names in components.items():
            out_p, in_p = check_profile(out_p), check_profile(in_p)
            self._components[self._key(out_p, in_p)] = (out_p, in_p, tuple(names))
        self._elem_index: dict[str, tuple[Profile, Profile]] = {}
        for out_p, in_p, names in self._components.values():
            for n in names:
                if n in self._elem_index:
                    raise PropError(f"duplicate element name {n!r} in table PROP")
                self._elem_index[n] = (out_p, in_p)
        self._vcomp = dict(vcomp_table or {})
        self._hcomp = dict(hcomp_table or {})
        self._biact = dict(biact_table or {})
        self._units = dict(units or {})
        self.unital = bool(self._units)
        if validate:
            from .lawcheck import check_prop_laws

            report = check_prop_laws(self, exhaustive=True)
            if not report.ok:
                bad = report.failures()[0]
                raise PropError(f"table PROP {name!r} violates {bad.law}: {bad.witness!r}")

    @staticmethod
    def _key(out_p: Profile, in_p: Profile) -> str:
        return enc((out_p, in_p))

    @property
    def colors(self) -> tuple[Any, ...]:
        return self._colors

    def is_color(self, c: Any) -> bool:
        return c in self._colors

    def in_window(self, out_p: Profile, in_p: Profile) -> bool:
        return self._key(out_p, in_p) in self._components

    def _mk(self, name: str) -> PropElement:
        out_p, in_p = self._elem_index[name]
        return PropElement(self.name, out_p, in_p, name)

    def elements(self) -> list[PropElement]:
        return [self._mk(n) for n in sorted(self._elem_index)]

    def contains(self, x: PropElement) -> bool:
        return (
            x.owner == self.name
            and x.payload in self._elem_index
            and self._elem_index[x.payload] == (x.out_profile, x.in_profile)
        )

    def component(self, out_p: Sequence[Any], in_p: Sequence[Any]) -> list[PropElement]:
        key = self._key(tuple(out_p), tuple(in_p))
        if key not in self._components:
            return []
        return [self._mk(n) for n in self._components[key][2]]

    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement | None:
        comp = self.component(out_p, in_p)
        return rng.choice(comp) if comp else None

    def _lookup(self, table: dict, key, out_p: Profile, in_p: Profile, op: str) -> PropElement:
        if key not in table:
            if not self.in_window(out_p, in_p):
                raise OutOfWindowError(f"{op} result component undeclared in {self.name}")
            raise CompositionError(f"{op} entry missing for {key!r} in {self.name}")
        name = table[key]
        got = self._elem_index.get(name)
        if got != (out_p, in_p):
            raise PropError(f"{op} table of {self.name} returns {name!r} with wrong profiles")
        return self._mk(name)

    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_hcomp(x, y)
        return self._lookup(
            self._hcomp, (x.payload, y.payload), x.out_profile + y.out_profile, x.in_profile + y.in_profile, "hcomp"
        )

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_vcomp(x, y)
        return self._lookup(self._vcomp, (x.payload, y.payload), x.out_profile, y.in_profile, "vcomp")

    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        self._pre_biact(sigma, x, tau)
        out_p = profile_act(sigma, x.out_profile)
        in_p = profile_ract(x.in_profile, tau)
        key = (x.payload, sigma.images, tau.images)
        if key in self._biact:
            return self._lookup(self._biact, key, out_p, in_p, "biact")
        # trivial action by default
        if not self.in_window(out_p, in_p):
            raise OutOfWindowError(f"biact result component undeclared in {self.name}")
        if x.payload not in {n for n in self._components[self._key(out_p, in_p)][2]}:
            raise PropError(f"trivial biact leaves {x.payload!r} outside target component")
        return PropElement(self.name, out_p, in_p, x.payload)

    def unit_single(self, c: Any) -> PropElement:
        self.check_color(c)
        if c not in self._units:
            raise PropError(f"{self.name} has no declared unit at color {c!r}")
        return self._mk(self._units[c])


def make_builtin(kind: str, params: dict | None = None) -> PropImpl:
    """Construct a built-in PROP; table data is validated exhaustively at load."""
    params = dict(params or {})
    if kind == "initial":
        return InitialProp()
    if kind == "terminal":
        return TerminalProp()
    if kind == "terminal_colored":
        return TerminalColoredProp(params["colors"])
    if kind == "endomorphism":
        graded = GradedSet.from_dict(params["fibers"])
        return EndomorphismProp(graded, name=params.get("name"))
    if kind == "table":
        return TableProp(
            params.get("name", "table"),
            params["colors"],
            params["components"],
            params.get("vcomp"),
            params.get("hcomp"),
            params.get("biact"),
            params.get("units"),
        )
    raise PropError(f"unknown builtin kind {kind!r}")
