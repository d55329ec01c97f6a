"""Colored operads and the free-PROP / forgetful adjunction.

An element of the PROP generated by an operad is an equivalence class of
one-layer expressions ``sigma . (o_1 (x) ... (x) o_m) . tau``: a tuple of
operad factors (one output each), an output permutation, and an input
permutation.  Two expressions denote the same element exactly when they are
related by factor-permutation moves (reorder the tensor factors, twisting
sigma and tau by the induced block permutations) and absorption moves (slide
a per-factor input permutation out of a factor into tau).  Equality is
decided by exhaustive closure of this finite orbit; orbits larger than
``state_cap`` are a hard error.
"""

from __future__ import annotations

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from ._canon import canon, enc
from .core import (
    ArityError,
    ColorError,
    CompositionError,
    PropElement,
    PropError,
    PropImpl,
    Profile,
    Report,
    check_profile,
    profile_act,
    profile_ract,
)
from .perms import Perm, block_perm, block_sum


@dataclass(frozen=True)
class OperadElement:
    """An operad element: one output color, a profile of input colors."""

    owner: str
    out_color: Any
    in_profile: Profile
    payload: Any

    def canon_tree(self) -> Any:
        return ("op", self.owner, canon(self.out_color), canon(self.in_profile), canon(self.payload))

    @property
    def arity(self) -> int:
        return len(self.in_profile)


class ColoredOperad(ABC):
    name: str
    unital: bool = True
    arity_cap: int = 4

    @property
    @abstractmethod
    def colors(self) -> tuple[Any, ...]:
        ...

    def is_color(self, c: Any) -> bool:
        return c in self.colors

    @abstractmethod
    def component(self, d: Any, c_profile: Profile) -> list[OperadElement]:
        ...

    @abstractmethod
    def rho(self, o: OperadElement, operands: Sequence[OperadElement]) -> OperadElement:
        """Simultaneous composition: plug operand i into input i of o."""

    @abstractmethod
    def ract(self, o: OperadElement, tau: Perm) -> OperadElement:
        ...

    def unit(self, c: Any) -> OperadElement:
        raise PropError(f"{self.name} is not unital")

    def sample(self, d: Any, c_profile: Profile, rng: random.Random) -> OperadElement | None:
        comp = self.component(d, c_profile)
        return rng.choice(comp) if comp else None

    def _pre_rho(self, o: OperadElement, operands: Sequence[OperadElement]) -> None:
        if len(operands) != o.arity:
            raise ArityError(f"rho of {self.name}: arity mismatch")
        for g, c in zip(operands, o.in_profile):
            if enc(g.out_color) != enc(c):
                raise CompositionError(f"rho of {self.name}: output color {g.out_color!r} does not match input {c!r}")


class TerminalOperad(ColoredOperad):
    """One point at every (d; c-profile); arity bounded by arity_cap."""

    def __init__(self, colors: Sequence[str] = ("*",), arity_cap: int = 4):
        self._colors = tuple(sorted(colors))
        self.arity_cap = arity_cap
        self.name = f"T_op[{','.join(self._colors)}]"

    @property
    def colors(self) -> tuple[Any, ...]:
        return self._colors

    def _pt(self, d: Any, c_profile: Profile) -> OperadElement:
        return OperadElement(self.name, d, c_profile, "pt")

    def component(self, d: Any, c_profile: Profile) -> list[OperadElement]:
        c_profile = check_profile(c_profile)
        if len(c_profile) > self.arity_cap:
            return []
        return [self._pt(d, c_profile)]

    def rho(self, o: OperadElement, operands: Sequence[OperadElement]) -> OperadElement:
        self._pre_rho(o, operands)
        prof = tuple(c for g in operands for c in g.in_profile)
        return self._pt(o.out_color, prof)

    def ract(self, o: OperadElement, tau: Perm) -> OperadElement:
        return self._pt(o.out_color, profile_ract(o.in_profile, tau))

    def unit(self, c: Any) -> OperadElement:
        return self._pt(c, (c,))


class UnitOperad(ColoredOperad):
    """Only the unit at each color: the operad whose algebras are plain graded sets."""

    def __init__(self, colors: Sequence[str] = ("*",)):
        self._colors = tuple(sorted(colors))
        self.name = f"I_op[{','.join(self._colors)}]"

    @property
    def colors(self) -> tuple[Any, ...]:
        return self._colors

    def component(self, d: Any, c_profile: Profile) -> list[OperadElement]:
        c_profile = check_profile(c_profile)
        if c_profile == (d,):
            return [OperadElement(self.name, d, (d,), "unit")]
        return []

    def rho(self, o: OperadElement, operands: Sequence[OperadElement]) -> OperadElement:
        self._pre_rho(o, operands)
        return operands[0]

    def ract(self, o: OperadElement, tau: Perm) -> OperadElement:
        if len(tau) != 1:
            raise ArityError("unit operad elements have arity 1")
        return o

    def unit(self, c: Any) -> OperadElement:
        self.is_color(c) or self._bad(c)
        return OperadElement(self.name, c, (c,), "unit")

    def _bad(self, c):
        raise ColorError(f"{c!r} is not a color of {self.name}")


class AssociativeOperad(ColoredOperad):
    """The 1-colored operad with As(n) = all permutations of n letters."""

    def __init__(self, arity_cap: int = 3):
        self.arity_cap = arity_cap
        self.name = "As"

    @property
    def colors(self) -> tuple[Any, ...]:
        return ("*",)

    def _mk(self, p: Perm) -> OperadElement:
        return OperadElement(self.name, "*", ("*",) * len(p), p.images)

    def component(self, d: Any, c_profile: Profile) -> list[OperadElement]:
        c_profile = check_profile(c_profile)
        if len(c_profile) > self.arity_cap:
            return []
        return [self._mk(p) for p in Perm.all_perms(len(c_profile))]

    def rho(self, o: OperadElement, operands: Sequence[OperadElement]) -> OperadElement:
        self._pre_rho(o, operands)
        f = Perm(o.payload)
        sizes = [g.arity for g in operands]
        inner = block_sum(*(Perm(g.payload) for g in operands))
        return self._mk(block_perm(f, sizes).compose(inner))

    def ract(self, o: OperadElement, tau: Perm) -> OperadElement:
        return self._mk(Perm(o.payload).compose(tau))

    def unit(self, c: Any) -> OperadElement:
        return self._mk(Perm.identity(1))


class TableOperad(ColoredOperad):
    """A colored operad given by explicit finite tables on an arity window.

    ``rho_table`` maps (name, operand-name tuple) to a result name; missing
    entries outside the declared components raise.  ``ract_table`` defaults
    to the trivial action.  Laws are checked exhaustively at construction.
    """

    def __init__(
        self,
        name: str,
        colors: Sequence[str],
        components: dict[tuple[Any, Profile], Sequence[str]],
        rho_table: dict[tuple[str, tuple[str, ...]], str],
        ract_table: dict[tuple[str, tuple[int, ...]], str] | None = None,
        units: dict[str, str] | None = None,
        validate: bool = True,
    ) -> None:
        self.name = name
        self._colors = tuple(sorted(set(colors)))
        self._components: dict[str, tuple[Any, Profile, tuple[str, ...]]] = {}
        self._index: dict[str, tuple[Any, Profile]] = {}
        for (d, c_profile), names in components.items():
            c_profile = check_profile(c_profile)
            self._components[enc((d, c_profile))] = (d, c_profile, tuple(names))
            for nm in names:
                if nm in self._index:
                    raise PropError(f"duplicate operad element name {nm!r}")
                self._index[nm] = (d, c_profile)
        self._rho = dict(rho_table)
        self._ract = dict(ract_table or {})
        self._units = dict(units or {})
        self.unital = bool(self._units)
        self.arity_cap = max((len(c) for (_d, c, _n) in self._components.values()), default=1)
        if validate:
            report = check_operad_laws(self, exhaustive=True, max_arity=self.arity_cap)
            if not report.ok:
                bad = report.failures()[0]
                raise PropError(f"table operad {name!r} violates {bad.law}: {bad.witness!r}")

    @property
    def colors(self) -> tuple[Any, ...]:
        return self._colors

    def _mk(self, nm: str) -> OperadElement:
        d, c_profile = self._index[nm]
        return OperadElement(self.name, d, c_profile, nm)

    def element(self, nm: str) -> OperadElement:
        return self._mk(nm)

    def component(self, d: Any, c_profile: Profile) -> list[OperadElement]:
        got = self._components.get(enc((d, check_profile(c_profile))))
        return [self._mk(nm) for nm in got[2]] if got else []

    def rho(self, o: OperadElement, operands: Sequence[OperadElement]) -> OperadElement:
        self._pre_rho(o, operands)
        key = (o.payload, tuple(g.payload for g in operands))
        if key not in self._rho:
            raise PropError(f"rho entry missing for {key!r} in {self.name}")
        return self._mk(self._rho[key])

    def ract(self, o: OperadElement, tau: Perm) -> OperadElement:
        if len(tau) != o.arity:
            raise ArityError("operad action size mismatch")
        key = (o.payload, tau.images)
        new_profile = profile_ract(o.in_profile, tau)
        if key in self._ract:
            nm = self._ract[key]
        else:
            nm = o.payload  # trivial action
        if self._index.get(nm) != (o.out_color, new_profile):
            raise PropError(f"action of {self.name} leaves {nm!r} outside its component")
        return self._mk(nm)

    def unit(self, c: Any) -> OperadElement:
        if c not in self._units:
            raise PropError(f"{self.name} has no unit at color {c!r}")
        return self._mk(self._units[c])


def check_operad_laws(
    operad: ColoredOperad,
    seed: int = 0,
    samples: int = 100,
    exhaustive: bool = False,
    max_arity: int = 3,
) -> Report:
    """Associativity, right-equivariance, and unit laws of the composition."""
    rng = random.Random(seed)
    report = Report(subject=f"operad-laws:{operad.name}")
    colors = operad.colors

    def profiles(k_max: int) -> list[Profile]:
        out = []
        for k in range(1, k_max + 1):
            out.extend(itertools.product(colors, repeat=k))
        return out

    def all_elements(k_max: int) -> list[OperadElement]:
        out = []
        for d in colors:
            for p in profiles(k_max):
                out.extend(operad.component(d, p))
        return out

    if exhaustive:
        elems = all_elements(max_arity)
    else:
        elems = []
        for _ in range(samples):
            d = rng.choice(list(colors))
            p = tuple(rng.choice(list(colors)) for _ in range(rng.randint(1, max_arity)))
            o = operad.sample(d, p, rng)
            if o is not None:
                elems.append(o)

    def operands_for(o: OperadElement, max_inner: int) -> list[tuple[OperadElement, ...]] | None:
        choices = []
        for c in o.in_profile:
            opts = []
            for p in profiles(max_inner):
                opts.extend(operad.component(c, p))
            if not opts:
                return None
            choices.append(opts if exhaustive else [rng.choice(opts)])
        return list(itertools.product(*choices))

    # associativity
    tested, witness = 0, None
    for f in elems[: samples if not exhaustive else None]:
        tuples = operands_for(f, 2) or []
        for gs in tuples[:8]:
            hs_per_g = [operands_for(g, 1) or [] for g in gs]
            if any(not h for h in hs_per_g):
                continue
            hss = [h[0] for h in hs_per_g]
            flat = tuple(h for hs in hss for h in hs)
            lhs = operad.rho(operad.rho(f, gs), flat)
            rhs = operad.rho(f, tuple(operad.rho(g, hs) for g, hs in zip(gs, hss)))
            tested += 1
            if enc(lhs) != enc(rhs):
                witness = (f, gs, flat)
                break
        if witness:
            break
    report.add("rho-associativity", witness is None, witness, tested)

    # right equivariance: rho(f.tau; h) = rho(f; tau.act(h)) . block_perm(tau, sizes(h))
    tested, witness = 0, None
    for f in elems[: samples if not exhaustive else None]:
        tuples = operands_for(f, 2) or []
        for gs in tuples[:4]:
            for tau in (Perm.all_perms(f.arity) if exhaustive and f.arity <= 3 else [Perm.random(f.arity, rng)]):
                hs = tau.inverse().act(gs)  # typed by ract(in(f), tau); tau.act(hs) == gs
                ft = operad.ract(f, tau)
                try:
                    lhs = operad.rho(ft, hs)
                except CompositionError:
                    witness = (f, gs, tau, "ill-typed")
                    break
                sizes = [h.arity for h in hs]
                rhs = operad.ract(operad.rho(f, gs), block_perm(tau, sizes))
                tested += 1
                if enc(lhs) != enc(rhs):
                    witness = (f, gs, tau)
                    break
            if witness:
                break
        if witness:
            break
    report.add("rho-right-equivariance", witness is None, witness, tested)

    if operad.unital:
        tested, witness = 0, None
        for f in elems:
            units = tuple(operad.unit(c) for c in f.in_profile)
            ok = enc(operad.rho(f, units)) == enc(f)
            ud = operad.unit(f.out_color)
            ok = ok and enc(operad.rho(ud, (f,))) == enc(f)
            tested += 1
            if not ok:
                witness = f
                break
        report.add("rho-units", witness is None, witness, tested)

    return report


# ---------------------------------------------------------------------------
# Free PROP on an operad
# ---------------------------------------------------------------------------

class OperadProp(PropImpl):
    """The PROP generated by a colored operad, with mechanical quotient."""

    def __init__(self, operad: ColoredOperad, state_cap: int = 100_000):
        self.operad = operad
        self.state_cap = state_cap
        self.name = f"prop({operad.name})"
        self.unital = operad.unital
        self._make_cache: dict[str, PropElement] = {}
        self._component_cache: dict[str, list[PropElement]] = {}

    @property
    def colors(self) -> tuple[Any, ...]:
        return self.operad.colors

    def is_color(self, c: Any) -> bool:
        return self.operad.is_color(c)

    # ---- representation -------------------------------------------------
    # payload: ("layer", factors, tau_images) in normal form: factor i feeds
    # output position i (the output permutation is absorbed into the factor
    # order), and inside each factor the consumed input positions are sorted
    # ascending (the per-factor absorption freedom is spent on that sort).
    # Every move orbit contains exactly one such expression; orbit_closure
    # below re-derives the quotient exhaustively and is used as a test oracle.

    @staticmethod
    def _factor_tuple(o: OperadElement) -> tuple:
        return (canon(o.out_color), canon(o.in_profile), canon(o.payload))

    def _factor_elem(self, t: tuple) -> OperadElement:
        return OperadElement(self.operad.name, t[0], t[1], t[2])

    def _normal_form(self, factors: tuple[OperadElement, ...], sigma: Perm, tau: Perm) -> tuple:
        sizes = tuple(f.arity for f in factors)
        # move factor i to output slot sigma(i); the output permutation becomes the identity
        new_factors = sigma.act(factors)
        tau_base = block_perm(sigma, sizes).compose(tau)
        new_sizes = sigma.act(sizes)
        offsets = []
        acc = 0
        for s in new_sizes:
            offsets.append(acc)
            acc += s
        n = acc
        # positions feeding block i, in ascending order
        feeders: list[list[int]] = [[] for _ in new_factors]
        block_of = [0] * n
        for i, (off, s) in enumerate(zip(offsets, new_sizes)):
            for j in range(s):
                block_of[off + j] = i
        for p in range(n):
            feeders[block_of[tau_base(p)]].append(p)
        final_factors = []
        tau_images = [0] * n
        for i, f in enumerate(new_factors):
            ps = feeders[i]
            rho = Perm(tuple(tau_base(p) - offsets[i] for p in ps))
            final_factors.append(self.operad.ract(f, rho))
            for k, p in enumerate(ps):
                tau_images[p] = offsets[i] + k
        return ("layer", tuple(self._factor_tuple(f) for f in final_factors), tuple(tau_images))

    def make(self, factors: Sequence[OperadElement], sigma: Perm, tau: Perm) -> PropElement:
        factors = tuple(factors)
        if not factors:
            raise ArityError("layer needs at least one factor")
        key = enc((tuple(self._factor_tuple(f) for f in factors), sigma.images, tau.images))
        cached = self._make_cache.get(key)
        if cached is not None:
            return cached
        out_p = profile_act(sigma, tuple(f.out_color for f in factors))
        in_p = profile_ract(tuple(c for f in factors for c in f.in_profile), tau)
        payload = self._normal_form(factors, sigma, tau)
        result = PropElement(self.name, out_p, in_p, payload)
        self._make_cache[key] = result
        return result

    def orbit_closure(self, factors: Sequence[OperadElement], sigma: Perm, tau: Perm) -> set[str]:
        """All raw expressions reachable by factor-permutation/absorption moves.

        Exhaustive; raises when the orbit exceeds ``state_cap``.  Test oracle
        for the normal form, independent of it.
        """
        factors = tuple(factors)
        sizes = tuple(f.arity for f in factors)
        orbit_size = _factorial(len(factors))
        for s in sizes:
            orbit_size *= _factorial(s)
        if self.state_cap and orbit_size > self.state_cap:
            raise PropError(f"orbit of size {orbit_size} exceeds state cap {self.state_cap} in {self.name}")
        states: set[str] = set()
        for zeta in Perm.all_perms(len(factors)):
            new_factors = zeta.act(factors)
            new_sigma = sigma.compose(zeta.inverse())
            tau_base = block_perm(zeta, sizes).compose(tau)
            for rhos in itertools.product(*(Perm.all_perms(f.arity) for f in new_factors)):
                absorbed = tuple(self.operad.ract(f, r) for f, r in zip(new_factors, rhos))
                t2 = block_sum(*rhos).inverse().compose(tau_base)
                states.add(
                    enc((tuple(self._factor_tuple(f) for f in absorbed), new_sigma.images, t2.images))
                )
        return states

    def _parts(self, x: PropElement) -> tuple[tuple[OperadElement, ...], Perm, Perm]:
        _, factors, tau = x.payload
        return (
            tuple(self._factor_elem(f) for f in factors),
            Perm.identity(len(factors)),
            Perm(tuple(tau)),
        )

    def contains(self, x: PropElement) -> bool:
        if x.owner != self.name:
            return False
        try:
            factors, sigma, tau = self._parts(x)
            return self.make(factors, sigma, tau) == x
        except (PropError, ValueError, IndexError, TypeError):
            return False

    # ---- operations -----------------------------------------------------
    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_hcomp(x, y)
        fx, sx, tx = self._parts(x)
        fy, sy, ty = self._parts(y)
        return self.make(fx + fy, block_sum(sx, sy), block_sum(tx, ty))

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_vcomp(x, y)
        fx, sx, tx = self._parts(x)
        fy, sy, ty = self._parts(y)
        pi = tx.compose(sy)
        # slot k of the upper layer consumes the lower factor pi^-1(k)
        pi_inv = pi.inverse()
        offsets = []
        acc = 0
        for g in fy:
            offsets.append(acc)
            acc += g.arity
        new_factors: list[OperadElement] = []
        consumed_order: list[int] = []  # lower-factor index per upper slot, in slot order
        k = 0
        for f in fx:
            operands = []
            for _ in range(f.arity):
                j = pi_inv(k)
                operands.append(fy[j])
                consumed_order.append(j)
                k += 1
            new_factors.append(self.operad.rho(f, operands))
        # L maps new concatenated input positions to y's concatenated positions
        L: list[int] = []
        for j in consumed_order:
            L.extend(range(offsets[j], offsets[j] + fy[j].arity))
        phi = Perm(tuple(L)).inverse()
        return self.make(tuple(new_factors), sx, phi.compose(ty))

    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        self._pre_biact(sigma, x, tau)
        fx, sx, tx = self._parts(x)
        return self.make(fx, sigma.compose(sx), tx.compose(tau))

    def unit_single(self, c: Any) -> PropElement:
        self.check_color(c)
        return self.make((self.operad.unit(c),), Perm.identity(1), Perm.identity(1))

    # ---- enumeration ------------------------------------------------------
    def component(self, out_p: Sequence[Any], in_p: Sequence[Any]) -> list[PropElement]:
        out_p = self.check_profile_colors(out_p)
        in_p = self.check_profile_colors(in_p)
        cache_key = enc((out_p, in_p))
        if cache_key in self._component_cache:
            return list(self._component_cache[cache_key])
        m, n = len(out_p), len(in_p)
        seen: dict[str, PropElement] = {}
        for sigma in Perm.all_perms(m):
            es = sigma.inverse().act(out_p)
            for tau in Perm.all_perms(n):
                concat = tau.act(in_p)
                for sizes in compositions(n, m):
                    blocks = []
                    pos = 0
                    for s in sizes:
                        blocks.append(concat[pos : pos + s])
                        pos += s
                    factor_choices = [self.operad.component(es[i], blocks[i]) for i in range(m)]
                    if any(not fc for fc in factor_choices):
                        continue
                    for factors in itertools.product(*factor_choices):
                        e = self.make(factors, sigma, tau)
                        seen.setdefault(e.enc, e)
        result = sorted(seen.values(), key=lambda e: e.enc)
        self._component_cache[cache_key] = result
        return list(result)

    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement | None:
        out_p = self.check_profile_colors(out_p)
        in_p = self.check_profile_colors(in_p)
        m, n = len(out_p), len(in_p)
        if m > n:
            return None
        for _ in range(20):
            sigma = Perm.random(m, rng)
            tau = Perm.random(n, rng)
            es = sigma.inverse().act(out_p)
            concat = tau.act(in_p)
            sizes = rng.choice(list(compositions(n, m)))
            blocks = []
            pos = 0
            for s in sizes:
                blocks.append(concat[pos : pos + s])
                pos += s
            factors = []
            for i in range(m):
                o = self.operad.sample(es[i], blocks[i], rng)
                if o is None:
                    break
                factors.append(o)
            else:
                return self.make(factors, sigma, tau)
        return None


def compositions(n: int, m: int) -> list[tuple[int, ...]]:
    """All ways to write n as an ordered sum of m positive integers."""
    if m == 1:
        return [(n,)] if n >= 1 else []
    out = []
    for first in range(1, n - m + 2):
        for rest in compositions(n - first, m - 1):
            out.append((first,) + rest)
    return out


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def operad_to_prop(operad: ColoredOperad, state_cap: int = 100_000) -> OperadProp:
    """The PROP generated by an operad; see the module docstring for the quotient."""
    return OperadProp(operad, state_cap)


class OperadView(ColoredOperad):
    """The underlying operad U(P) of a PROP: single-output components of P."""

    def __init__(self, prop: PropImpl):
        self.prop = prop
        self.name = f"U({prop.name})"
        self.unital = prop.unital

    @property
    def colors(self) -> tuple[Any, ...]:
        cs = self.prop.colors
        if cs is None:
            raise PropError(f"{self.prop.name} has no enumerable colors")
        return cs

    def _wrap(self, x: PropElement) -> OperadElement:
        return OperadElement(self.name, x.out_profile[0], x.in_profile, x.payload)

    def _unwrap(self, o: OperadElement) -> PropElement:
        return PropElement(self.prop.name, (o.out_color,), o.in_profile, o.payload)

    def component(self, d: Any, c_profile: Profile) -> list[OperadElement]:
        comp = self.prop.component((d,), check_profile(c_profile))
        if comp is None:
            raise PropError(f"component of {self.prop.name} not enumerable")
        return [self._wrap(x) for x in comp]

    def rho(self, o: OperadElement, operands: Sequence[OperadElement]) -> OperadElement:
        self._pre_rho(o, operands)
        from functools import reduce

        tensor = reduce(self.prop.hcomp, (self._unwrap(g) for g in operands))
        return self._wrap(self.prop.vcomp(self._unwrap(o), tensor))

    def ract(self, o: OperadElement, tau: Perm) -> OperadElement:
        return self._wrap(self.prop.biact(Perm.identity(1), self._unwrap(o), tau))

    def unit(self, c: Any) -> OperadElement:
        return self._wrap(self.prop.unit_single(c))

    def sample(self, d: Any, c_profile: Profile, rng: random.Random) -> OperadElement | None:
        x = self.prop.sample_element((d,), check_profile(c_profile), rng)
        return self._wrap(x) if x is not None else None


def prop_to_operad(prop: PropImpl) -> OperadView:
    """Forget the multi-output components of a PROP."""
    return OperadView(prop)
