"""Verification of PROP, algebra, and PROP-map laws.

Checks are report-based: violations are returned as data with a concrete
witness, never raised.  Finite windows are checked exhaustively (subject to
instance caps); everything else is checked on seeded samples.  Instances
that leave a finite window are skipped, not failed.
"""

from __future__ import annotations

import itertools
import random
from typing import Any, Callable, Iterable, Sequence

from ._canon import enc
from .core import (
    CompositionError,
    OutOfWindowError,
    PropAlgebra,
    PropElement,
    PropError,
    PropImpl,
    PropMap,
    Profile,
    Report,
)
from .perms import Perm, block_sum

_SKIP = (OutOfWindowError,)


class Sampler:
    """Yields law-check instances for a PROP whose colors are enumerable."""

    def __init__(self, prop: PropImpl, max_arity: int = 3):
        self.prop = prop
        self.max_arity = max_arity

    def _random_profile(self, rng: random.Random) -> Profile:
        return self.prop.sample_profile(rng, self.max_arity)

    def element(self, rng: random.Random) -> PropElement | None:
        for _ in range(20):
            try:
                x = self.prop.sample_element(self._random_profile(rng), self._random_profile(rng), rng)
            except _SKIP:
                continue
            if x is not None:
                return x
        return None

    def element_with_out(self, out_p: Profile, rng: random.Random) -> PropElement | None:
        for _ in range(20):
            try:
                x = self.prop.sample_element(out_p, self._random_profile(rng), rng)
            except _SKIP:
                continue
            if x is not None:
                return x
        return None

    def elements(self, rng: random.Random, n: int) -> list[PropElement]:
        out = []
        for _ in range(n):
            x = self.element(rng)
            if x is not None:
                out.append(x)
        return out

    def vcomp_chain(self, rng: random.Random, length: int) -> tuple[PropElement, ...] | None:
        chain: list[PropElement] = []
        x = self.element(rng)
        if x is None:
            return None
        chain.append(x)
        for _ in range(length - 1):
            y = self.element_with_out(chain[-1].in_profile, rng)
            if y is None:
                return None
            chain.append(y)
        return tuple(chain)

    def vcomp_pairs(self, rng: random.Random, n: int) -> list[tuple[PropElement, PropElement]]:
        out = []
        for _ in range(n):
            c = self.vcomp_chain(rng, 2)
            if c:
                out.append(c)
        return out

    def vcomp_triples(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        out = []
        for _ in range(n):
            c = self.vcomp_chain(rng, 3)
            if c:
                out.append(c)
        return out

    def interchange_quads(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        out = []
        for _ in range(n):
            a = self.vcomp_chain(rng, 2)
            b = self.vcomp_chain(rng, 2)
            if a and b:
                out.append((a[0], a[1], b[0], b[1]))
        return out


class ExhaustiveSampler(Sampler):
    """Enumerates all instances over a finite window of components.

    Instance lists above ``cap`` are thinned deterministically (fixed stride),
    keeping runs bounded while still sweeping the window.
    """

    def __init__(self, prop: PropImpl, max_arity: int = 3, cap: int = 3000):
        super().__init__(prop, max_arity)
        self.cap = cap
        self._all_elements: list[PropElement] | None = None

    def _profiles(self) -> list[Profile]:
        colors = self.prop.colors
        if colors is None:
            raise PropError(f"{self.prop.name} has no enumerable colors; use sampling")
        profs: list[Profile] = []
        for k in range(1, self.max_arity + 1):
            profs.extend(itertools.product(colors, repeat=k))
        return profs

    def all_elements(self) -> list[PropElement]:
        if self._all_elements is not None:
            return self._all_elements
        comp = getattr(self.prop, "elements", None)
        if callable(comp):
            # declared-window enumeration (finite tables)
            out = list(comp())
        else:
            out = []
            for op in self._profiles():
                for ip in self._profiles():
                    elems = self.prop.component(op, ip)
                    if elems is None:
                        raise PropError(f"component of {self.prop.name} not enumerable")
                    out.extend(elems)
            out = sorted(out, key=lambda e: e.enc)
        self._all_elements = out
        return out

    def elements(self, rng: random.Random, n: int) -> list[PropElement]:
        return self.all_elements()

    def _capped(self, items: list) -> list:
        if len(items) <= self.cap:
            return items
        stride = max(1, len(items) // self.cap)
        return items[::stride][: self.cap]

    def vcomp_pairs(self, rng: random.Random, n: int) -> list[tuple[PropElement, PropElement]]:
        elems = self.all_elements()
        by_out: dict[str, list[PropElement]] = {}
        for e in elems:
            by_out.setdefault(enc(e.out_profile), []).append(e)
        pairs = [(x, y) for x in elems for y in by_out.get(enc(x.in_profile), [])]
        return self._capped(pairs)

    def vcomp_triples(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        pairs = self.vcomp_pairs(rng, n)
        by_out: dict[str, list[PropElement]] = {}
        for e in self.all_elements():
            by_out.setdefault(enc(e.out_profile), []).append(e)
        triples = [(x, y, z) for (x, y) in pairs for z in by_out.get(enc(y.in_profile), [])]
        return self._capped(triples)

    def interchange_quads(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        pairs = self.vcomp_pairs(rng, n)
        quads = [(x1, x2, y1, y2) for (x1, x2) in pairs for (y1, y2) in pairs]
        return self._capped(quads)


def _perms_for(k: int, rng: random.Random, exhaustive: bool) -> list[Perm]:
    if exhaustive and k <= 4:
        return list(Perm.all_perms(k))
    ps = [Perm.identity(k)]
    ps.extend(Perm.random(k, rng) for _ in range(2))
    return ps


def check_prop_laws(
    prop: PropImpl,
    sampler: Sampler | None = None,
    seed: int = 0,
    samples: int = 200,
    exhaustive: bool = False,
    max_arity: int = 3,
) -> Report:
    """Check bi-equivariance, associativity, interchange, and unit laws.

    Returns a report with one entry per law; failures carry a witness tuple.
    """
    rng = random.Random(seed)
    if sampler is None:
        sampler = ExhaustiveSampler(prop, max_arity) if exhaustive else Sampler(prop, max_arity)
    report = Report(subject=f"prop-laws:{prop.name}")

    def run(law: str, instances: Iterable, fn: Callable[..., bool]) -> None:
        tested = 0
        witness = None
        for inst in instances:
            try:
                ok = fn(*inst)
            except _SKIP:
                continue
            tested += 1
            if not ok:
                witness = inst
                break
        report.add(law, witness is None, witness, tested)

    elems = sampler.elements(rng, samples)
    pairs = sampler.vcomp_pairs(rng, samples)
    triples = sampler.vcomp_triples(rng, samples)
    quads = sampler.interchange_quads(rng, samples)

    # biact identity and functoriality
    def biact_identity(x: PropElement) -> bool:
        m, n = x.arity
        return prop.biact(Perm.identity(m), x, Perm.identity(n)) == x

    run("biact-identity", [(x,) for x in elems], biact_identity)

    biact_insts = []
    for x in elems:
        m, n = x.arity
        for s1 in _perms_for(m, rng, exhaustive):
            for t1 in _perms_for(n, rng, exhaustive):
                for s2 in _perms_for(m, rng, exhaustive):
                    for t2 in _perms_for(n, rng, exhaustive):
                        biact_insts.append((x, s1, t1, s2, t2))
    cap = getattr(sampler, "cap", None) if exhaustive else 4 * samples
    if cap and len(biact_insts) > cap:
        stride = max(1, len(biact_insts) // cap)
        biact_insts = biact_insts[::stride][:cap]

    def biact_functorial(x, s1, t1, s2, t2) -> bool:
        lhs = prop.biact(s2.compose(s1), x, t1.compose(t2))
        rhs = prop.biact(s2, prop.biact(s1, x, t1), t2)
        return lhs == rhs

    run("biact-functoriality", biact_insts, biact_functorial)

    def biact_split(x, s1, t1, s2, t2) -> bool:
        both = prop.biact(s1, x, t1)
        left_then_right = prop.biact(Perm.identity(len(s1)), prop.biact(s1, x, Perm.identity(len(t1))), t1)
        right_then_left = prop.biact(s1, prop.biact(Perm.identity(len(s1)), x, t1), Perm.identity(len(t1)))
        return both == left_then_right == right_then_left

    run("biact-decomposition", biact_insts, biact_split)

    run("vcomp-associativity", triples, lambda x, y, z: prop.vcomp(prop.vcomp(x, y), z) == prop.vcomp(x, prop.vcomp(y, z)))

    def vcomp_equivariant(x, y) -> bool:
        m, n = len(x.out_profile), len(y.in_profile)
        k = len(x.in_profile)
        s, mu = Perm.random(m, rng), Perm.random(n, rng)
        t = Perm.random(k, rng)
        outer = prop.vcomp(prop.biact(s, x, Perm.identity(k)), prop.biact(Perm.identity(k), y, mu))
        if outer != prop.biact(s, prop.vcomp(x, y), mu):
            return False
        cancel = prop.vcomp(prop.biact(Perm.identity(m), x, t.inverse()), prop.biact(t, y, Perm.identity(n)))
        return cancel == prop.vcomp(x, y)

    run("vcomp-bi-equivariance", pairs, vcomp_equivariant)

    hpairs = [(x, y) for x in elems for y in elems][: max(len(elems), samples)]
    htriples = [(x, y, z) for x in elems[:12] for y in elems[:12] for z in elems[:12]]
    if len(htriples) > 2 * samples and not exhaustive:
        htriples = htriples[: 2 * samples]

    run(
        "hcomp-associativity",
        htriples,
        lambda x, y, z: prop.hcomp(prop.hcomp(x, y), z) == prop.hcomp(x, prop.hcomp(y, z)),
    )

    def hcomp_equivariant(x, y) -> bool:
        m1, n1 = x.arity
        m2, n2 = y.arity
        s1, t1 = Perm.random(m1, rng), Perm.random(n1, rng)
        s2, t2 = Perm.random(m2, rng), Perm.random(n2, rng)
        lhs = prop.hcomp(prop.biact(s1, x, t1), prop.biact(s2, y, t2))
        rhs = prop.biact(block_sum(s1, s2), prop.hcomp(x, y), block_sum(t1, t2))
        return lhs == rhs

    run("hcomp-bi-equivariance", hpairs, hcomp_equivariant)

    run(
        "interchange",
        quads,
        lambda x1, x2, y1, y2: prop.hcomp(prop.vcomp(x1, x2), prop.vcomp(y1, y2))
        == prop.vcomp(prop.hcomp(x1, y1), prop.hcomp(x2, y2)),
    )

    if prop.unital:

        def unit_law(x: PropElement) -> bool:
            left = prop.vcomp(prop.unit(x.out_profile), x)
            right = prop.vcomp(x, prop.unit(x.in_profile))
            return left == x and right == x

        run("unit", [(x,) for x in elems], unit_law)

    return report


# ---------------------------------------------------------------------------
# Algebra laws
# ---------------------------------------------------------------------------

def _arg_tuples(algebra: PropAlgebra, in_p: Profile) -> list[tuple]:
    return list(itertools.product(*(algebra.carrier.fiber(c) for c in in_p)))


def check_algebra_laws(
    algebra: PropAlgebra,
    sampler: Sampler | None = None,
    seed: int = 0,
    samples: int = 100,
    exhaustive: bool = False,
    max_arity: int = 3,
    arg_cap: int = 64,
) -> Report:
    """Check that an algebra's structure maps respect the PROP operations."""
    prop = algebra.prop
    rng = random.Random(seed)
    if sampler is None:
        sampler = ExhaustiveSampler(prop, max_arity) if exhaustive else Sampler(prop, max_arity)
    report = Report(subject=f"algebra-laws:{algebra.name}")

    def args_for(in_p: Profile) -> list[tuple]:
        tuples = _arg_tuples(algebra, in_p)
        return tuples[:arg_cap]

    def run(law: str, instances, fn) -> None:
        tested = 0
        witness = None
        for inst in instances:
            try:
                ok = fn(*inst)
            except _SKIP:
                continue
            tested += 1
            if not ok:
                witness = inst
                break
        report.add(law, witness is None, witness, tested)

    pairs = sampler.vcomp_pairs(rng, samples)
    elems = sampler.elements(rng, samples)

    def vcomp_compat(x, y) -> bool:
        xy = prop.vcomp(x, y)
        return all(
            algebra.apply(xy, args) == algebra.apply(x, algebra.apply(y, args)) for args in args_for(y.in_profile)
        )

    run("act-vcomp", pairs, vcomp_compat)

    hpairs = [(x, y) for x in elems for y in elems][: max(len(elems), samples)]

    def hcomp_compat(x, y) -> bool:
        xy = prop.hcomp(x, y)
        nx = len(x.in_profile)
        for args in args_for(xy.in_profile):
            if algebra.apply(xy, args) != algebra.apply(x, args[:nx]) + algebra.apply(y, args[nx:]):
                return False
        return True

    run("act-hcomp", hpairs, hcomp_compat)

    def biact_compat(x) -> bool:
        m, n = x.arity
        s, t = Perm.random(m, rng), Perm.random(n, rng)
        tx = prop.biact(s, x, t)
        for args in args_for(tx.in_profile):
            if algebra.apply(tx, args) != s.act(algebra.apply(x, t.act(args))):
                return False
        return True

    run("act-biact", [(x,) for x in elems], biact_compat)

    if prop.unital:

        def unit_compat(x) -> bool:
            u = prop.unit(x.in_profile)
            return all(algebra.apply(u, args) == args for args in args_for(x.in_profile))

        run("act-unit", [(x,) for x in elems], unit_compat)

    return report


def check_algebra_morphism(
    maps: dict[Any, Callable[[Any], Any]],
    source: PropAlgebra,
    target: PropAlgebra,
    sampler: Sampler | None = None,
    seed: int = 0,
    samples: int = 100,
    exhaustive: bool = False,
    max_arity: int = 3,
    arg_cap: int = 64,
) -> Report:
    """Check the algebra-map square f . lambda_A = lambda_B . (id x f)."""
    if source.prop is not target.prop and source.prop.name != target.prop.name:
        raise PropError("algebra morphism requires algebras over the same PROP")
    prop = source.prop
    rng = random.Random(seed)
    if sampler is None:
        sampler = ExhaustiveSampler(prop, max_arity) if exhaustive else Sampler(prop, max_arity)
    report = Report(subject="algebra-morphism")

    def f_at(c: Any, v: Any) -> Any:
        key = next(k for k in maps if enc(k) == enc(c))
        return maps[key](v)

    tested = 0
    witness = None
    for x in sampler.elements(rng, samples):
        tuples = _arg_tuples(source, x.in_profile)[:arg_cap]
        for args in tuples:
            try:
                lhs = tuple(f_at(c, v) for c, v in zip(x.out_profile, source.apply(x, args)))
                rhs = target.apply(x, tuple(f_at(c, v) for c, v in zip(x.in_profile, args)))
            except _SKIP:
                continue
            tested += 1
            if lhs != rhs:
                witness = (x, args, lhs, rhs)
                break
        if witness:
            break
    report.add("morphism-square", witness is None, witness, tested)
    return report


def check_prop_map(
    pmap: PropMap,
    sampler: Sampler | None = None,
    seed: int = 0,
    samples: int = 100,
    exhaustive: bool = False,
    max_arity: int = 3,
) -> Report:
    """Check that an element-level function is a map of PROPs."""
    rng = random.Random(seed)
    src = pmap.source
    if sampler is None:
        sampler = ExhaustiveSampler(src, max_arity) if exhaustive else Sampler(src, max_arity)
    report = Report(subject=f"prop-map:{pmap.name}")

    def run(law: str, instances, fn) -> None:
        tested = 0
        witness = None
        for inst in instances:
            try:
                ok = fn(*inst)
            except _SKIP:
                continue
            tested += 1
            if not ok:
                witness = inst
                break
        report.add(law, witness is None, witness, tested)

    pairs = sampler.vcomp_pairs(rng, samples)
    elems = sampler.elements(rng, samples)
    hpairs = [(x, y) for x in elems for y in elems][: max(len(elems), samples)]

    run("map-vcomp", pairs, lambda x, y: pmap(src.vcomp(x, y)) == pmap.target.vcomp(pmap(x), pmap(y)))
    run("map-hcomp", hpairs, lambda x, y: pmap(src.hcomp(x, y)) == pmap.target.hcomp(pmap(x), pmap(y)))

    def map_biact(x) -> bool:
        m, n = x.arity
        s, t = Perm.random(m, rng), Perm.random(n, rng)
        return pmap(src.biact(s, x, t)) == pmap.target.biact(s, pmap(x), t)

    run("map-biact", [(x,) for x in elems], map_biact)

    if src.unital and pmap.target.unital:
        seen_profiles = {x.in_profile for x in elems} | {x.out_profile for x in elems}
        run("map-unit", [(p,) for p in seen_profiles], lambda p: pmap(src.unit(p)) == pmap.target.unit(p))

    return report
