"""Propertopes, face maps, and chains modulo the consistency congruences.

An n-dimensional propertope over a base PROP P is an element of the n-fold
slice of P (a color of P for n = 0).  Face maps point from a propertope to
each occurrence of an input color (in-face) or output color (out-face), one
dimension down.  Morphisms are chains of face maps modulo four families of
commuting squares anchored at the special shapes: tensor pairs, vertical
chains, unit tensors, and twisted units.  ``chain_equal`` decides equality
by bidirectional breadth-first rewriting under a depth cap; the relations
only fire at the special shapes, so the bounded search is exact on all the
shapes exercised here, though not proven complete in general.

``encode_metagraph`` strips a propertope to its leveled combinatorial
skeleton (bare graphs with boundary twists and sequence bookkeeping at every
level, base PROP elements at level 1), from which ``decode_metagraph``
reconstructs the propertope uniquely.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from ._canon import canon, enc
from .core import ArityError, PropElement, PropError, PropImpl, Profile, Report
from .graphs import Component, DecoratedGraph, MNGraph, decorate_with_colors
from .perms import Perm
from .slices import Entry, SliceProp, make_entry, make_special, slice_prop

# ---------------------------------------------------------------------------
# Iterated slices
# ---------------------------------------------------------------------------

_TOWER_CACHE: dict[str, list[PropImpl]] = {}


def iterated(P: PropImpl, n: int) -> PropImpl:
    """The n-fold slice of P (n = 0 gives P back)."""
    if n < 0:
        raise ArityError("slice iteration count must be non-negative")
    tower = _TOWER_CACHE.setdefault(P.name, [P])
    while len(tower) <= n:
        tower.append(slice_prop(tower[-1]))
    return tower[n]


@dataclass(frozen=True)
class Propertope:
    """A propertope: dimension plus its value in the iterated slice tower."""

    base_name: str
    dim: int
    value: Any  # color of the base for dim 0, else a PropElement

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ArityError("propertope dimension must be >= 0")

    def canon_tree(self) -> Any:
        return ("ptope", self.base_name, self.dim, canon(self.value))

    @property
    def enc(self) -> str:
        return enc(self)

    def __repr__(self) -> str:
        return f"<ptope dim={self.dim} {self.value!r}>"


def propertope_from_element(P: PropImpl, x: PropElement) -> Propertope:
    """Wrap an element of some level of the slice tower of P.

    An element of the (n-1)-fold slice is an n-dimensional propertope.
    """
    for k in range(32):
        if iterated(P, k).name == x.owner:
            return Propertope(P.name, k + 1, x)
    raise PropError(f"element {x!r} is not in the slice tower of {P.name}")


def propertope_color(P: PropImpl, c: Any) -> Propertope:
    P.check_color(c)
    return Propertope(P.name, 0, c)


def validate_propertope(P: PropImpl, g: Propertope) -> Report:
    """Validate a propertope's payload at every level of the tower."""
    from .slices import validate_slice_element

    report = Report(subject=f"propertope:dim{g.dim}")
    if g.dim == 0:
        report.add("color", P.is_color(g.value), g.value)
        return report
    if g.dim == 1:
        report.add("element", P.contains(g.value), g.value)
        return report

    def walk(level: int, x: PropElement) -> bool:
        S = iterated(P, level - 1)
        assert isinstance(S, SliceProp)
        rep = validate_slice_element(S.base, x)
        report.checks.extend(rep.checks)
        if not rep.ok:
            return False
        ok = True
        if level >= 3:
            entries, _, _ = S.parts(x)
            for e in entries:
                for comp_decs in e[0].decorations:
                    for d in comp_decs:
                        ok = walk(level - 1, d) and ok
        return ok

    walk(g.dim, g.value)
    return report


# ---------------------------------------------------------------------------
# Face maps and chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceMap:
    source: Propertope
    direction: str  # "in" | "out"
    index: int

    def __post_init__(self) -> None:
        if self.direction not in ("in", "out"):
            raise PropError("face direction must be 'in' or 'out'")
        if self.source.dim < 1:
            raise PropError("0-dimensional propertopes have no faces")

    @property
    def target(self) -> Propertope:
        v = self.source.value
        profile = v.in_profile if self.direction == "in" else v.out_profile
        if not (0 <= self.index < len(profile)):
            raise ArityError("face index out of range")
        return Propertope(self.source.base_name, self.source.dim - 1, profile[self.index])

    def canon_tree(self) -> Any:
        return ("face", canon(self.source), self.direction, self.index)


def faces(g: Propertope) -> list[FaceMap]:
    """All in-faces then out-faces of a propertope, in profile order."""
    if g.dim < 1:
        return []
    v = g.value
    ins = [FaceMap(g, "in", i) for i in range(len(v.in_profile))]
    outs = [FaceMap(g, "out", j) for j in range(len(v.out_profile))]
    return ins + outs


@dataclass(frozen=True)
class MorphismChain:
    """A composite of face maps; the empty chain is an identity."""

    source: Propertope
    steps: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        cur = self.source
        for (d, i) in self.steps:
            cur = FaceMap(cur, d, i).target

    @property
    def target(self) -> Propertope:
        cur = self.source
        for (d, i) in self.steps:
            cur = FaceMap(cur, d, i).target
        return cur

    def waypoints(self) -> list[Propertope]:
        out = [self.source]
        for (d, i) in self.steps:
            out.append(FaceMap(out[-1], d, i).target)
        return out

    def canon_tree(self) -> Any:
        return ("chain", canon(self.source), self.steps)


def chain_of(face: FaceMap) -> MorphismChain:
    return MorphismChain(face.source, ((face.direction, face.index),))


def chain_compose(a: MorphismChain, b: MorphismChain) -> MorphismChain:
    """Splice chains: a followed by b; endpoints must agree."""
    if enc(a.target) != enc(b.source):
        raise PropError("chain endpoints do not match")
    return MorphismChain(a.source, a.steps + b.steps)


# ---- consistency relations -------------------------------------------------

_RELATIONS_CACHE: dict[tuple[str, str], list[tuple[tuple, tuple]]] = {}


def _special_relations(P: PropImpl, g: Propertope) -> list[tuple[tuple, tuple]]:
    """Pairs of equal step-sequences anchored at a special-shaped propertope.

    Length-1 pairs are the unit squares; length-2 pairs are the horizontal,
    vertical, and equivariance squares, with indices adapted to the left
    action convention used throughout (output position j of a twisted unit
    matches position sigma(j) of the twisted color).  Recognition rebuilds
    the special shapes, which is costly, so results are cached per shape.
    """
    cache_key = (P.name, g.enc)
    cached = _RELATIONS_CACHE.get(cache_key)
    if cached is not None:
        return cached
    out = _special_relations_uncached(P, g)
    _RELATIONS_CACHE[cache_key] = out
    return out


def _special_relations_uncached(P: PropImpl, g: Propertope) -> list[tuple[tuple, tuple]]:
    out: list[tuple[tuple, tuple]] = []
    if g.dim < 1:
        return out
    v = g.value
    level = iterated(P, g.dim - 1)
    # unit tensor: the i-th in-face equals the i-th out-face
    if level.unital and enc(v.in_profile) == enc(v.out_profile):
        try:
            if v == level.unit(v.in_profile):
                for i in range(len(v.in_profile)):
                    out.append(((("in", i),), (("out", i),)))
        except PropError:
            pass
    if g.dim < 2 or not isinstance(level, SliceProp):
        return out
    S = level
    # tensor shape: in-faces to alpha, beta; one out-face to alpha (x) beta
    if len(v.in_profile) == 2 and len(v.out_profile) == 1:
        alpha, beta = v.in_profile
        try:
            if v == make_special(S, "tensor", alpha, beta):
                na, ma = len(alpha.in_profile), len(alpha.out_profile)
                for i in range(na):
                    out.append(((("in", 0), ("in", i)), (("out", 0), ("in", i))))
                for k in range(len(beta.in_profile)):
                    out.append(((("in", 1), ("in", k)), (("out", 0), ("in", na + k))))
                for j in range(ma):
                    out.append(((("in", 0), ("out", j)), (("out", 0), ("out", j))))
                for l in range(len(beta.out_profile)):
                    out.append(((("in", 1), ("out", l)), (("out", 0), ("out", ma + l))))
        except PropError:
            pass
        # vertical chain shape: upper alpha, lower beta
        try:
            if enc(alpha.in_profile) == enc(beta.out_profile) and v == make_special(S, "circ", alpha, beta):
                for j in range(len(alpha.out_profile)):
                    out.append(((("in", 0), ("out", j)), (("out", 0), ("out", j))))
                for i in range(len(beta.in_profile)):
                    out.append(((("in", 1), ("in", i)), (("out", 0), ("in", i))))
        except PropError:
            pass
    # twisted unit: single entry, single unit vertex with boundary twists
    if len(v.in_profile) == 1 and len(v.out_profile) == 1:
        entries, _, _ = S.parts(v)
        if len(entries) == 1:
            dg, sg, tg = entries[0]
            total_vertices = sum(c.n_vertices for c in dg.graph.components)
            if total_vertices == 1 and len(dg.graph.components) == 1:
                alpha = v.in_profile[0]
                try:
                    if v == make_special(S, "twisted_unit", sg, alpha, tg):
                        for j in range(len(alpha.out_profile)):
                            out.append(((("in", 0), ("out", j)), (("out", 0), ("out", sg(j)))))
                except (PropError, ValueError):
                    pass
    return out


def chain_equal(P: PropImpl, a: MorphismChain, b: MorphismChain, depth_cap: int = 6) -> str:
    """Decide chain equality modulo the consistency congruences.

    Returns "equal", "distinct", or "unknown" (closure hit the depth cap).
    """
    if enc(a.source) != enc(b.source) or enc(a.target) != enc(b.target):
        return "distinct"

    def neighbors(chain: MorphismChain) -> Iterable[MorphismChain]:
        pts = chain.waypoints()
        steps = chain.steps
        for pos in range(len(steps)):
            g = pts[pos]
            rels = _special_relations(P, g)
            for lhs, rhs in rels:
                for src, dst in ((lhs, rhs), (rhs, lhs)):
                    k = len(src)
                    if steps[pos : pos + k] == src:
                        new = steps[:pos] + dst + steps[pos + k :]
                        yield MorphismChain(chain.source, new)

    def closure(start: MorphismChain) -> tuple[set[str], bool]:
        seen = {enc(start): start}
        frontier = [start]
        for _ in range(depth_cap):
            nxt = []
            for c in frontier:
                for n in neighbors(c):
                    k = enc(n)
                    if k not in seen:
                        seen[k] = n
                        nxt.append(n)
            if not nxt:
                return set(seen), True
            frontier = nxt
        return set(seen), False

    ca, closed_a = closure(a)
    cb, closed_b = closure(b)
    if ca & cb:
        return "equal"
    if closed_a and closed_b:
        return "distinct"
    return "unknown"


# ---------------------------------------------------------------------------
# Metagraph codec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Metagraph:
    """Leveled skeleton of a propertope: bare graphs above, base elements below.

    ``levels[k]`` (k from the top) is a list of groups, one per vertex slot
    of the level above (a single group at the top); each group records its
    entry graphs with boundary twists plus the sequence bookkeeping.  The
    final level lists base PROP elements by profile and payload.
    """

    dim: int
    levels: tuple[tuple[Any, ...], ...]
    base_elements: tuple[Any, ...]

    def canon_tree(self) -> Any:
        return ("metagraph", self.dim, canon(self.levels), canon(self.base_elements))


def _bare_graph(g: MNGraph) -> tuple:
    return tuple(
        (c.vertex_ports, c.edges, c.inputs, c.outputs, c.formal) for c in g.components
    )


def _group_of_element(S: SliceProp, x: PropElement) -> tuple[tuple, list[PropElement]]:
    entries, sigma, tau = S.parts(x)
    bare_entries = []
    slots: list[PropElement] = []
    for (dg, sg, tg) in entries:
        bare_entries.append((_bare_graph(dg.graph), sg.images, tg.images))
        for comp_decs in dg.decorations:
            slots.extend(comp_decs)
    return (tuple(bare_entries), sigma.images, tau.images), slots


def encode_metagraph(P: PropImpl, g: Propertope) -> Metagraph:
    """Strip a propertope to its metagraph; inverse of ``decode_metagraph``."""
    if g.dim == 0:
        return Metagraph(0, (), (g.value,))
    if g.dim == 1:
        x = g.value
        return Metagraph(1, (), ((tuple(x.out_profile), tuple(x.in_profile), canon(x.payload)),))
    levels: list[tuple[Any, ...]] = []
    current: list[PropElement] = [g.value]
    for level in range(g.dim, 1, -1):
        S = iterated(P, level - 1)
        assert isinstance(S, SliceProp)
        groups = []
        next_current: list[PropElement] = []
        for x in current:
            group, slots = _group_of_element(S, x)
            groups.append(group)
            next_current.extend(slots)
        levels.append(tuple(groups))
        current = next_current
    base = tuple((tuple(x.out_profile), tuple(x.in_profile), canon(x.payload)) for x in current)
    return Metagraph(g.dim, tuple(levels), base)


def _rebuild_graph(bare: tuple, decorations: list[PropElement]) -> DecoratedGraph:
    comps = []
    decs = []
    formal_colors: dict[int, Any] = {}
    k = 0
    for ci, (ports, edges, inputs, outputs, formal) in enumerate(bare):
        comps.append(Component(tuple(tuple(p) for p in ports), tuple(tuple(e) for e in edges),
                               tuple(tuple(i) if i is not None else None for i in inputs),
                               tuple(tuple(o) if o is not None else None for o in outputs), formal))
        row = []
        for _ in range(len(ports)):
            if k >= len(decorations):
                raise PropError(f"metagraph slot count mismatch at slot {k + 1}")
            row.append(decorations[k])
            k += 1
        decs.append(row)
        if formal:
            raise PropError("metagraph groups cannot contain formal components")
    if k != len(decorations):
        raise PropError("metagraph slot count mismatch")
    return decorate_with_colors(MNGraph(tuple(comps)), decs, formal_colors)


def decode_metagraph(P: PropImpl, m: Metagraph) -> Propertope:
    """Reconstruct the propertope a metagraph determines."""
    if m.dim == 0:
        return propertope_color(P, m.base_elements[0])
    # level 1: base elements
    base_values: list[PropElement] = []
    for (out_p, in_p, payload) in m.base_elements:
        x = PropElement(P.name, tuple(out_p), tuple(in_p), payload)
        if not P.contains(x):
            raise PropError(f"metagraph base element {x!r} is not in {P.name}")
        base_values.append(x)
    if m.dim == 1:
        if len(base_values) != 1:
            raise PropError("dimension-1 metagraph must hold exactly one element")
        return Propertope(P.name, 1, base_values[0])
    current = base_values
    for level in range(2, m.dim + 1):
        S = iterated(P, level - 1)
        assert isinstance(S, SliceProp)
        groups = m.levels[m.dim - level]
        next_current: list[PropElement] = []
        k = 0
        for (bare_entries, sigma_images, tau_images) in groups:
            entries: list[Entry] = []
            for (bare, sg_images, tg_images) in bare_entries:
                n_slots = sum(len(ports) for (ports, *_rest) in bare)
                dg = _rebuild_graph(bare, current[k : k + n_slots])
                k += n_slots
                entry, prov = make_entry(S.base, dg, Perm(tuple(sg_images)), Perm(tuple(tg_images)))
                if prov != sorted(prov):
                    raise PropError("metagraph entry is not in canonical vertex order")
                entries.append(entry)
            next_current.append(S.make(entries, Perm(tuple(sigma_images)), Perm(tuple(tau_images))))
        if k != len(current):
            raise PropError(f"metagraph level {level}: slot count mismatch at positions {k} vs {len(current)}")
        current = next_current
    if len(current) != 1:
        raise PropError("metagraph top level must reconstruct a single propertope")
    return Propertope(P.name, m.dim, current[0])
