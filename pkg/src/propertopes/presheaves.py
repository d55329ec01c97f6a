"""Finitely supported propertopic sets and weak-n verification.

A propertopic set assigns finite cell sets to a bounded universe of
propertopes and functions to their face maps, subject to the images of the
four consistency families commuting.  All semantics are truncated: the
universe fixes which shapes exist per dimension (closed under taking face
targets), and every report states its bound.

Horns and boundaries are *coherent* families: a boundary fixes a cell for
every face position such that all identified face chains agree (equivalently
a map from the standard boundary set), which is what filling quantifies
over.  Raw input tuples are automatically coherent for horns; boundaries
carry genuine conditions at the special shapes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from ._canon import canon, enc
from .core import GradedSet, PropAlgebra, PropElement, PropError, PropImpl, PropMap, Report
from .facecat import (
    FaceMap,
    MorphismChain,
    Propertope,
    _special_relations,
    chain_equal,
    faces,
    iterated,
    propertope_color,
    propertope_from_element,
)
from .perms import Perm
from .slices import Entry, SliceProp, make_entry, make_special


@dataclass
class PropertopicSet:
    """Cells and face functions on a bounded universe of propertopes."""

    base: PropImpl
    bound: int
    universe: dict[int, list[Propertope]]
    cells: dict[str, tuple[Any, ...]]
    face_fn: dict[tuple[str, str, int], dict[Any, Any]]
    default: tuple[str, int] | None = None  # ("em", n) gives singletons below n
    name: str = "ptset"

    def supported(self, g: Propertope) -> bool:
        return g.enc in self.cells

    def cells_of(self, g: Propertope) -> tuple[Any, ...]:
        got = self.cells.get(g.enc)
        if got is not None:
            return got
        if self.default and self.default[0] == "em" and g.dim < self.default[1]:
            return ("*",)
        return ()

    def face(self, g: Propertope, direction: str, index: int, cell: Any) -> Any:
        key = (g.enc, direction, index)
        fn = self.face_fn.get(key)
        if fn is None:
            target = FaceMap(g, direction, index).target
            if self.default and self.default[0] == "em" and target.dim < self.default[1]:
                return "*"
            raise PropError(f"{self.name}: no face function at {key}")
        if cell not in fn:
            raise PropError(f"{self.name}: face function at {key} undefined on {cell!r}")
        return fn[cell]

    def shapes(self, dim: int) -> list[Propertope]:
        return list(self.universe.get(dim, []))


def apply_chain(X: PropertopicSet, g: Propertope, steps: Sequence[tuple[str, int]], cell: Any) -> Any:
    cur_g, cur = g, cell
    for (d, i) in steps:
        cur = X.face(cur_g, d, i, cur)
        cur_g = FaceMap(cur_g, d, i).target
    return cur


def validate_presheaf(X: PropertopicSet) -> Report:
    """Face totality plus commutativity of the four families inside the support."""
    report = Report(subject=f"presheaf:{X.name}")
    for dim in sorted(X.universe):
        if dim < 1:
            continue
        for g in X.universe[dim]:
            if not X.supported(g):
                report.add("support", False, f"universe shape without cells: {g!r}")
                continue
            for f in faces(g):
                target = f.target
                tgt_cells = X.cells_of(target)
                key = (g.enc, f.direction, f.index)
                fn = X.face_fn.get(key)
                if fn is None and not (X.default and X.default[0] == "em" and target.dim < X.default[1]):
                    report.add("face-function", False, f"missing at {f.direction},{f.index} of {g!r}")
                    continue
                ok = True
                for c in X.cells_of(g):
                    try:
                        v = X.face(g, f.direction, f.index, c)
                    except PropError as exc:
                        report.add("face-function", False, str(exc))
                        ok = False
                        break
                    if v not in tgt_cells:
                        report.add("face-image", False, (g, f.direction, f.index, c, v))
                        ok = False
                        break
                if ok:
                    report.add(f"face-total:{f.direction}{f.index}:dim{dim}", True, None, len(X.cells_of(g)))
    # the four families
    tested = 0
    witness = None
    for dim in sorted(X.universe):
        if dim < 1:
            continue
        for g in X.universe[dim]:
            for lhs, rhs in _special_relations(X.base, g):
                for c in X.cells_of(g):
                    tested += 1
                    if apply_chain(X, g, lhs, c) != apply_chain(X, g, rhs, c):
                        witness = (g, lhs, rhs, c)
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    report.add("consistency-families", witness is None, witness, tested)
    return report


# ---------------------------------------------------------------------------
# Horns, boundaries, fillings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Horn:
    shape: Propertope
    inputs: tuple[Any, ...]

    def canon_tree(self) -> Any:
        return ("horn", canon(self.shape), canon(self.inputs))


@dataclass(frozen=True)
class Boundary:
    shape: Propertope
    inputs: tuple[Any, ...]
    outputs: tuple[Any, ...]

    def canon_tree(self) -> Any:
        return ("boundary", canon(self.shape), canon(self.inputs), canon(self.outputs))


def _boundary_entry(b: Horn | Boundary, direction: str, index: int) -> Any:
    if direction == "in":
        return b.inputs[index]
    if isinstance(b, Boundary):
        return b.outputs[index]
    return None


def boundary_coherent(X: PropertopicSet, b: Boundary) -> bool:
    """All identified face chains agree on the family (map from the standard boundary)."""
    g = b.shape
    for lhs, rhs in _special_relations(X.base, g):
        (d1, i1), rest1 = lhs[0], lhs[1:]
        (d2, i2), rest2 = rhs[0], rhs[1:]
        v1 = _boundary_entry(b, d1, i1)
        v2 = _boundary_entry(b, d2, i2)
        if v1 is None or v2 is None:
            continue
        t1 = FaceMap(g, d1, i1).target
        t2 = FaceMap(g, d2, i2).target
        if apply_chain(X, t1, rest1, v1) != apply_chain(X, t2, rest2, v2):
            return False
    return True


def horns_of(X: PropertopicSet, g: Propertope) -> Iterable[Horn]:
    v = g.value
    spaces = [X.cells_of(FaceMap(g, "in", i).target) for i in range(len(v.in_profile))]
    for combo in itertools.product(*spaces):
        yield Horn(g, combo)


def boundaries_of(X: PropertopicSet, g: Propertope, coherent_only: bool = True) -> Iterable[Boundary]:
    v = g.value
    in_spaces = [X.cells_of(FaceMap(g, "in", i).target) for i in range(len(v.in_profile))]
    out_spaces = [X.cells_of(FaceMap(g, "out", j).target) for j in range(len(v.out_profile))]
    for ins in itertools.product(*in_spaces):
        for outs in itertools.product(*out_spaces):
            b = Boundary(g, ins, outs)
            if not coherent_only or boundary_coherent(X, b):
                yield b


def fillings(X: PropertopicSet, h: Horn | Boundary) -> list[Any]:
    """All cells whose in-faces (and out-faces, for boundaries) match."""
    g = h.shape
    out = []
    for c in X.cells_of(g):
        ok = all(X.face(g, "in", i, c) == y for i, y in enumerate(h.inputs))
        if ok and isinstance(h, Boundary):
            ok = all(X.face(g, "out", j, c) == z for j, z in enumerate(h.outputs))
        if ok:
            out.append(c)
    return out


def check_weak_n(X: PropertopicSet, n: int | None, D: int | None = None) -> Report:
    """Horn and boundary filling conditions for a weak-n structure.

    ``n = None`` means the fibrancy-only check (every horn fills, all
    dimensions up to the bound).  Otherwise: horns fill in dimensions 1..n,
    fill uniquely in dimension n+1, and coherent boundaries fill uniquely in
    dimensions n+2..D.  Enumeration ranges over the universe.
    """
    D = X.bound if D is None else D
    report = Report(subject=f"weak-{'omega' if n is None else n}:{X.name}:bound{D}")
    top = D if n is None else min(n, D)
    for dim in range(1, top + 1):
        tested, witness = 0, None
        for g in X.shapes(dim):
            for h in horns_of(X, g):
                tested += 1
                if not fillings(X, h):
                    witness = h
                    break
            if witness:
                break
        report.add(f"horns-fillable:dim{dim}", witness is None, witness, tested)
    if n is None:
        return report
    if n + 1 <= D:
        tested, witness = 0, None
        for g in X.shapes(n + 1):
            for h in horns_of(X, g):
                tested += 1
                if len(fillings(X, h)) != 1:
                    witness = (h, len(fillings(X, h)))
                    break
            if witness:
                break
        report.add(f"horns-unique:dim{n + 1}", witness is None, witness, tested)
    for dim in range(n + 2, D + 1):
        tested, witness = 0, None
        for g in X.shapes(dim):
            for b in boundaries_of(X, g):
                tested += 1
                if len(fillings(X, b)) != 1:
                    witness = (b, len(fillings(X, b)))
                    break
            if witness:
                break
        report.add(f"boundaries-unique:dim{dim}", witness is None, witness, tested)
    return report


# ---------------------------------------------------------------------------
# Maps and fibrations
# ---------------------------------------------------------------------------

@dataclass
class PropertopicMap:
    source: PropertopicSet
    target: PropertopicSet
    components: dict[str, dict[Any, Any]]  # shape enc -> cell function

    def at(self, g: Propertope, cell: Any) -> Any:
        fn = self.components.get(g.enc)
        if fn is None or cell not in fn:
            raise PropError(f"propertopic map undefined at {g!r} on {cell!r}")
        return fn[cell]


def validate_propertopic_map(F: PropertopicMap) -> Report:
    report = Report(subject="propertopic-map")
    tested, witness = 0, None
    for dim in sorted(F.source.universe):
        if dim < 1:
            continue
        for g in F.source.universe[dim]:
            for f in faces(g):
                for c in F.source.cells_of(g):
                    tested += 1
                    lhs = F.at(f.target, F.source.face(g, f.direction, f.index, c))
                    rhs = F.target.face(g, f.direction, f.index, F.at(g, c))
                    if lhs != rhs:
                        witness = (g, f.direction, f.index, c)
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    report.add("map-squares", witness is None, witness, tested)
    return report


def is_fibration(p: PropertopicMap, D: int | None = None) -> Report:
    """Horn-lifting: every horn upstairs with a compatible cell downstairs lifts."""
    X, Y = p.source, p.target
    D = X.bound if D is None else D
    report = Report(subject="fibration")
    tested, witness = 0, None
    for dim in range(1, D + 1):
        for g in X.shapes(dim):
            for h in horns_of(X, g):
                image = tuple(p.at(FaceMap(g, "in", i).target, y) for i, y in enumerate(h.inputs))
                for x_down in fillings(Y, Horn(g, image)):
                    tested += 1
                    lifts = [x for x in fillings(X, h) if p.at(g, x) == x_down]
                    if not lifts:
                        witness = (h, x_down)
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    report.add("horn-lifting", witness is None, witness, tested)
    return report


def terminal_set(base: PropImpl, universe: dict[int, list[Propertope]], bound: int) -> PropertopicSet:
    cells = {}
    face_fn = {}
    for dim, shapes in universe.items():
        for g in shapes:
            cells[g.enc] = ("*",)
            if dim >= 1:
                for f in faces(g):
                    face_fn[(g.enc, f.direction, f.index)] = {"*": "*"}
    return PropertopicSet(base, bound, universe, cells, face_fn, name="terminal")


def map_to_terminal(X: PropertopicSet, T_set: PropertopicSet) -> PropertopicMap:
    comps = {g.enc: {c: "*" for c in X.cells_of(g)} for dim in X.universe for g in X.universe[dim]}
    return PropertopicMap(X, T_set, comps)


# ---------------------------------------------------------------------------
# Universe generation
# ---------------------------------------------------------------------------

def face_closure(universe: dict[int, list[Propertope]]) -> dict[int, list[Propertope]]:
    """Extend the universe downward so every face target is present."""
    out: dict[int, dict[str, Propertope]] = {}
    for dim, shapes in universe.items():
        out.setdefault(dim, {})
        for g in shapes:
            out[dim][g.enc] = g
    for dim in sorted(out, reverse=True):
        for g in list(out[dim].values()):
            if g.dim < 1:
                continue
            for f in faces(g):
                t = f.target
                out.setdefault(t.dim, {})
                out[t.dim].setdefault(t.enc, t)
    return {dim: sorted(out[dim].values(), key=lambda g: g.enc) for dim in sorted(out)}


def special_universe(
    P: PropImpl,
    D: int,
    dim1: Sequence[PropElement],
    rng: random.Random | None = None,
    per_dim: int = 6,
    twists: int = 1,
    allowed: Callable[[PropElement], bool] | None = None,
) -> dict[int, list[Propertope]]:
    """A face-closed universe built from units and special shapes.

    Dimension k+1 holds units of the dimension-k shapes, tensor and chain
    specials over them, and a few twisted units; everything is closed under
    faces afterwards.  ``allowed`` filters which *base* elements may appear
    as faces (tensor and chain outputs land one dimension down, so specials
    whose computed output fails the predicate are skipped).
    """
    rng = rng or random.Random(0)
    ok = allowed or (lambda v: True)
    universe: dict[int, list[Propertope]] = {}
    universe[0] = [propertope_color(P, c) for c in (P.colors or [])]
    universe[1] = [Propertope(P.name, 1, x) for x in dim1 if ok(x)]
    level_values: list[PropElement] = [x for x in dim1 if ok(x)]
    for dim in range(2, D + 1):
        S = iterated(P, dim - 1)
        guard = ok if dim == 2 else (lambda v: True)
        units = [S.unit_single(v) for v in level_values[:per_dim]]
        tensors = []
        for (a, b) in itertools.combinations(level_values, 2):
            if len(tensors) >= per_dim:
                break
            if guard(S.base.hcomp(a, b)):
                tensors.append(make_special(S, "tensor", a, b))
        circs = []
        for a in level_values:
            for b in level_values:
                if len(circs) >= per_dim:
                    break
                if enc(a.in_profile) == enc(b.out_profile) and guard(S.base.vcomp(a, b)):
                    circs.append(make_special(S, "circ", a, b))
        twisted = []
        for a in level_values[:twists]:
            s = Perm.random(len(a.out_profile), rng)
            t = Perm.random(len(a.in_profile), rng)
            if guard(S.base.biact(s, a, t)):
                twisted.append(make_special(S, "twisted_unit", s, a, t))
        seen: dict[str, PropElement] = {}
        for v in units + tensors + circs + twisted:
            seen.setdefault(v.enc, v)
        level_values = list(seen.values())
        universe[dim] = [Propertope(P.name, dim, v) for v in level_values]
    return face_closure(universe)


# ---------------------------------------------------------------------------
# psi: algebras to weak-n structures
# ---------------------------------------------------------------------------

def psi_build(
    A: PropAlgebra,
    n: int,
    D: int,
    universe: dict[int, list[Propertope]],
    name: str | None = None,
) -> PropertopicSet:
    """The weak-n structure of an algebra over the n-fold slice.

    Cells below dimension n are singletons; dimension-n cells are the
    carrier fibers; dimension n+1 takes products of the in-face cells with
    out-faces given by the structure maps; higher dimensions take the
    coherent families of their face cells with projections as faces.
    """
    base = A.prop if n == 0 else None
    if n > 0:
        S = A.prop
        for _ in range(n):
            if not isinstance(S, SliceProp):
                raise PropError("psi_build: algebra must live over the n-fold slice")
            S = S.base
        base = S
    assert base is not None
    universe = face_closure(universe)
    X = PropertopicSet(base, D, universe, {}, {}, default=("em", n) if n > 0 else None, name=name or f"psi({A.name})")

    for dim in range(0, min(n, D + 1)):
        for g in universe.get(dim, []):
            X.cells[g.enc] = ("*",)
            if dim >= 1:
                for f in faces(g):
                    X.face_fn[(g.enc, f.direction, f.index)] = {"*": "*"}

    if n <= D:
        for g in universe.get(n, []):
            fiber = A.carrier.fiber(g.value)
            X.cells[g.enc] = tuple(fiber)
            if n >= 1:
                for f in faces(g):
                    X.face_fn[(g.enc, f.direction, f.index)] = {c: "*" for c in fiber}

    if n + 1 <= D:
        for g in universe.get(n + 1, []):
            v = g.value
            in_spaces = [X.cells_of(FaceMap(g, "in", i).target) for i in range(len(v.in_profile))]
            cells = list(itertools.product(*in_spaces))
            X.cells[g.enc] = tuple(cells)
            for i in range(len(v.in_profile)):
                X.face_fn[(g.enc, "in", i)] = {c: c[i] for c in cells}
            outs = {c: A.apply(v, c) for c in cells}
            for j in range(len(v.out_profile)):
                X.face_fn[(g.enc, "out", j)] = {c: outs[c][j] for c in cells}

    for dim in range(n + 2, D + 1):
        for g in universe.get(dim, []):
            v = g.value
            n_in, n_out = len(v.in_profile), len(v.out_profile)
            in_spaces = [X.cells_of(FaceMap(g, "in", i).target) for i in range(n_in)]
            out_spaces = [X.cells_of(FaceMap(g, "out", j).target) for j in range(n_out)]
            cells = []
            for ins in itertools.product(*in_spaces):
                for outs in itertools.product(*out_spaces):
                    if boundary_coherent(X, Boundary(g, ins, outs)):
                        cells.append(ins + outs)
            X.cells[g.enc] = tuple(cells)
            for i in range(n_in):
                X.face_fn[(g.enc, "in", i)] = {c: c[i] for c in cells}
            for j in range(n_out):
                X.face_fn[(g.enc, "out", j)] = {c: c[n_in + j] for c in cells}
    return X


def phi_extract(X: PropertopicSet, n: int) -> PropAlgebra:
    """Recover the top-cell algebra from unique horn fillings."""
    P = X.base
    level = iterated(P, n)
    fibers: dict[Any, list[Any]] = {}
    for g in X.shapes(n):
        key = g.value
        fibers[key] = list(X.cells_of(g))
    carrier = GradedSet.from_dict(fibers)
    shape_by_enc = {g.value.enc if n >= 1 else enc(g.value): g for g in X.shapes(n)}

    def act(x: PropElement, args: tuple) -> tuple:
        g = Propertope(P.name, n + 1, x)
        if not X.supported(g):
            raise PropError(f"phi: shape {x!r} is outside the verified universe")
        got = fillings(X, Horn(g, tuple(args)))
        if len(got) != 1:
            raise PropError(f"phi: horn at {x!r} on {args!r} has {len(got)} fillings; not weak-{n}")
        (cell,) = got
        return tuple(X.face(g, "out", j, cell) for j in range(len(x.out_profile)))

    return PropAlgebra(level, carrier, act, name=f"phi({X.name})")


def compose_cells(X: PropertopicSet, g: Propertope, inputs: tuple) -> set[tuple]:
    """All out-face tuples over the fillings of the horn at the shape."""
    out = set()
    for cell in fillings(X, Horn(g, tuple(inputs))):
        out.add(tuple(X.face(g, "out", j, cell) for j in range(len(g.value.out_profile))))
    return out


# ---------------------------------------------------------------------------
# Underlying category
# ---------------------------------------------------------------------------

@dataclass
class UnderlyingCategory:
    """The (identity-free) category of (n-1)-cells and boundary fillings."""

    X: PropertopicSet
    n: int
    objects: list[tuple[str, Any]] = field(default_factory=list)
    hom: dict[tuple, list[tuple[Propertope, Any]]] = field(default_factory=dict)

    def compose(self, g_mor: tuple[Propertope, Any], f_mor: tuple[Propertope, Any]) -> tuple[Propertope, Any]:
        """gf via the unique filling of the chain-shape horn."""
        (g_shape, g_cell), (f_shape, f_cell) = g_mor, f_mor
        S = iterated(self.X.base, self.n)
        chain_shape = make_special(S, "circ", g_shape.value, f_shape.value)
        gp = Propertope(self.X.base.name, self.n + 1, chain_shape)
        got = fillings(self.X, Horn(gp, (g_cell, f_cell)))
        if len(got) != 1:
            raise PropError(f"composition horn has {len(got)} fillings; not weak-{self.n}")
        (w,) = got
        out_cell = self.X.face(gp, "out", 0, w)
        level = iterated(self.X.base, self.n - 1)
        out_shape = Propertope(self.X.base.name, self.n, level.vcomp(g_shape.value, f_shape.value))
        return (out_shape, out_cell)


def underlying_category(X: PropertopicSet, n: int) -> UnderlyingCategory:
    """Objects are (n-1)-cells; morphisms fill boundaries between them."""
    if n < 1:
        raise PropError("underlying category needs n >= 1")
    cat = UnderlyingCategory(X, n)
    for g in X.shapes(n - 1):
        for c in X.cells_of(g):
            cat.objects.append((g.enc, c))
    for g in X.shapes(n):
        v = g.value
        if len(v.in_profile) != 1 or len(v.out_profile) != 1:
            continue
        src_t = FaceMap(g, "in", 0).target
        dst_t = FaceMap(g, "out", 0).target
        for cell in X.cells_of(g):
            y = X.face(g, "in", 0, cell)
            z = X.face(g, "out", 0, cell)
            cat.hom.setdefault(((src_t.enc, y), (dst_t.enc, z)), []).append((g, cell))
    return cat


# ---------------------------------------------------------------------------
# Pullback and reflection
# ---------------------------------------------------------------------------

def map_propertope(phi: PropMap, g: Propertope) -> Propertope:
    """Apply a base-PROP map to a propertope by decoration replacement."""
    P, Q = phi.source, phi.target
    if g.dim == 0:
        return propertope_color(Q, g.value)
    if g.dim == 1:
        return Propertope(Q.name, 1, phi(g.value))
    S_p = iterated(P, g.dim - 1)
    S_q = iterated(Q, g.dim - 1)
    assert isinstance(S_p, SliceProp) and isinstance(S_q, SliceProp)
    entries, sigma, tau = S_p.parts(g.value)
    new_entries = []
    for (dg, sg, tg) in entries:
        new_decs = tuple(
            tuple(map_propertope(phi, Propertope(P.name, g.dim - 1, d)).value for d in comp_decs)
            for comp_decs in dg.decorations
        )
        def mapc(col):
            return map_propertope(phi, Propertope(P.name, g.dim - 2, col)).value if g.dim - 2 >= 1 else col

        new_dg = type(dg)(
            dg.graph,
            new_decs,
            tuple(tuple(mapc(c) for c in cols) for cols in dg.edge_colors),
            tuple(tuple(mapc(c) for c in cols) for cols in dg.in_colors),
            tuple(tuple(mapc(c) for c in cols) for cols in dg.out_colors),
        )
        entry, prov = make_entry(S_q.base, new_dg, sg, tg)
        if prov != sorted(prov):
            raise PropError("decoration replacement disturbed canonical vertex order")
        new_entries.append(entry)
    return Propertope(Q.name, g.dim, S_q.make(tuple(new_entries), sigma, tau))


def pullback(phi: PropMap, X: PropertopicSet, universe: dict[int, list[Propertope]], name: str | None = None) -> PropertopicSet:
    """Restrict a propertopic set along a base map: cells at Phi(shape)."""
    universe = face_closure(universe)
    cells = {}
    face_fn = {}
    for dim in sorted(universe):
        for g in universe[dim]:
            img = map_propertope(phi, g)
            if not X.supported(img):
                raise PropError(f"pullback: image shape {img!r} unsupported in {X.name}")
            cells[g.enc] = X.cells_of(img)
            if dim >= 1:
                for f in faces(g):
                    key = (img.enc, f.direction, f.index)
                    if key not in X.face_fn:
                        raise PropError(f"pullback: missing face function at {key}")
                    face_fn[(g.enc, f.direction, f.index)] = dict(X.face_fn[key])
    return PropertopicSet(phi.source, X.bound, universe, cells, face_fn, default=X.default, name=name or f"pullback({X.name})")


def em_reflect(X: PropertopicSet, n: int) -> PropertopicSet:
    """Collapse everything below dimension n to a point."""
    cells = {}
    face_fn = {}
    for dim in sorted(X.universe):
        for g in X.universe[dim]:
            if dim < n:
                cells[g.enc] = ("*",)
                if dim >= 1:
                    for f in faces(g):
                        face_fn[(g.enc, f.direction, f.index)] = {"*": "*"}
            else:
                cells[g.enc] = X.cells_of(g)
                if dim >= 1:
                    for f in faces(g):
                        if f.target.dim < n:
                            face_fn[(g.enc, f.direction, f.index)] = {c: "*" for c in X.cells_of(g)}
                        else:
                            face_fn[(g.enc, f.direction, f.index)] = dict(X.face_fn[(g.enc, f.direction, f.index)])
    return PropertopicSet(X.base, X.bound, dict(X.universe), cells, face_fn, default=("em", n), name=f"em({X.name})")


# ---------------------------------------------------------------------------
# Standard sets
# ---------------------------------------------------------------------------

def standard_sets(
    P: PropImpl, g: Propertope, kind: str, depth_cap: int = 6
) -> tuple[PropertopicSet, bool]:
    """The standard shape / boundary / horn set of a propertope.

    Cells at a lower shape are chain classes modulo the consistency
    congruences; returns (set, exact) where exact is False when some class
    comparison hit the depth cap (the enumeration may then be too fine).
    """
    if kind not in ("delta", "boundary", "horn"):
        raise PropError(f"unknown standard set kind {kind!r}")
    # enumerate all chains from g downward
    chains_by_target: dict[str, list[MorphismChain]] = {}
    shapes: dict[str, Propertope] = {g.enc: g}

    def explore(chain: MorphismChain) -> None:
        t = chain.target
        shapes.setdefault(t.enc, t)
        chains_by_target.setdefault(t.enc, []).append(chain)
        if t.dim >= 1:
            for f in faces(t):
                explore(MorphismChain(chain.source, chain.steps + ((f.direction, f.index),)))

    explore(MorphismChain(g))
    exact = True

    # group chains into classes per target
    classes_by_target: dict[str, list[list[MorphismChain]]] = {}
    for tkey, chains in chains_by_target.items():
        classes: list[list[MorphismChain]] = []
        for c in chains:
            placed = False
            for cls in classes:
                verdict = chain_equal(P, cls[0], c, depth_cap)
                if verdict == "equal":
                    cls.append(c)
                    placed = True
                    break
                if verdict == "unknown":
                    exact = False
            if not placed:
                classes.append([c])
        classes_by_target[tkey] = classes

    # reachability from the in-face targets (for horns)
    reach: set[str] = set()
    if kind == "horn":
        for i in range(len(g.value.in_profile)):
            t = FaceMap(g, "in", i).target
            stack = [t]
            while stack:
                cur = stack.pop()
                if cur.enc in reach:
                    continue
                reach.add(cur.enc)
                if cur.dim >= 1:
                    stack.extend(f.target for f in faces(cur))

    def included(tkey: str) -> bool:
        shape = shapes[tkey]
        if kind == "delta":
            return True
        if kind == "boundary":
            return shape.dim < g.dim
        return tkey in reach

    cells: dict[str, tuple[Any, ...]] = {}
    reps: dict[str, list[MorphismChain]] = {}
    universe: dict[int, list[Propertope]] = {}
    for tkey, shape in shapes.items():
        universe.setdefault(shape.dim, []).append(shape)
        if included(tkey):
            classes = classes_by_target[tkey]
            reps[tkey] = [min(cls, key=lambda c: enc(c)) for cls in classes]
            cells[tkey] = tuple(enc(r) for r in reps[tkey])
        else:
            cells[tkey] = ()
            reps[tkey] = []

    face_fn: dict[tuple[str, str, int], dict[Any, Any]] = {}
    for tkey, shape in shapes.items():
        if shape.dim < 1:
            continue
        for f in faces(shape):
            fn = {}
            for rep in reps.get(tkey, []):
                extended = MorphismChain(rep.source, rep.steps + ((f.direction, f.index),))
                target_reps = reps.get(f.target.enc, [])
                image = None
                for cand in target_reps:
                    verdict = chain_equal(P, cand, extended, depth_cap)
                    if verdict == "equal":
                        image = enc(cand)
                        break
                    if verdict == "unknown":
                        exact = False
                if image is None:
                    image = enc(extended)
                fn[enc(rep)] = image
            face_fn[(tkey, f.direction, f.index)] = fn
    X = PropertopicSet(P, g.dim, {d: sorted(v, key=lambda s: s.enc) for d, v in universe.items()}, cells, face_fn, name=f"{kind}({g.enc[:24]})")
    return X, exact
