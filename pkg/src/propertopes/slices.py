"""The slice ("higher") PROP of a unital colored PROP.

Colors of ``slice(P)`` are the elements of P.  An element over the profile
pair (beta_1..beta_r; alpha_1..alpha_s) is a sequence of r *entries* with
permutation bookkeeping (sigma, tau): each entry is a canonical graph
expression over P (a decorated graph with boundary twists, see ``gcanon``)
whose value is beta_{sigma(j)}, and the q-th vertex slot (entries in order,
vertices in canonical order) carries the decoration alpha_{tau^-1(q)}.

The boundary twists on entries make the construction closed under
composition: substituting a disconnected entry into a crossed unit would
otherwise leave the resulting sequence entry unable to evaluate to its
declared color.  The sequence-level permutation actions only update the
bookkeeping; entries never change.  Bookkeeping is part of an element's
identity modulo reordering the sequence with compensations, and the stored
form is the least such expression.  Vertical composition is graph
substitution through the twists; horizontal composition is concatenation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, Sequence

from ._canon import canon, enc
from .core import (
    ArityError,
    ColorError,
    CompositionError,
    GradedSet,
    PropAlgebra,
    PropElement,
    PropError,
    PropImpl,
    PropMap,
    Profile,
    Report,
    check_profile,
    profile_act,
    profile_ract,
)
from .gcanon import canonical_expr, raw_from_decorated
from .graphs import (
    Component,
    DecoratedGraph,
    MNGraph,
    decorate,
    evaluate,
    single_vertex_component,
    validate_decoration,
    validate_mn_graph,
)
from .perms import Perm, block_perm, block_sum

# An entry is (graph, out_twist, in_twist): the value is out_twist . X . in_twist.
Entry = tuple[DecoratedGraph, Perm, Perm]


def entry_slots(entry: Entry) -> list[PropElement]:
    dg, _, _ = entry
    return [d for comp in dg.decorations for d in comp]


def entry_ev(base: PropImpl, entry: Entry) -> PropElement:
    dg, sg, tg = entry
    val = evaluate(base, dg)
    if sg.is_identity() and tg.is_identity():
        return val
    return base.biact(sg, val, tg)


def make_entry(base: PropImpl, dg: DecoratedGraph, sg: Perm, tg: Perm) -> tuple[Entry, list[int]]:
    """Canonicalize one entry; returns it with raw-vertex provenance."""
    cg, s, t, prov = canonical_expr(raw_from_decorated(dg), sg, tg, f"slice({base.name})")
    return (cg, s, t), prov


class SliceProp(PropImpl):
    """P^+ for a unital base PROP with decidable element equality."""

    def __init__(self, base: PropImpl):
        if not base.unital:
            raise PropError("slice construction needs a unital base PROP")
        self.base = base
        self.name = f"slice({base.name})"

    # ---- colors are base elements --------------------------------------
    @property
    def colors(self) -> None:
        return None

    def is_color(self, c: Any) -> bool:
        return isinstance(c, PropElement) and c.owner == self.base.name and self.base.contains(c)

    # ---- construction ----------------------------------------------------
    def make(self, entries: Sequence[Entry], sigma: Perm, tau: Perm) -> PropElement:
        """Element from entries and bookkeeping, reduced to least reordering.

        Entry j carries output color sigma(j); slot q holds the input color
        tau^-1(q).  Reordering the sequence while compensating (sigma, tau)
        denotes the same element; the stored form sorts entries by encoding
        and fills slots of equal entries in sigma-ascending order.
        """
        entries = tuple(entries)
        if not entries:
            raise ArityError("slice elements are non-empty entry sequences")
        if len(sigma) != len(entries):
            raise ArityError("output permutation size mismatch")
        sizes = tuple(len(entry_slots(e)) for e in entries)
        if len(tau) != sum(sizes):
            raise ArityError("input permutation size mismatch")
        keys = [enc(e) for e in entries]
        order: list[int] = []
        for key in sorted(set(keys)):
            members = [j for j, k in enumerate(keys) if k == key]
            members.sort(key=lambda j: sigma(j))
            order.extend(members)
        zeta = Perm(tuple(order)).inverse()  # moves raw entry j to slot zeta(j)
        new_entries = zeta.act(entries)
        new_sigma = sigma.compose(zeta.inverse())
        new_tau = block_perm(zeta, sizes).compose(tau)
        evs = tuple(entry_ev(self.base, e) for e in new_entries)
        out_p = profile_act(new_sigma, evs)
        decs = [d for e in new_entries for d in entry_slots(e)]
        in_p = profile_ract(tuple(decs), new_tau)
        return PropElement(self.name, out_p, in_p, ("slice", new_entries, new_sigma, new_tau))

    @staticmethod
    def parts(x: PropElement) -> tuple[tuple[Entry, ...], Perm, Perm]:
        _, entries, sigma, tau = x.payload
        return entries, sigma, tau

    def contains(self, x: PropElement) -> bool:
        if x.owner != self.name or not isinstance(x.payload, tuple) or x.payload[0] != "slice":
            return False
        try:
            entries, sigma, tau = self.parts(x)
            return self.make(entries, sigma, tau) == x
        except (PropError, ValueError, IndexError, TypeError):
            return False

    def component(self, out_p, in_p) -> None:
        return None

    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement | None:
        return None  # use SliceSampler for law checks

    # ---- operations -------------------------------------------------------
    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_hcomp(x, y)
        ex, sx, tx = self.parts(x)
        ey, sy, ty = self.parts(y)
        return self.make(ex + ey, block_sum(sx, sy), block_sum(tx, ty))

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        """Graph substitution: plug y's entries into x's vertex slots."""
        self._pre_vcomp(x, y)
        ex, sx, tx = self.parts(x)
        ey, sy, ty = self.parts(y)
        tx_inv = tx.inverse()
        sy_inv = sy.inverse()
        ty_inv = ty.inverse()
        y_offsets = []
        acc = 0
        for e in ey:
            y_offsets.append(acc)
            acc += len(entry_slots(e))
        new_entries: list[Entry] = []
        new_tau_inv: list[int] = []
        global_slot = 0
        for (G, sg, tg) in ex:
            raw, assignment = self._expand_entry(G, ey, sy_inv, tx_inv, global_slot)
            global_slot += sum(len(cd) for cd in G.decorations)
            cg, s, t, prov = canonical_expr(raw, sg, tg, self.name)
            new_entries.append((cg, s, t))
            for raw_index in prov:
                a, local = assignment[raw_index]
                new_tau_inv.append(ty_inv(y_offsets[a] + local))
        tau = Perm(tuple(new_tau_inv)).inverse()
        return self.make(tuple(new_entries), sx, tau)

    def _expand_entry(
        self, G: DecoratedGraph, ey: tuple[Entry, ...], sy_inv: Perm, tx_inv: Perm, slot_base: int
    ) -> tuple[dict, dict[int, tuple[int, int]]]:
        """Blow up each vertex of a host graph into its assigned inner entry.

        Returns the raw expression of the substituted graph plus, per raw
        vertex index, the (inner entry index, local slot) it came from.
        """
        # host vertices in flat order with their assigned inner entries
        host_vertices: list[tuple[int, int]] = [
            (ci, vi) for ci, comp in enumerate(G.graph.components) for vi in range(comp.n_vertices)
        ]
        inner_of: dict[tuple[int, int], int] = {}
        for k, hv in enumerate(host_vertices):
            inner_of[hv] = sy_inv(tx_inv(slot_base + k))

        decs: list[PropElement] = []
        assignment: dict[int, tuple[int, int]] = {}
        base_index: dict[tuple[int, int], int] = {}
        for hv in host_vertices:
            a = inner_of[hv]
            H, sH, tH = ey[a]
            base_index[hv] = len(decs)
            local = 0
            for comp_decs in H.decorations:
                for d in comp_decs:
                    assignment[len(decs)] = (a, local)
                    decs.append(d)
                    local += 1

        def inner_flat(hv: tuple[int, int], ici: int, ivi: int) -> int:
            H = ey[inner_of[hv]][0]
            off = base_index[hv]
            for c2 in range(ici):
                off += len(H.decorations[c2])
            return off + ivi

        def inner_out_attach(hv: tuple[int, int], port: int) -> tuple[int, int]:
            """Raw vertex and port producing element-output ``port`` of the inner entry."""
            H, sH, _ = ey[inner_of[hv]]
            leg = sH.inverse()(port)
            pos = 0
            for ici, comp in enumerate(H.graph.components):
                if leg < pos + len(comp.outputs):
                    v, p = comp.outputs[leg - pos]
                    return inner_flat(hv, ici, v), p
                pos += len(comp.outputs)
            raise IndexError

        def inner_in_attach(hv: tuple[int, int], port: int) -> tuple[int, int]:
            H, _, tH = ey[inner_of[hv]]
            leg = tH(port)
            pos = 0
            for ici, comp in enumerate(H.graph.components):
                if leg < pos + len(comp.inputs):
                    v, p = comp.inputs[leg - pos]
                    return inner_flat(hv, ici, v), p
                pos += len(comp.inputs)
            raise IndexError

        edges: list[tuple[int, int, int, int, Any]] = []
        ins: list[tuple] = []
        outs: list[tuple] = []
        # inner wiring
        for hv in host_vertices:
            a = inner_of[hv]
            H = ey[a][0]
            for ici, comp in enumerate(H.graph.components):
                for (edge, col) in zip(comp.edges, H.edge_colors[ici]):
                    sv, sp, dv, dp = edge
                    edges.append((inner_flat(hv, ici, sv), sp, inner_flat(hv, ici, dv), dp, col))
        # host wiring through the entry boundaries
        for ci, comp in enumerate(G.graph.components):
            if comp.formal:
                raise PropError("slice entries cannot contain formal components")
            for (edge, col) in zip(comp.edges, G.edge_colors[ci]):
                sv, sp, dv, dp = edge
                src = inner_out_attach((ci, sv), sp)
                dst = inner_in_attach((ci, dv), dp)
                edges.append((src[0], src[1], dst[0], dst[1], col))
            for (v, p) in comp.inputs:
                dst = inner_in_attach((ci, v), p)
                ins.append(("v", dst[0], dst[1]))
            for (v, p) in comp.outputs:
                src = inner_out_attach((ci, v), p)
                outs.append(("v", src[0], src[1]))
        raw = {"decs": decs, "edges": edges, "ins": ins, "outs": outs, "thru_colors": {}}
        return raw, assignment

    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        self._pre_biact(sigma, x, tau)
        ex, sx, tx = self.parts(x)
        return self.make(ex, sigma.compose(sx), tx.compose(tau))

    def unit_single(self, c: Any) -> PropElement:
        self.check_color(c)
        entry, prov = make_entry(self.base, unit_graph(self.base, c), Perm.identity(len(c.out_profile)), Perm.identity(len(c.in_profile)))
        return self.make((entry,), Perm.identity(1), Perm(tuple(prov)).inverse())


def slice_prop(base: PropImpl) -> SliceProp:
    return SliceProp(base)


def unit_graph(base: PropImpl, alpha: PropElement) -> DecoratedGraph:
    """The one-vertex decorated graph of an element, legs in natural order."""
    base.check_owned(alpha)
    comp = single_vertex_component(len(alpha.in_profile), len(alpha.out_profile))
    return decorate(MNGraph((comp,)), [[alpha]])


def circ_graph(base: PropImpl, alpha: PropElement, beta: PropElement) -> DecoratedGraph:
    """Two-vertex chain: beta feeding alpha, the shape of a vertical reduction."""
    base.check_owned(alpha)
    base.check_owned(beta)
    if enc(alpha.in_profile) != enc(beta.out_profile):
        raise CompositionError("circ needs composable elements")
    k = len(alpha.in_profile)
    comp = Component(
        ((k, len(alpha.out_profile)), (len(beta.in_profile), k)),
        tuple((1, p, 0, p) for p in range(k)),
        tuple((1, p) for p in range(len(beta.in_profile))),
        tuple((0, p) for p in range(len(alpha.out_profile))),
    )
    return decorate(MNGraph((comp,)), [[alpha, beta]])


def make_special(P: PropImpl, kind: str, *args) -> PropElement:
    """The special slice elements whose faces drive the consistency diagrams."""
    S = SliceProp(P) if not isinstance(P, SliceProp) else P
    base = S.base
    if kind == "tensor":
        alpha, beta = args
        g1 = unit_graph(base, alpha)
        g2 = unit_graph(base, beta)
        merged = DecoratedGraph(
            MNGraph(g1.graph.components + g2.graph.components),
            g1.decorations + g2.decorations,
            g1.edge_colors + g2.edge_colors,
            g1.in_colors + g2.in_colors,
            g1.out_colors + g2.out_colors,
        )
        m = len(alpha.out_profile) + len(beta.out_profile)
        n = len(alpha.in_profile) + len(beta.in_profile)
        entry, prov = make_entry(base, merged, Perm.identity(m), Perm.identity(n))
        return S.make((entry,), Perm.identity(1), Perm(tuple(prov)).inverse())
    if kind == "circ":
        alpha, beta = args
        g = circ_graph(base, alpha, beta)
        entry, prov = make_entry(base, g, Perm.identity(len(alpha.out_profile)), Perm.identity(len(beta.in_profile)))
        return S.make((entry,), Perm.identity(1), Perm(tuple(prov)).inverse())
    if kind == "twisted_unit":
        sigma, alpha, tau = args
        if len(sigma) != len(alpha.out_profile) or len(tau) != len(alpha.in_profile):
            raise ArityError("twisted unit permutation sizes must match the element")
        entry, prov = make_entry(base, unit_graph(base, alpha), sigma, tau)
        return S.make((entry,), Perm.identity(1), Perm(tuple(prov)).inverse())
    raise PropError(f"unknown special kind {kind!r}")


def validate_slice_element(P: PropImpl, e: PropElement) -> Report:
    """Check the decoration-order and evaluation conditions of a slice element.

    ``P`` may be the slice PROP the element lives in or its base.
    """
    S = P if isinstance(P, SliceProp) and P.name == e.owner else SliceProp(P)
    base = S.base
    report = Report(subject="slice-element")
    if e.owner != S.name:
        report.add("owner", False, e.owner)
        return report
    entries, sigma, tau = S.parts(e)
    report.add("entry-count", len(entries) == len(e.out_profile), (len(entries), len(e.out_profile)))
    decs: list[PropElement] = []
    for j, (dg, sg, tg) in enumerate(entries):
        rep = validate_mn_graph(dg.graph)
        report.add(f"entry-{j + 1}:valid", rep.ok, rep.failures() or None)
        repd = validate_decoration(base, dg)
        report.add(f"entry-{j + 1}:decoration", repd.ok, repd.failures() or None)
        if rep.ok and repd.ok:
            ev = entry_ev(base, (dg, sg, tg))
            want = e.out_profile[sigma(j)]
            report.add(f"entry-{j + 1}:evaluation", ev == want, (ev, want))
        decs.extend(entry_slots((dg, sg, tg)))
    if len(tau) == len(decs) == len(e.in_profile):
        expected = profile_ract(tuple(decs), tau)
        report.add("decoration-order", enc(expected) == enc(e.in_profile), (expected, e.in_profile))
    else:
        report.add("decoration-order", False, "slot/profile count mismatch")
    return report


# ---------------------------------------------------------------------------
# Law-check sampler
# ---------------------------------------------------------------------------

class SliceSampler:
    """Yields composable slice elements built from units, specials, and twists.

    For iterated slices, pass ``base_sampler``/``base_feeder`` from the
    sampler one level down (profile-based sampling only works when the base
    PROP can enumerate its colors).
    """

    def __init__(
        self,
        S: SliceProp,
        base_colors: Sequence[Any] | None = None,
        max_width: int = 2,
        base_sampler: Callable[[random.Random], PropElement] | None = None,
    ):
        self.S = S
        self.base = S.base
        self.max_width = max_width
        self.base_sampler = base_sampler
        self.base_colors = list(base_colors if base_colors is not None else (self.base.colors or ()))
        if not self.base_colors and base_sampler is None:
            raise PropError("slice sampling needs base colors or a base sampler")

    def _base_elem(self, rng: random.Random) -> PropElement:
        if self.base_sampler is not None:
            return self.base_sampler(rng)
        while True:
            out_p = tuple(rng.choice(self.base_colors) for _ in range(rng.randint(1, self.max_width)))
            in_p = tuple(rng.choice(self.base_colors) for _ in range(rng.randint(1, self.max_width)))
            x = self.base.sample_element(out_p, in_p, rng)
            if x is not None:
                return x

    def _base_with_out(self, profile: Profile, rng: random.Random) -> PropElement | None:
        if self.base_colors:
            for _ in range(10):
                x = self.base.sample_element(
                    profile, tuple(rng.choice(self.base_colors) for _ in range(rng.randint(1, self.max_width))), rng
                )
                if x is not None:
                    return x
        if self.base.unital:
            return self.base.unit(profile)
        return None

    def element(self, rng: random.Random) -> PropElement:
        kind = rng.randrange(4)
        if kind == 0:
            return self.S.unit_single(self._base_elem(rng))
        if kind == 1:
            return make_special(self.S, "tensor", self._base_elem(rng), self._base_elem(rng))
        if kind == 2:
            a = self._base_elem(rng)
            b = self._base_with_out(a.in_profile, rng)
            if b is not None:
                return make_special(self.S, "circ", a, b)
            kind = 3
        a = self._base_elem(rng)
        s = Perm.random(len(a.out_profile), rng)
        t = Perm.random(len(a.in_profile), rng)
        return make_special(self.S, "twisted_unit", s, a, t)

    def elements(self, rng: random.Random, n: int) -> list[PropElement]:
        out = [self.element(rng) for _ in range(n)]
        for _ in range(n // 4):
            x, y = rng.choice(out), rng.choice(out)
            out.append(self.S.hcomp(x, y))
        for _ in range(n // 4):
            x = rng.choice(out)
            s = Perm.random(len(x.out_profile), rng)
            t = Perm.random(len(x.in_profile), rng)
            out.append(self.S.biact(s, x, t))
        return out[:n] if len(out) > n else out

    def layer_on(self, profile: Profile, rng: random.Random) -> PropElement:
        """A random slice element whose in-profile is exactly ``profile``."""
        pieces: list[PropElement] = []
        i = 0
        while i < len(profile):
            alpha = profile[i]
            choices = ["unit", "twist"]
            if i + 1 < len(profile):
                choices.append("tensor")
            pick = rng.choice(choices)
            if pick == "unit":
                pieces.append(self.S.unit_single(alpha))
                i += 1
            elif pick == "twist":
                s = Perm.random(len(alpha.out_profile), rng)
                t = Perm.random(len(alpha.in_profile), rng)
                pieces.append(make_special(self.S, "twisted_unit", s, alpha, t))
                i += 1
            else:
                pieces.append(make_special(self.S, "tensor", alpha, profile[i + 1]))
                i += 2
        layer = reduce(self.S.hcomp, pieces)
        if rng.random() < 0.5:
            layer = self.S.biact(Perm.random(len(layer.out_profile), rng), layer, Perm.identity(len(layer.in_profile)))
        return layer

    def vcomp_pairs(self, rng: random.Random, n: int) -> list[tuple[PropElement, PropElement]]:
        out = []
        for _ in range(n):
            y = self.element(rng)
            out.append((self.layer_on(y.out_profile, rng), y))
        return out

    def vcomp_triples(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        out = []
        for _ in range(n):
            z = self.element(rng)
            y = self.layer_on(z.out_profile, rng)
            x = self.layer_on(y.out_profile, rng)
            out.append((x, y, z))
        return out

    def interchange_quads(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        pairs = self.vcomp_pairs(rng, 2 * n)
        return [(pairs[i][0], pairs[i][1], pairs[i + 1][0], pairs[i + 1][1]) for i in range(0, len(pairs) - 1, 2)]


# ---------------------------------------------------------------------------
# The integration/differentiation correspondence
# ---------------------------------------------------------------------------

@dataclass
class PropOverP:
    """A PROP over P: an element-level map preserving all structure."""

    source: PropImpl
    target: PropImpl
    fn: Callable[[PropElement], PropElement]
    name: str = "over"

    def as_prop_map(self) -> PropMap:
        return PropMap(self.source, self.target, self.fn, self.name)

    def __call__(self, x: PropElement) -> PropElement:
        return self.as_prop_map()(x)


class IntegratedProp(PropImpl):
    """The PROP assembled from a finitely supported slice algebra.

    The component at (d; c) is the disjoint union of the algebra fibers over
    all supported base elements with that profile pair; operations act
    through the structure maps of the special slice elements.
    """

    def __init__(self, algebra: PropAlgebra, name: str | None = None):
        S = algebra.prop
        if not isinstance(S, SliceProp):
            raise PropError("integrate expects an algebra over a slice PROP")
        self.algebra = algebra
        self.S = S
        self.base = S.base
        self.unital = False
        self.name = name or f"int({algebra.name})"
        self._support = [c for c in algebra.carrier.colors() if algebra.carrier.fiber(c)]

    @property
    def colors(self) -> tuple[Any, ...] | None:
        return self.base.colors

    def is_color(self, c: Any) -> bool:
        return self.base.is_color(c)

    def _mk(self, alpha: PropElement, a: Any) -> PropElement:
        return PropElement(self.name, alpha.out_profile, alpha.in_profile, ("fib", canon(alpha), a))

    def fiber_of(self, x: PropElement) -> tuple[PropElement, Any]:
        _, alpha_tree, a = x.payload
        for c in self._support:
            if canon(c) == alpha_tree:
                return c, a
        raise PropError(f"element {x!r} has no supported base color")

    def elements(self) -> list[PropElement]:
        out = []
        for alpha in self._support:
            for a in self.algebra.carrier.fiber(alpha):
                out.append(self._mk(alpha, a))
        return sorted(out, key=lambda e: e.enc)

    def contains(self, x: PropElement) -> bool:
        if x.owner != self.name:
            return False
        try:
            alpha, a = self.fiber_of(x)
        except PropError:
            return False
        return a in self.algebra.carrier.fiber(alpha)

    def component(self, out_p, in_p) -> list[PropElement]:
        key = (enc(tuple(out_p)), enc(tuple(in_p)))
        out = []
        for alpha in self._support:
            if (enc(alpha.out_profile), enc(alpha.in_profile)) == key:
                out.extend(self._mk(alpha, a) for a in self.algebra.carrier.fiber(alpha))
        return sorted(out, key=lambda e: e.enc)

    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement | None:
        comp = self.component(out_p, in_p)
        return rng.choice(comp) if comp else None

    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_hcomp(x, y)
        (alpha, a), (beta, b) = self.fiber_of(x), self.fiber_of(y)
        theta = make_special(self.S, "tensor", alpha, beta)
        (result,) = self.algebra.apply(theta, (a, b))
        return self._mk(self.base.hcomp(alpha, beta), result)

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_vcomp(x, y)
        (alpha, a), (beta, b) = self.fiber_of(x), self.fiber_of(y)
        theta = make_special(self.S, "circ", alpha, beta)
        (result,) = self.algebra.apply(theta, (a, b))
        return self._mk(self.base.vcomp(alpha, beta), result)

    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        self._pre_biact(sigma, x, tau)
        alpha, a = self.fiber_of(x)
        theta = make_special(self.S, "twisted_unit", sigma, alpha, tau)
        (result,) = self.algebra.apply(theta, (a,))
        return self._mk(self.base.biact(sigma, alpha, tau), result)

    def projection(self) -> PropOverP:
        def fn(x: PropElement) -> PropElement:
            alpha, _ = self.fiber_of(x)
            return alpha

        return PropOverP(self, self.base, fn, name=f"{self.name}->{self.base.name}")


def integrate(algebra: PropAlgebra) -> IntegratedProp:
    """Assemble the PROP over P encoded by a finitely supported slice algebra."""
    return IntegratedProp(algebra)


def differentiate(over: PropOverP, elements: Sequence[PropElement] | None = None) -> PropAlgebra:
    """The slice algebra of a PROP over P: fibers with decoration-replacement actions.

    ``elements`` enumerates the (finite) part of the source PROP to fiber;
    when omitted, the source must expose ``elements()`` (finite tables do).
    """
    Q, P = over.source, over.target
    S = SliceProp(P)
    if elements is None:
        lister = getattr(Q, "elements", None)
        if not callable(lister):
            raise PropError("differentiate needs an explicit element list for this source PROP")
        elements = lister()
    fibers: dict[PropElement, list[Any]] = {}
    elem_by_key: dict[tuple, PropElement] = {}
    for q in elements:
        alpha = over(q)
        fibers.setdefault(alpha, []).append(q.payload)
        elem_by_key[(enc(alpha), enc(canon(q.payload)))] = q
    carrier = GradedSet.from_dict(fibers)

    def act(theta: PropElement, args: tuple[Any, ...]) -> tuple[Any, ...]:
        entries, sigma, tau = S.parts(theta)
        tau_inv = tau.inverse()
        evs = []
        global_slot = 0
        for (dg, sg, tg) in entries:
            new_decs = []
            for comp_decs in dg.decorations:
                row = []
                for _d in comp_decs:
                    a = tau_inv(global_slot)
                    q = elem_by_key.get((enc(theta.in_profile[a]), enc(canon(args[a]))))
                    if q is None:
                        raise PropError(f"argument {args[a]!r} is not in the fiber over {theta.in_profile[a]!r}")
                    row.append(q)
                    global_slot += 1
                new_decs.append(tuple(row))
            replaced = DecoratedGraph(dg.graph, tuple(new_decs), dg.edge_colors, dg.in_colors, dg.out_colors)
            evs.append(entry_ev(Q, (replaced, sg, tg)))
        # output position i receives the evaluation of the entry mapped to it
        sigma_inv = sigma.inverse()
        return tuple(evs[sigma_inv(i)].payload for i in range(len(evs)))

    return PropAlgebra(S, carrier, act, name=f"d({over.name})")
