"""The free colored PROP on a finite set of generators.

Elements are canonical decorated graphs over generator tokens together with
an output/input permutation pair: the value is ``sigma . X . tau`` where X is
the element denoted by the graph with legs read in (component, label) order.
Units are formal edge-only components that dissolve when grafted, so the
construction adjoins units to the purely graphical (non-unital) part.

Canonical form: every component's legs are relabeled to attachment order
(in-legs sorted by target (vertex, port), out-legs by source), components are
sorted by their encodings, and both relabelings are folded into (sigma, tau);
among orderings of identical components the one with the least (sigma, tau)
encoding wins.  Composition inherits vertex order from the operands (upper
before lower, left before right), which keeps the PROP laws on the nose; the
law suite exercises this on random instances.
"""

from __future__ import annotations

import itertools
import random
from typing import Any, Sequence

from ._canon import canon, enc
from .core import (
    ArityError,
    ColorError,
    CompositionError,
    PropElement,
    PropError,
    PropImpl,
    Profile,
    check_profile,
    profile_act,
    profile_ract,
)
from .gcanon import canonical_expr, raw_from_decorated
from .graphs import Component, DecoratedGraph, MNGraph, formal_component, single_vertex_component
from .perms import Perm, block_sum


class FreeProp(PropImpl):
    def __init__(self, colors: Sequence[str], generators: dict[str, tuple[Sequence[str], Sequence[str]]], name: str | None = None):
        self._colors = tuple(sorted(set(colors)))
        self.generators = {
            g: (tuple(out_p), tuple(in_p)) for g, (out_p, in_p) in sorted(generators.items())
        }
        for g, (out_p, in_p) in self.generators.items():
            for c in tuple(out_p) + tuple(in_p):
                if c not in self._colors:
                    raise ColorError(f"generator {g!r} uses unknown color {c!r}")
            check_profile(out_p), check_profile(in_p)
        self.name = name or f"free[{','.join(self.generators)}]"
        self.gen_owner = self.name + ".gens"

    @property
    def colors(self) -> tuple[Any, ...]:
        return self._colors

    def is_color(self, c: Any) -> bool:
        return c in self._colors

    # ---- generator tokens -------------------------------------------------
    def gen_token(self, gname: str) -> PropElement:
        out_p, in_p = self.generators[gname]
        return PropElement(self.gen_owner, out_p, in_p, gname)

    def generator(self, gname: str) -> PropElement:
        """The free element of a generator: its one-vertex graph."""
        out_p, in_p = self.generators[gname]
        comp = single_vertex_component(len(in_p), len(out_p))
        dg = DecoratedGraph(
            MNGraph((comp,)),
            ((self.gen_token(gname),),),
            ((),),
            (tuple(in_p),),
            (tuple(out_p),),
        )
        return self._mk(dg, Perm.identity(len(out_p)), Perm.identity(len(in_p)))

    # ---- raw graphs and canonical form ------------------------------------
    # Raw expressions and their canonical forms are shared with slice
    # elements; see gcanon.  Elements store the canonical triple.

    def _raw_from(self, dg: DecoratedGraph) -> dict:
        return raw_from_decorated(dg)

    def _mk(self, dg_or_raw, sigma: Perm, tau: Perm) -> PropElement:
        if isinstance(dg_or_raw, DecoratedGraph):
            raw = self._raw_from(dg_or_raw)
        else:
            raw = dg_or_raw
        dg, sigma_total, tau_total, _prov = canonical_expr(raw, sigma, tau, self.name)
        out_p = profile_act(sigma_total, dg.out_profile)
        in_p = profile_ract(dg.in_profile, tau_total)
        return PropElement(self.name, out_p, in_p, ("free", dg, sigma_total, tau_total))

    @staticmethod
    def parts(x: PropElement) -> tuple[DecoratedGraph, Perm, Perm]:
        _, dg, sigma, tau = x.payload
        return dg, sigma, tau

    def element_from_graph(self, dg: DecoratedGraph) -> PropElement:
        """Interpret a token-decorated graph directly as a free element.

        In the free PROP, evaluation is normalization: the element denoted by
        a generator-decorated graph is the graph itself in canonical form.
        """
        for comp_decs in dg.decorations:
            for d in comp_decs:
                if d.owner != self.gen_owner:
                    raise ColorError(f"vertex decoration {d!r} is not a generator token of {self.name}")
        return self._mk(dg, Perm.identity(len(dg.out_profile)), Perm.identity(len(dg.in_profile)))

    def contains(self, x: PropElement) -> bool:
        if x.owner != self.name or not isinstance(x.payload, tuple) or x.payload[0] != "free":
            return False
        dg, sigma, tau = self.parts(x)
        try:
            return self._mk(dg, sigma, tau) == x
        except PropError:
            return False

    def component(self, out_p, in_p) -> None:
        return None  # not enumerable

    # ---- operations -------------------------------------------------------
    def hcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_hcomp(x, y)
        dgx, sx, tx = self.parts(x)
        dgy, sy, ty = self.parts(y)
        merged = DecoratedGraph(
            MNGraph(dgx.graph.components + dgy.graph.components),
            dgx.decorations + dgy.decorations,
            dgx.edge_colors + dgy.edge_colors,
            dgx.in_colors + dgy.in_colors,
            dgx.out_colors + dgy.out_colors,
        )
        return self._mk(merged, block_sum(sx, sy), block_sum(tx, ty))

    def vcomp(self, x: PropElement, y: PropElement) -> PropElement:
        self._pre_vcomp(x, y)
        dgx, sx, tx = self.parts(x)
        dgy, sy, ty = self.parts(y)
        pi = tx.compose(sy)
        rx = self._raw_from(dgx)
        ry = self._raw_from(dgy)
        # upper-before-lower vertex order: x vertices keep 0.., y vertices shifted
        offx = 0
        offy = len(rx["decs"])
        decs = list(rx["decs"]) + list(ry["decs"])
        edges = [(sv + offx, sp, dv + offx, dp, col) for (sv, sp, dv, dp, col) in rx["edges"]]
        edges += [(sv + offy, sp, dv + offy, dp, col) for (sv, sp, dv, dp, col) in ry["edges"]]
        thru_colors: dict[int, Any] = {}
        next_tid = 0

        def shift_spec(spec, off, thru_map):
            if spec[0] == "v":
                return ("v", spec[1] + off, spec[2])
            return ("thru", thru_map[spec[1]])

        # boundary: x input q consumes y output pi^-1(q)
        pi_inv = pi.inverse()
        x_in_specs = rx["ins"]
        y_out_specs = ry["outs"]
        y_in_specs = ry["ins"]
        x_out_specs = rx["outs"]

        # Each chain: y source --> x destination; both sides may be thru-wires.
        # y-source of wire q: source of y output pi_inv(q); if that's a y-thru,
        # the chain starts at the corresponding y input leg.
        new_ins: list[tuple] = []
        # map: y input leg index -> final spec (either feeds a vertex/x-thru or a new thru)
        final_in_spec: dict[int, tuple] = {}

        # resolve x-side: what does x input q feed? vertex port or x-thru -> x output leg
        def x_dest(q):
            spec = x_in_specs[q]
            if spec[0] == "v":
                return ("v", spec[1] + offx, spec[2])
            return ("xthru", spec[1])  # x formal wire id

        x_thru_out_leg = {}
        for leg, spec in enumerate(x_out_specs):
            if spec[0] == "thru":
                x_thru_out_leg[spec[1]] = leg

        def y_source(q):
            spec = y_out_specs[pi_inv(q)]
            if spec[0] == "v":
                return ("v", spec[1] + offy, spec[2])
            return ("ythru", spec[1])

        y_thru_in_leg = {}
        for leg, spec in enumerate(y_in_specs):
            if spec[0] == "thru":
                y_thru_in_leg[spec[1]] = leg

        # final outs: x outputs; x-thru outputs resolve through the boundary
        pending_out: list[tuple] = [None] * len(x_out_specs)
        in_source_for_leg: dict[int, tuple] = {}

        for q in range(len(x_in_specs)):
            src = y_source(q)
            dst = x_dest(q)
            if src[0] == "ythru":
                leg = y_thru_in_leg[src[1]]
                in_source_for_leg[leg] = dst
            elif dst[0] == "v":
                edges.append((src[1], src[2], dst[1], dst[2], _flat_in_color(dgx, q)))
            else:
                # vertex source into x formal wire: becomes the source of that x output leg
                pending_out[x_thru_out_leg[dst[1]]] = src

        for leg in range(len(y_in_specs)):
            spec = y_in_specs[leg]
            if spec[0] == "v":
                new_ins.append(("v", spec[1] + offy, spec[2]))
            else:
                dst = in_source_for_leg[leg]
                if dst[0] == "v":
                    new_ins.append(("v", dst[1], dst[2]))
                else:
                    # y leg chained through to an x output leg: true thru wire
                    tid = next_tid
                    next_tid += 1
                    thru_colors[tid] = _flat_in_color(dgy, leg)
                    new_ins.append(("thru", tid))
                    pending_out[x_thru_out_leg[dst[1]]] = ("thru", tid)

        new_outs: list[tuple] = []
        for leg, spec in enumerate(x_out_specs):
            if spec[0] == "v":
                new_outs.append(("v", spec[1] + offx, spec[2]))
            else:
                got = pending_out[leg]
                if got is None:
                    raise PropError("dangling formal wire in grafting")
                new_outs.append(got)

        raw = {"decs": decs, "edges": edges, "ins": new_ins, "outs": new_outs, "thru_colors": thru_colors}
        return self._mk(raw, sx, ty)

    def biact(self, sigma: Perm, x: PropElement, tau: Perm) -> PropElement:
        self._pre_biact(sigma, x, tau)
        dg, s0, t0 = self.parts(x)
        return self._mk(dg, sigma.compose(s0), t0.compose(tau))

    def unit_single(self, c: Any) -> PropElement:
        self.check_color(c)
        dg = DecoratedGraph(MNGraph((formal_component(),)), ((),), ((),), ((c,),), ((c,),))
        return self._mk(dg, Perm.identity(1), Perm.identity(1))

    def sample_element(self, out_p: Profile, in_p: Profile, rng: random.Random) -> PropElement | None:
        # used rarely; free components are searched by probing random builds
        for _ in range(30):
            x = self.random_element(rng, max_layers=2)
            if enc(x.out_profile) == enc(out_p) and enc(x.in_profile) == enc(in_p):
                return x
        return None

    # ---- random builders (for samplers and tests) --------------------------
    def random_layer_on(self, profile: Profile, rng: random.Random) -> PropElement:
        """A random element whose in-profile is exactly ``profile``."""
        pieces: list[PropElement] = []
        i = 0
        gens = list(self.generators)
        while i < len(profile):
            options: list[PropElement] = [self.unit_single(profile[i])]
            for g in gens:
                out_g, in_g = self.generators[g]
                k = len(in_g)
                if i + k <= len(profile) and enc(tuple(profile[i : i + k])) == enc(in_g):
                    options.append(self.generator(g))
            choice = rng.choice(options)
            pieces.append(choice)
            i += len(choice.in_profile)
        from functools import reduce

        layer = reduce(self.hcomp, pieces)
        sigma = Perm.random(len(layer.out_profile), rng)
        return self.biact(sigma, layer, Perm.identity(len(layer.in_profile)))

    def random_element(self, rng: random.Random, max_layers: int = 3) -> PropElement:
        profile = tuple(rng.choice(self._colors) for _ in range(rng.randint(1, 4)))
        elem = self.random_layer_on(profile, rng)
        for _ in range(rng.randint(0, max_layers - 1)):
            elem = self.vcomp(self.random_layer_on(elem.out_profile, rng), elem)
        return elem


def _flat_in_color(dg: DecoratedGraph, global_leg: int) -> Any:
    pos = 0
    for ci in range(len(dg.graph.components)):
        cols = dg.in_colors[ci]
        if global_leg < pos + len(cols):
            return cols[global_leg - pos]
        pos += len(cols)
    raise IndexError


def free_prop(colors: Sequence[str], generators: dict[str, tuple[Sequence[str], Sequence[str]]], name: str | None = None) -> FreeProp:
    """Free PROP on finitely many generators with declared profile pairs."""
    return FreeProp(colors, generators, name)


class FreeSampler:
    """Law-check sampler for free PROPs (components are not enumerable)."""

    def __init__(self, prop: FreeProp, max_layers: int = 2):
        self.prop = prop
        self.max_layers = max_layers

    def elements(self, rng: random.Random, n: int) -> list[PropElement]:
        return [self.prop.random_element(rng, self.max_layers) for _ in range(n)]

    def vcomp_chain(self, rng: random.Random, length: int) -> tuple[PropElement, ...]:
        chain = [self.prop.random_element(rng, self.max_layers)]
        for _ in range(length - 1):
            chain.insert(0, self.prop.random_layer_on(chain[0].out_profile, rng))
        return tuple(chain)

    def vcomp_pairs(self, rng: random.Random, n: int) -> list[tuple[PropElement, PropElement]]:
        out = []
        for _ in range(n):
            y = self.prop.random_element(rng, self.max_layers)
            x = self.prop.random_layer_on(y.out_profile, rng)
            out.append((x, y))
        return out

    def vcomp_triples(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        out = []
        for _ in range(n):
            z = self.prop.random_element(rng, self.max_layers)
            y = self.prop.random_layer_on(z.out_profile, rng)
            x = self.prop.random_layer_on(y.out_profile, rng)
            out.append((x, y, z))
        return out

    def interchange_quads(self, rng: random.Random, n: int) -> list[tuple[PropElement, ...]]:
        out = []
        pairs = self.vcomp_pairs(rng, 2 * n)
        for i in range(0, len(pairs) - 1, 2):
            (x1, x2), (y1, y2) = pairs[i], pairs[i + 1]
            out.append((x1, x2, y1, y2))
        return out
