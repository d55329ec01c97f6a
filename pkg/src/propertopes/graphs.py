"""Directed acyclic port graphs, decorations, evaluation, and substitution.

An (m,n)-graph is a finite wheel-free directed graph whose vertices carry
ordered in-ports and out-ports, with n dangling input legs and m dangling
output legs.  Connected components, vertices, inputs, and outputs are all
labeled consecutively from 1 inside each component; labels are positions in
the stored tuples, so the encoding is rigid: two labeled graphs are
isomorphic exactly when their canonical encodings coincide.

Evaluation contracts a graph decorated by PROP elements down to a single
element: vertices are grouped into layers by longest-path depth, wires that
cross a layer become formal identities, the crossings between consecutive
layers become interface permutations, and the whole stack is composed with
a final output/input twist read off the leg labels.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import reduce
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
)
from .perms import Perm, block_sum

# endpoint encodings inside one component:
#   ("v", vertex_index, port_index)  -- 0-based
#   ("in", leg_index) / ("out", leg_index)


@dataclass(frozen=True)
class Component:
    """One connected piece: vertices with port counts, internal edges, legs.

    ``inputs[l]`` is the (vertex, in_port) fed by input leg l; ``outputs[l]``
    the (vertex, out_port) draining to output leg l.  A *formal* component
    has no vertices and a single wire from its input leg to its output leg;
    formal components only appear inside free-PROP elements, where they play
    the role of identity wires.
    """

    vertex_ports: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int, int, int], ...]  # (src_v, src_port, dst_v, dst_port)
    inputs: tuple[tuple[int, int] | None, ...]  # None target marks the formal wire
    outputs: tuple[tuple[int, int] | None, ...]
    formal: bool = False

    def canon_tree(self) -> Any:
        return ("comp", self.vertex_ports, tuple(sorted(self.edges)), self.inputs, self.outputs, self.formal)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ports)


@dataclass(frozen=True)
class MNGraph:
    components: tuple[Component, ...]

    def canon_tree(self) -> Any:
        return ("graph", tuple(canon(c) for c in self.components))

    @property
    def n_inputs(self) -> int:
        return sum(len(c.inputs) for c in self.components)

    @property
    def n_outputs(self) -> int:
        return sum(len(c.outputs) for c in self.components)

    def vertices(self) -> list[tuple[int, int]]:
        """Global vertex slots in (component, vertex) label order."""
        return [(ci, vi) for ci, c in enumerate(self.components) for vi in range(c.n_vertices)]


def formal_component() -> Component:
    return Component((), (), (None,), (None,), formal=True)


def single_vertex_component(n_in: int, n_out: int) -> Component:
    """The one-vertex component with legs attached to ports in order."""
    return Component(
        ((n_in, n_out),),
        (),
        tuple((0, p) for p in range(n_in)),
        tuple((0, p) for p in range(n_out)),
    )


def make_graph(components: Sequence[Component]) -> MNGraph:
    return MNGraph(tuple(components))


def canonicalize(g: MNGraph) -> MNGraph:
    """Normal form of the encoding: edge lists sorted; labels untouched.

    Idempotent; two encodings of the same labeled graph collide, and distinct
    labeled graphs stay distinct (labels are data, not up-to-iso choices).
    """
    return MNGraph(
        tuple(
            Component(c.vertex_ports, tuple(sorted(c.edges)), c.inputs, c.outputs, c.formal)
            for c in g.components
        )
    )


def validate_mn_graph(g: MNGraph, allow_formal: bool = False) -> Report:
    """Check the defining conditions of an (m,n)-graph, reporting violations."""
    report = Report(subject="mn-graph")
    ok_nonempty = len(g.components) > 0
    report.add("non-empty", ok_nonempty, None if ok_nonempty else "graph has zero components")
    for ci, c in enumerate(g.components):
        loc = f"component {ci + 1}"
        if c.formal:
            report.add(
                "formal-component",
                allow_formal and c.inputs == (None,) and c.outputs == (None,),
                loc,
            )
            continue
        report.add(f"{loc}: has-vertex", c.n_vertices >= 1, loc)
        for vi, (n_in, n_out) in enumerate(c.vertex_ports):
            if n_in < 1 or n_out < 1:
                report.add("vertex-port-counts", False, f"{loc} vertex {vi + 1}")
        # each port wired exactly once
        in_seen: dict[tuple[int, int], int] = {}
        out_seen: dict[tuple[int, int], int] = {}
        for (sv, sp, dv, dp) in c.edges:
            out_seen[(sv, sp)] = out_seen.get((sv, sp), 0) + 1
            in_seen[(dv, dp)] = in_seen.get((dv, dp), 0) + 1
        for li, tgt in enumerate(c.inputs):
            if tgt is None:
                report.add("input-leg-target", False, f"{loc} input {li + 1}")
                continue
            in_seen[tgt] = in_seen.get(tgt, 0) + 1
        for li, src in enumerate(c.outputs):
            if src is None:
                report.add("output-leg-source", False, f"{loc} output {li + 1}")
                continue
            out_seen[src] = out_seen.get(src, 0) + 1
        wired_ok = True
        for vi, (n_in, n_out) in enumerate(c.vertex_ports):
            for p in range(n_in):
                if in_seen.get((vi, p), 0) != 1:
                    wired_ok = False
                    report.add("in-port-wiring", False, f"{loc} vertex {vi + 1} in-port {p + 1}")
            for p in range(n_out):
                if out_seen.get((vi, p), 0) != 1:
                    wired_ok = False
                    report.add("out-port-wiring", False, f"{loc} vertex {vi + 1} out-port {p + 1}")
        bad_ref = any(
            not (0 <= sv < c.n_vertices and 0 <= dv < c.n_vertices) for (sv, sp, dv, dp) in c.edges
        )
        if bad_ref:
            report.add("edge-endpoints", False, loc)
            continue
        # acyclicity by topological sort over vertices
        succ: dict[int, set[int]] = {v: set() for v in range(c.n_vertices)}
        indeg = {v: 0 for v in range(c.n_vertices)}
        for (sv, _, dv, _) in c.edges:
            if dv not in succ[sv]:
                succ[sv].add(dv)
                indeg[dv] += 1
        frontier = [v for v in range(c.n_vertices) if indeg[v] == 0]
        seen = 0
        while frontier:
            v = frontier.pop()
            seen += 1
            for w in sorted(succ[v]):
                indeg[w] -= 1
                if indeg[w] == 0:
                    frontier.append(w)
        report.add(f"{loc}: no-wheels", seen == c.n_vertices, None if seen == c.n_vertices else loc)
        # connectivity (legs and edges as undirected adjacency)
        if c.n_vertices > 0 and wired_ok and seen == c.n_vertices:
            adj: dict[int, set[int]] = {v: set() for v in range(c.n_vertices)}
            for (sv, _, dv, _) in c.edges:
                adj[sv].add(dv)
                adj[dv].add(sv)
            comp_seen = {0}
            stack = [0]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in comp_seen:
                        comp_seen.add(w)
                        stack.append(w)
            report.add(f"{loc}: connected", len(comp_seen) == c.n_vertices, loc)
    return report


# ---------------------------------------------------------------------------
# Decorated graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecoratedGraph:
    """An (m,n)-graph with PROP elements on vertices and colors on all wires.

    ``edge_colors[ci]`` is parallel to the component's (sorted) edge tuple,
    ``in_colors``/``out_colors`` are parallel to the leg tuples.  For formal
    components the single wire color is ``in_colors[ci][0]``.
    """

    graph: MNGraph
    decorations: tuple[tuple[PropElement, ...], ...]
    edge_colors: tuple[tuple[Any, ...], ...]
    in_colors: tuple[tuple[Any, ...], ...]
    out_colors: tuple[tuple[Any, ...], ...]

    def canon_tree(self) -> Any:
        return (
            "dgraph",
            canon(self.graph),
            canon(self.decorations),
            canon(self.edge_colors),
            canon(self.in_colors),
            canon(self.out_colors),
        )

    @property
    def in_profile(self) -> Profile:
        return tuple(c for cols in self.in_colors for c in cols)

    @property
    def out_profile(self) -> Profile:
        return tuple(c for cols in self.out_colors for c in cols)

    def decoration(self, ci: int, vi: int) -> PropElement:
        return self.decorations[ci][vi]

    def vertex_slots(self) -> list[PropElement]:
        return [self.decorations[ci][vi] for ci, vi in self.graph.vertices()]


def decorate(graph: MNGraph, decorations: Sequence[Sequence[PropElement]]) -> DecoratedGraph:
    """Attach vertex decorations and infer all wire colors from their profiles.

    Raises ``ColorError`` when two ports sharing a wire disagree, which is the
    color-matching condition in constructive form.
    """
    graph = canonicalize(graph)
    edge_colors: list[tuple[Any, ...]] = []
    in_colors: list[tuple[Any, ...]] = []
    out_colors: list[tuple[Any, ...]] = []
    for ci, c in enumerate(graph.components):
        if c.formal:
            raise ColorError("formal components need explicit colors; use decorate_with_colors")
        decs = tuple(decorations[ci])
        if len(decs) != c.n_vertices:
            raise ArityError(f"component {ci + 1}: {len(decs)} decorations for {c.n_vertices} vertices")
        for vi, (n_in, n_out) in enumerate(c.vertex_ports):
            d = decs[vi]
            if len(d.in_profile) != n_in or len(d.out_profile) != n_out:
                raise ArityError(
                    f"component {ci + 1} vertex {vi + 1}: decoration arity {d.arity} "
                    f"does not match ports ({n_out},{n_in})"
                )
        ecs = []
        for (sv, sp, dv, dp) in c.edges:
            src_color = decs[sv].out_profile[sp]
            dst_color = decs[dv].in_profile[dp]
            if enc(src_color) != enc(dst_color):
                raise ColorError(
                    f"component {ci + 1}: edge {(sv + 1, sp + 1)}->{(dv + 1, dp + 1)} "
                    f"joins colors {src_color!r} and {dst_color!r}"
                )
            ecs.append(src_color)
        edge_colors.append(tuple(ecs))
        in_colors.append(tuple(decs[v].in_profile[p] for (v, p) in c.inputs))
        out_colors.append(tuple(decs[v].out_profile[p] for (v, p) in c.outputs))
    return DecoratedGraph(graph, tuple(tuple(d) for d in decorations), tuple(edge_colors), tuple(in_colors), tuple(out_colors))


def decorate_with_colors(
    graph: MNGraph,
    decorations: Sequence[Sequence[PropElement]],
    formal_colors: dict[int, Any] | None = None,
) -> DecoratedGraph:
    """Like ``decorate`` but allowing formal components with explicit colors."""
    formal_colors = formal_colors or {}
    non_formal = decorate(
        MNGraph(tuple(c for c in graph.components if not c.formal)),
        [d for c, d in zip(graph.components, decorations) if not c.formal],
    ) if any(not c.formal for c in graph.components) else None
    edge_colors: list[tuple] = []
    in_colors: list[tuple] = []
    out_colors: list[tuple] = []
    decs: list[tuple] = []
    j = 0
    for ci, c in enumerate(graph.components):
        if c.formal:
            if ci not in formal_colors:
                raise ColorError(f"formal component {ci + 1} needs a color")
            col = formal_colors[ci]
            edge_colors.append(())
            in_colors.append((col,))
            out_colors.append((col,))
            decs.append(())
        else:
            assert non_formal is not None
            edge_colors.append(non_formal.edge_colors[j])
            in_colors.append(non_formal.in_colors[j])
            out_colors.append(non_formal.out_colors[j])
            decs.append(non_formal.decorations[j])
            j += 1
    return DecoratedGraph(canonicalize(graph), tuple(decs), tuple(edge_colors), tuple(in_colors), tuple(out_colors))


def validate_decoration(prop: PropImpl, dg: DecoratedGraph, allow_formal: bool = False) -> Report:
    """Check color-matching per port plus ownership of every decoration."""
    report = Report(subject="decoration")
    base = validate_mn_graph(dg.graph, allow_formal=allow_formal)
    report.checks.extend(base.checks)
    for ci, c in enumerate(dg.graph.components):
        if c.formal:
            ok = prop.is_color(dg.in_colors[ci][0]) and enc(dg.in_colors[ci][0]) == enc(dg.out_colors[ci][0])
            report.add("formal-wire-color", ok, f"component {ci + 1}")
            continue
        loc = f"component {ci + 1}"
        decs = dg.decorations[ci]
        if len(decs) != c.n_vertices:
            report.add("decoration-count", False, loc)
            continue
        in_color: dict[tuple[int, int], Any] = {}
        out_color: dict[tuple[int, int], Any] = {}
        for (edge, col) in zip(c.edges, dg.edge_colors[ci]):
            sv, sp, dv, dp = edge
            out_color[(sv, sp)] = col
            in_color[(dv, dp)] = col
        for li, tgt in enumerate(c.inputs):
            in_color[tgt] = dg.in_colors[ci][li]
        for li, src in enumerate(c.outputs):
            out_color[src] = dg.out_colors[ci][li]
        for vi, d in enumerate(decs):
            if d.owner != prop.name:
                report.add("decoration-owner", False, f"{loc} vertex {vi + 1}")
                continue
            got_in = tuple(in_color.get((vi, p)) for p in range(c.vertex_ports[vi][0]))
            got_out = tuple(out_color.get((vi, p)) for p in range(c.vertex_ports[vi][1]))
            for p, (have, want) in enumerate(zip(got_in, d.in_profile)):
                report.add(
                    "color-matching-in",
                    have is not None and enc(have) == enc(want),
                    f"{loc} vertex {vi + 1} in-port {p + 1}",
                )
            for p, (have, want) in enumerate(zip(got_out, d.out_profile)):
                report.add(
                    "color-matching-out",
                    have is not None and enc(have) == enc(want),
                    f"{loc} vertex {vi + 1} out-port {p + 1}",
                )
    return report


# ---------------------------------------------------------------------------
# Level decomposition and evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelDecomposition:
    """Layers of one connected component plus all interface permutations.

    Each layer entry is ``("v", vertex_index)`` or ``("id", color)``; the
    element of layer k is the tensor of its entries.  The evaluation of the
    component is ``top . [L_D o (tw_{D-1} . L_{D-1}) o ... o (tw_1 . L_1)] . bottom``
    where ``tw_k`` is the interface permutation folded as a left twist on
    layer k.
    """

    layers: tuple[tuple[tuple[str, Any], ...], ...]
    interfaces: tuple[Perm, ...]  # between layer k and k+1, folded onto layer k
    top: Perm
    bottom: Perm


def _component_wires(c: Component) -> dict[str, Any]:
    """Wire table of a component: each wire has a source and a dest endpoint."""
    wires = []
    for li, tgt in enumerate(c.inputs):
        wires.append((("in", li), ("v", *tgt)))
    for (sv, sp, dv, dp) in c.edges:
        wires.append((("v", sv, sp), ("v", dv, dp)))
    for li, src in enumerate(c.outputs):
        wires.append((("v", *src), ("out", li)))
    by_source = {w[0]: i for i, w in enumerate(wires)}
    by_dest = {w[1]: i for i, w in enumerate(wires)}
    return {"wires": wires, "by_source": by_source, "by_dest": by_dest}


def _vertex_depths(c: Component) -> list[int]:
    depth = [0] * c.n_vertices
    preds: dict[int, list[int]] = {v: [] for v in range(c.n_vertices)}
    for (sv, _, dv, _) in c.edges:
        preds[dv].append(sv)
    order: list[int] = []
    state = [0] * c.n_vertices

    def visit(v: int) -> None:
        stack = [(v, iter(preds[v]))]
        state[v] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for w in it:
                if state[w] == 0:
                    state[w] = 1
                    stack.append((w, iter(preds[w])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                state[node] = 2
                order.append(node)

    for v in range(c.n_vertices):
        if state[v] == 0:
            visit(v)
    for v in order:
        depth[v] = 1 + max((depth[w] for w in preds[v]), default=0)
    return depth


def level_decompose(
    dg: DecoratedGraph,
    ci: int = 0,
    leveling: Sequence[int] | None = None,
    entry_orders: Sequence[Sequence[int]] | None = None,
) -> LevelDecomposition:
    """Layer one connected component; the default uses longest-path depths.

    ``leveling`` may assign any strictly edge-increasing levels; with
    ``entry_orders`` it overrides the within-layer order (indices into the
    default entry list of each layer).  Alternate layouts must evaluate to the
    same element; that invariance is what licenses the default choice.
    """
    c = dg.graph.components[ci]
    if c.formal:
        raise PropError("formal components are not decomposable")
    depth = list(leveling) if leveling is not None else _vertex_depths(c)
    for (sv, _, dv, _) in c.edges:
        if depth[sv] >= depth[dv]:
            raise PropError("leveling must strictly increase along edges")
    n_levels = max(depth)
    wt = _component_wires(c)
    wires = wt["wires"]

    def wire_dest_level(wi: int) -> int:
        dest = wires[wi][1]
        return depth[dest[1]] if dest[0] == "v" else n_levels + 1

    # cut 0: input legs in label order
    cut: list[int] = [wt["by_source"][("in", li)] for li in range(len(c.inputs))]
    layers: list[tuple[tuple[str, Any], ...]] = []
    interfaces: list[Perm] = []
    bottom: Perm | None = None
    for level in range(1, n_levels + 1):
        verts = [v for v in range(c.n_vertices) if depth[v] == level]
        passes = [wi for wi in cut if wire_dest_level(wi) > level]
        if level == 1:
            entries: list[tuple[str, Any]] = [("v", v) for v in sorted(verts)]
            entries += [("id", wi) for wi in sorted(passes, key=cut.index)]
        else:
            keyed: list[tuple[int, tuple[str, Any]]] = []
            for v in verts:
                in_wires = [wt["by_dest"][("v", v, p)] for p in range(c.vertex_ports[v][0])]
                keyed.append((min(cut.index(w) for w in in_wires), ("v", v)))
            for wi in passes:
                keyed.append((cut.index(wi), ("id", wi)))
            entries = [e for _, e in sorted(keyed, key=lambda t: t[0])]
        if entry_orders is not None:
            order = entry_orders[level - 1]
            entries = [entries[i] for i in order]
        # in-wires of this layer, per entry
        layer_in: list[int] = []
        for kind, val in entries:
            if kind == "v":
                layer_in.extend(wt["by_dest"][("v", val, p)] for p in range(c.vertex_ports[val][0]))
            else:
                layer_in.append(val)
        connection = Perm(tuple(cut.index(wi) for wi in layer_in))
        if level == 1:
            # sigma_2 sends leg label p to the position of leg p in the layer-1 input order
            bottom = connection.inverse()
        else:
            interfaces.append(connection.inverse())
        # store entries with colors for identities
        stored: list[tuple[str, Any]] = []
        layer_out: list[int] = []
        for kind, val in entries:
            if kind == "v":
                stored.append(("v", val))
                layer_out.extend(wt["by_source"][("v", val, p)] for p in range(c.vertex_ports[val][1]))
            else:
                color = _wire_color(dg, ci, wires[val])
                stored.append(("id", color))
                layer_out.append(val)
        layers.append(tuple(stored))
        cut = layer_out
    # top twist: position of output leg l in the final cut
    top = Perm(tuple(cut.index(wt["by_dest"][("out", li)]) for li in range(len(c.outputs)))).inverse()
    assert bottom is not None
    return LevelDecomposition(tuple(layers), tuple(interfaces), top, bottom)


def _wire_color(dg: DecoratedGraph, ci: int, wire) -> Any:
    src, dest = wire
    c = dg.graph.components[ci]
    if src[0] == "in":
        return dg.in_colors[ci][src[1]]
    if dest[0] == "out":
        return dg.out_colors[ci][dest[1]]
    # internal edge: look it up by endpoints
    for (edge, col) in zip(c.edges, dg.edge_colors[ci]):
        if edge == (src[1], src[2], dest[1], dest[2]):
            return col
    raise PropError("wire not found")


def evaluate_component(
    prop: PropImpl,
    dg: DecoratedGraph,
    ci: int,
    leveling: Sequence[int] | None = None,
    entry_orders: Sequence[Sequence[int]] | None = None,
) -> PropElement:
    c = dg.graph.components[ci]
    if c.formal:
        return prop.unit_single(dg.in_colors[ci][0])
    dec = level_decompose(dg, ci, leveling, entry_orders)

    def layer_element(layer: tuple[tuple[str, Any], ...]) -> PropElement:
        elems = []
        for kind, val in layer:
            if kind == "v":
                elems.append(dg.decorations[ci][val])
            else:
                elems.append(prop.unit_single(val))
        return reduce(prop.hcomp, elems)

    elem = layer_element(dec.layers[-1])
    for k in range(len(dec.layers) - 2, -1, -1):
        lower = layer_element(dec.layers[k])
        tw = dec.interfaces[k]
        if not tw.is_identity():
            lower = prop.biact(tw, lower, Perm.identity(len(lower.in_profile)))
        elem = prop.vcomp(elem, lower)
    return prop.biact(dec.top, elem, dec.bottom)


def evaluate(
    prop: PropImpl,
    dg: DecoratedGraph,
    levelings: Sequence[Sequence[int] | None] | None = None,
    entry_orders: Sequence[Sequence[Sequence[int]] | None] | None = None,
) -> PropElement:
    """Contract a decorated graph to the element it denotes.

    Components are evaluated separately and tensored in label order.
    """
    parts = []
    for ci in range(len(dg.graph.components)):
        lv = levelings[ci] if levelings is not None else None
        eo = entry_orders[ci] if entry_orders is not None else None
        parts.append(evaluate_component(prop, dg, ci, lv, eo))
    return reduce(prop.hcomp, parts)


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def substitute(host: DecoratedGraph, ci: int, vi: int, inner: DecoratedGraph) -> DecoratedGraph:
    """Replace one vertex by a whole decorated graph, splicing ports in order."""
    return substitute_many(host, {(ci, vi): inner})


def substitute_many_with_map(
    host: DecoratedGraph, replacements: dict[tuple[int, int], DecoratedGraph]
) -> tuple[DecoratedGraph, list[tuple]]:
    """Like ``substitute_many`` but also reports vertex provenance.

    The second result lists, for every vertex slot of the output in
    (component, label) order, either ``("host", ci, vi)`` for a kept host
    vertex or ``("inner", ci, vi, ici, ivi)`` for a vertex contributed by the
    replacement at host vertex (ci, vi).
    """
    return _substitute_impl(host, replacements)


def substitute_many(host: DecoratedGraph, replacements: dict[tuple[int, int], DecoratedGraph]) -> DecoratedGraph:
    """Replace several vertices at once.

    Inner graphs keep their vertex order and take the place of the replaced
    vertex in the host's vertex order.  Substituting a disconnected inner
    graph can split a host component; the resulting connected pieces are
    re-labeled, ordered by their smallest constituent vertex (host order
    with inner vertices in place).  Inner formal components splice away into
    plain wires.  Boundary profiles of each inner graph must match the
    replaced decoration colorwise.
    """
    return _substitute_impl(host, replacements)[0]


def _substitute_impl(host: DecoratedGraph, replacements: dict[tuple[int, int], DecoratedGraph]) -> tuple[DecoratedGraph, list[tuple]]:
    for (ci, vi), inner in replacements.items():
        d = host.decorations[ci][vi]
        if enc(inner.out_profile) != enc(d.out_profile) or enc(inner.in_profile) != enc(d.in_profile):
            raise CompositionError(
                f"substitution boundary mismatch at component {ci + 1} vertex {vi + 1}"
            )

    def host_source(ci: int, vi: int, in_port: int):
        c = host.graph.components[ci]
        for (sv, sp, dv, dp) in c.edges:
            if (dv, dp) == (vi, in_port):
                return ("v", sv, sp)
        for li, tgt in enumerate(c.inputs):
            if tgt == (vi, in_port):
                return ("in", li)
        raise PropError("unwired in-port")

    def inner_leg_global(inner: DecoratedGraph, ici: int, li: int) -> int:
        pos = 0
        for k in range(ici):
            pos += len(inner.graph.components[k].inputs)
        return pos + li

    pieces: list[dict] = []  # accumulated new components across host components

    for ci, c in enumerate(host.graph.components):
        if c.formal:
            pieces.append(
                {
                    "ports": (),
                    "decs": (),
                    "edges": [],
                    "edge_cols": [],
                    "inputs": [(None, host.in_colors[ci][0])],
                    "outputs": [(None, host.out_colors[ci][0])],
                    "formal": True,
                    "provenance": [],
                }
            )
            continue

        # sites: kept host vertices and inner vertices, in host order with inner in place
        sites: list[tuple] = []
        for vi in range(c.n_vertices):
            if (ci, vi) in replacements:
                inner = replacements[(ci, vi)]
                for ici, icomp in enumerate(inner.graph.components):
                    for ivi in range(icomp.n_vertices):
                        sites.append(("inner", vi, ici, ivi))
            else:
                sites.append(("host", vi))
        site_index = {s: i for i, s in enumerate(sites)}

        def site_decoration(s: tuple) -> PropElement:
            if s[0] == "host":
                return host.decorations[ci][s[1]]
            _, vi, ici, ivi = s
            return replacements[(ci, vi)].decorations[ici][ivi]

        def resolve(src) -> tuple:
            """Final producer of a host endpoint: ("leg", li) or ("site", si, port)."""
            if src[0] == "in":
                return ("leg", src[1])
            vi, sp = src[1], src[2]
            if (ci, vi) not in replacements:
                return ("site", site_index[("host", vi)], sp)
            inner = replacements[(ci, vi)]
            pos = 0
            for ici, icomp in enumerate(inner.graph.components):
                if sp < pos + len(icomp.outputs):
                    li = sp - pos
                    if icomp.formal:
                        gi = inner_leg_global(inner, ici, 0)
                        return resolve(host_source(ci, vi, gi))
                    sv, spp = icomp.outputs[li]
                    return ("site", site_index[("inner", vi, ici, sv)], spp)
                pos += len(icomp.outputs)
            raise IndexError("inner output out of range")

        # wires: (source, dest) with source in {("leg", li), ("site", si, p)} and
        # dest in {("site", si, p), ("outleg", li)}
        wires: list[tuple[tuple, tuple, Any]] = []
        for s in sites:
            si = site_index[s]
            d = site_decoration(s)
            if s[0] == "host":
                vi = s[1]
                for p in range(len(d.in_profile)):
                    wires.append((resolve(host_source(ci, vi, p)), ("site", si, p), d.in_profile[p]))
            else:
                _, vi, ici, ivi = s
                inner = replacements[(ci, vi)]
                icomp = inner.graph.components[ici]
                for p in range(len(d.in_profile)):
                    src = None
                    for (sv, sp, dv, dp) in icomp.edges:
                        if (dv, dp) == (ivi, p):
                            src = ("site", site_index[("inner", vi, ici, sv)], sp)
                            break
                    if src is None:
                        for li, tgt in enumerate(icomp.inputs):
                            if tgt == (ivi, p):
                                gi = inner_leg_global(inner, ici, li)
                                src = resolve(host_source(ci, vi, gi))
                                break
                    if src is None:
                        raise PropError("unwired inner in-port")
                    wires.append((src, ("site", si, p), d.in_profile[p]))
        for li, hsrc in enumerate(c.outputs):
            got = resolve(("v", hsrc[0], hsrc[1]))
            if got[0] == "leg":
                raise PropError("substitution created a vertex-free wire; use free-PROP grafting")
            wires.append((got, ("outleg", li), host.out_colors[ci][li]))

        # connected pieces over sites
        adj: dict[int, set[int]] = {i: set() for i in range(len(sites))}
        for (src, dst, _) in wires:
            if src[0] == "site" and dst[0] == "site":
                adj[src[1]].add(dst[1])
                adj[dst[1]].add(src[1])
        piece_of: dict[int, int] = {}
        order: list[list[int]] = []
        for i in range(len(sites)):
            if i in piece_of:
                continue
            group = [i]
            piece_of[i] = len(order)
            stack = [i]
            while stack:
                v = stack.pop()
                for w in sorted(adj[v]):
                    if w not in piece_of:
                        piece_of[w] = len(order)
                        group.append(w)
                        stack.append(w)
            order.append(sorted(group))

        for group in order:
            local = {g: k for k, g in enumerate(group)}
            decs = tuple(site_decoration(sites[g]) for g in group)
            ports = tuple((len(d.in_profile), len(d.out_profile)) for d in decs)
            edges, edge_cols, inputs, in_cols, outputs, out_cols = [], [], [], [], [], []
            for (src, dst, col) in wires:
                anchor = src[1] if src[0] == "site" else dst[1]
                if piece_of[anchor] != piece_of[group[0]]:
                    continue
                if src[0] == "leg" and dst[0] == "site":
                    inputs.append((src[1], (local[dst[1]], dst[2]), col))
                elif src[0] == "site" and dst[0] == "outleg":
                    outputs.append((dst[1], (local[src[1]], src[2]), col))
                else:
                    edges.append((local[src[1]], src[2], local[dst[1]], dst[2]))
                    edge_cols.append(col)
            inputs.sort(key=lambda t: t[0])
            outputs.sort(key=lambda t: t[0])
            paired = sorted(zip(edges, edge_cols))
            provenance = []
            for g in group:
                s = sites[g]
                if s[0] == "host":
                    provenance.append(("host", ci, s[1]))
                else:
                    provenance.append(("inner", ci, s[1], s[2], s[3]))
            pieces.append(
                {
                    "ports": ports,
                    "decs": decs,
                    "edges": [e for e, _ in paired],
                    "edge_cols": [cc for _, cc in paired],
                    "inputs": [(t[1], t[2]) for t in inputs],
                    "outputs": [(t[1], t[2]) for t in outputs],
                    "formal": False,
                    "provenance": provenance,
                }
            )

    comps, decs_out, in_cols_out, out_cols_out, edge_cols_out = [], [], [], [], []
    provenance_flat: list[tuple] = []
    for p in pieces:
        comps.append(
            Component(
                p["ports"],
                tuple(p["edges"]),
                tuple(t[0] for t in p["inputs"]),
                tuple(t[0] for t in p["outputs"]),
                p["formal"],
            )
        )
        decs_out.append(p["decs"])
        in_cols_out.append(tuple(t[1] for t in p["inputs"]))
        out_cols_out.append(tuple(t[1] for t in p["outputs"]))
        edge_cols_out.append(tuple(p["edge_cols"]))
        provenance_flat.extend(p["provenance"])
    result = DecoratedGraph(
        MNGraph(tuple(comps)), tuple(decs_out), tuple(edge_cols_out), tuple(in_cols_out), tuple(out_cols_out)
    )
    return result, provenance_flat
