"""JSON codecs for every file format the tools and tests exchange.

All encodings are canonical: keys sorted, sets as sorted arrays, labels and
permutations 1-based as in the written conventions, and byte-stable via
``dumps``.  Decoders validate against the target PROP and raise
``FormatError`` with a position note on malformed input.
"""

from __future__ import annotations

import json
from typing import Any

from ._canon import canon, enc
from .builtins import make_builtin
from .core import GradedSet, PropAlgebra, PropElement, PropError, PropImpl
from .facecat import Metagraph, Propertope, decode_metagraph, encode_metagraph, iterated
from .freeprop import free_prop
from .graphs import Component, DecoratedGraph, MNGraph
from .operads import AssociativeOperad, TableOperad, TerminalOperad, UnitOperad, operad_to_prop
from .perms import Perm
from .slices import SliceProp, make_entry, slice_prop


class FormatError(PropError):
    pass


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _tree_to_json(tree: Any) -> Any:
    if isinstance(tree, tuple):
        return [_tree_to_json(t) for t in tree]
    return tree


def _tree_from_json(data: Any) -> Any:
    if isinstance(data, list):
        return tuple(_tree_from_json(d) for d in data)
    return data


# ---------------------------------------------------------------------------
# Colors, elements
# ---------------------------------------------------------------------------

def colorset_to_json(colors) -> dict:
    return {"colors": sorted(colors)}


def colorset_from_json(data: dict) -> tuple[str, ...]:
    try:
        colors = data["colors"]
    except (KeyError, TypeError) as exc:
        raise FormatError("colorset: missing 'colors'") from exc
    if not colors or len(set(colors)) != len(colors):
        raise FormatError("colorset: colors must be non-empty and unique")
    return tuple(colors)


def element_to_json(x: PropElement) -> dict:
    return {
        "out": [_tree_to_json(canon(c)) for c in x.out_profile],
        "in": [_tree_to_json(canon(c)) for c in x.in_profile],
        "payload": _tree_to_json(canon(x.payload)),
    }


def element_from_json(P: PropImpl, data: dict) -> PropElement:
    try:
        out_p = tuple(_tree_from_json(c) for c in data["out"])
        in_p = tuple(_tree_from_json(c) for c in data["in"])
        payload = _tree_from_json(data["payload"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"element: malformed ({exc})") from exc
    x = PropElement(P.name, out_p, in_p, payload)
    if not P.contains(x):
        raise FormatError(f"element: {x!r} is not an element of {P.name}")
    return x


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------

def _component_to_json(c: Component) -> dict:
    return {
        "vertices": [[n_in, n_out] for (n_in, n_out) in c.vertex_ports],
        "edges": [[sv + 1, sp + 1, dv + 1, dp + 1] for (sv, sp, dv, dp) in c.edges],
        "inputs": [[v + 1, p + 1] for (v, p) in c.inputs],
        "outputs": [[v + 1, p + 1] for (v, p) in c.outputs],
        "formal": c.formal,
    }


def _component_from_json(data: dict, pos: str) -> Component:
    try:
        ports = tuple((int(a), int(b)) for a, b in data["vertices"])
        edges = tuple((sv - 1, sp - 1, dv - 1, dp - 1) for (sv, sp, dv, dp) in data["edges"])
        inputs = tuple((v - 1, p - 1) for (v, p) in data["inputs"])
        outputs = tuple((v - 1, p - 1) for (v, p) in data["outputs"])
        formal = bool(data.get("formal", False))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"graph: malformed component at {pos} ({exc})") from exc
    if formal:
        return Component((), (), (None,), (None,), True)
    return Component(ports, edges, inputs, outputs)


def graph_to_json(dg: DecoratedGraph) -> dict:
    comps = []
    for ci, c in enumerate(dg.graph.components):
        comp = _component_to_json(c)
        comp["decorations"] = [element_to_json(d) for d in dg.decorations[ci]]
        comp["in_colors"] = [_tree_to_json(canon(col)) for col in dg.in_colors[ci]]
        comp["out_colors"] = [_tree_to_json(canon(col)) for col in dg.out_colors[ci]]
        comps.append(comp)
    return {"components": comps}


def graph_from_json(P: PropImpl, data: dict) -> DecoratedGraph:
    from .graphs import decorate_with_colors

    try:
        comps_data = data["components"]
    except (KeyError, TypeError) as exc:
        raise FormatError("graph: missing 'components'") from exc
    comps, decs, formal_colors = [], [], {}
    for ci, cd in enumerate(comps_data):
        comp = _component_from_json(cd, f"component {ci + 1}")
        comps.append(comp)
        decs.append([element_from_json(P, d) for d in cd.get("decorations", [])])
        if comp.formal:
            cols = [_tree_from_json(c) for c in cd.get("in_colors", [])]
            if len(cols) != 1:
                raise FormatError(f"graph: formal component {ci + 1} needs exactly one color")
            formal_colors[ci] = cols[0]
    try:
        return decorate_with_colors(MNGraph(tuple(comps)), decs, formal_colors)
    except PropError as exc:
        raise FormatError(f"graph: {exc}") from exc


# ---------------------------------------------------------------------------
# Slice elements
# ---------------------------------------------------------------------------

def slice_element_to_json(S: SliceProp, x: PropElement) -> dict:
    entries, sigma, tau = S.parts(x)
    return {
        "graphs": [
            {
                "graph": graph_to_json(dg),
                "out_twist": list(sg.to_one_based()),
                "in_twist": list(tg.to_one_based()),
            }
            for (dg, sg, tg) in entries
        ],
        "partition": [sum(len(cd) for cd in dg.decorations) for (dg, _s, _t) in entries],
        "sigma": list(sigma.to_one_based()),
        "tau": list(tau.to_one_based()),
    }


def slice_element_from_json(S: SliceProp, data: dict) -> PropElement:
    try:
        entries = []
        for ed in data["graphs"]:
            dg = graph_from_json(S.base, ed["graph"])
            sg = Perm.from_one_based(ed["out_twist"])
            tg = Perm.from_one_based(ed["in_twist"])
            entry, prov = make_entry(S.base, dg, sg, tg)
            if prov != sorted(prov):
                raise FormatError("slice element: entry graph is not in canonical vertex order")
            entries.append(entry)
        sigma = Perm.from_one_based(data["sigma"])
        tau = Perm.from_one_based(data["tau"])
        partition = list(data.get("partition", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"slice element: malformed ({exc})") from exc
    got_partition = [len([d for cd in e[0].decorations for d in cd]) for e in entries]
    if partition and partition != got_partition:
        raise FormatError(f"slice element: partition {partition} does not match graphs {got_partition}")
    x = S.make(tuple(entries), sigma, tau)
    return x


# ---------------------------------------------------------------------------
# Metagraphs
# ---------------------------------------------------------------------------

def metagraph_to_json(m: Metagraph) -> str:
    levels = []
    for groups in m.levels:
        level = []
        for (bare_entries, sigma, tau) in groups:
            level.append(
                {
                    "entries": [
                        {
                            "components": [
                                {
                                    "vertices": [[a, b] for (a, b) in ports],
                                    "edges": [[sv + 1, sp + 1, dv + 1, dp + 1] for (sv, sp, dv, dp) in edges],
                                    "inputs": [[v + 1, p + 1] for (v, p) in inputs],
                                    "outputs": [[v + 1, p + 1] for (v, p) in outputs],
                                    "formal": formal,
                                }
                                for (ports, edges, inputs, outputs, formal) in bare
                            ],
                            "out_twist": [i + 1 for i in sg],
                            "in_twist": [i + 1 for i in tg],
                        }
                        for (bare, sg, tg) in bare_entries
                    ],
                    "sigma": [i + 1 for i in sigma],
                    "tau": [i + 1 for i in tau],
                }
            )
        levels.append(level)
    base = []
    if m.dim == 0:
        base = [_tree_to_json(m.base_elements[0])]
    else:
        for (out_p, in_p, payload) in m.base_elements:
            base.append(
                {
                    "out": [_tree_to_json(canon(c)) for c in out_p],
                    "in": [_tree_to_json(canon(c)) for c in in_p],
                    "payload": _tree_to_json(payload),
                }
            )
    return dumps({"dim": m.dim, "levels": levels, "base": base})


def metagraph_from_json(P: PropImpl, blob: str | dict) -> Metagraph:
    data = json.loads(blob) if isinstance(blob, str) else blob
    try:
        dim = int(data["dim"])
        levels_data = data["levels"]
        base_data = data["base"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"metagraph: malformed header ({exc})") from exc
    if dim == 0:
        if len(base_data) != 1:
            raise FormatError("metagraph: dimension 0 needs exactly one color")
        return Metagraph(0, (), (_tree_from_json(base_data[0]),))
    base = []
    for i, bd in enumerate(base_data):
        try:
            base.append(
                (
                    tuple(_tree_from_json(c) for c in bd["out"]),
                    tuple(_tree_from_json(c) for c in bd["in"]),
                    _tree_from_json(bd["payload"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"metagraph: malformed base element {i + 1} ({exc})") from exc
    levels = []
    for li, level_data in enumerate(levels_data):
        groups = []
        for gi, gd in enumerate(level_data):
            pos = f"level {li + 1} group {gi + 1}"
            try:
                bare_entries = []
                for ed in gd["entries"]:
                    bare = tuple(
                        (
                            tuple((int(a), int(b)) for a, b in cd["vertices"]),
                            tuple((sv - 1, sp - 1, dv - 1, dp - 1) for (sv, sp, dv, dp) in cd["edges"]),
                            tuple((v - 1, p - 1) for (v, p) in cd["inputs"]),
                            tuple((v - 1, p - 1) for (v, p) in cd["outputs"]),
                            bool(cd.get("formal", False)),
                        )
                        for cd in ed["components"]
                    )
                    bare_entries.append(
                        (bare, tuple(i - 1 for i in ed["out_twist"]), tuple(i - 1 for i in ed["in_twist"]))
                    )
                groups.append(
                    (
                        tuple(bare_entries),
                        tuple(i - 1 for i in gd["sigma"]),
                        tuple(i - 1 for i in gd["tau"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"metagraph: malformed {pos} ({exc})") from exc
        levels.append(tuple(groups))
    return Metagraph(dim, tuple(levels), tuple(base))


# ---------------------------------------------------------------------------
# PROP specs, operads, algebras
# ---------------------------------------------------------------------------

def prop_from_json(data: dict) -> PropImpl:
    """Build a PROP from a declarative spec; nested specs give slices."""
    try:
        kind = data["kind"]
    except (KeyError, TypeError) as exc:
        raise FormatError("prop spec: missing 'kind'") from exc
    if kind in ("initial", "terminal"):
        return make_builtin(kind)
    if kind == "terminal_colored":
        return make_builtin(kind, {"colors": colorset_from_json(data)})
    if kind == "endomorphism":
        try:
            fibers = {c: list(vs) for c, vs in data["fibers"].items()}
        except (KeyError, TypeError, AttributeError) as exc:
            raise FormatError("prop spec: endomorphism needs 'fibers'") from exc
        return make_builtin(kind, {"fibers": fibers, "name": data.get("name")})
    if kind == "free":
        try:
            gens = {g: (tuple(v["out"]), tuple(v["in"])) for g, v in data["generators"].items()}
        except (KeyError, TypeError) as exc:
            raise FormatError("prop spec: free needs 'generators'") from exc
        return free_prop(colorset_from_json(data), gens, name=data.get("name"))
    if kind == "table":
        return table_prop_from_json(data)
    if kind == "operad":
        return operad_to_prop(operad_from_json(data["operad"]))
    if kind == "slice":
        inner = prop_from_json(data["of"])
        n = int(data.get("times", 1))
        return iterated(inner, n)
    raise FormatError(f"prop spec: unknown kind {kind!r}")


def table_prop_from_json(data: dict):
    try:
        components = {}
        for cd in data["components"]:
            components[(tuple(cd["out"]), tuple(cd["in"]))] = list(cd["elements"])
        vcomp = {(a, b): r for a, b, r in data.get("vcomp", [])}
        hcomp = {(a, b): r for a, b, r in data.get("hcomp", [])}
        biact = {(x, tuple(s), tuple(t)): r for x, s, t, r in data.get("biact", [])}
        units = dict(data.get("units", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"prop table: malformed ({exc})") from exc
    return make_builtin(
        "table",
        {
            "name": data.get("name", "table"),
            "colors": colorset_from_json(data),
            "components": components,
            "vcomp": vcomp,
            "hcomp": hcomp,
            "biact": biact,
            "units": units,
        },
    )


def operad_from_json(data: dict):
    try:
        kind = data["kind"]
    except (KeyError, TypeError) as exc:
        raise FormatError("operad spec: missing 'kind'") from exc
    if kind == "terminal":
        return TerminalOperad(tuple(data.get("colors", ["*"])), int(data.get("arity_cap", 4)))
    if kind == "unit":
        return UnitOperad(tuple(data.get("colors", ["*"])))
    if kind == "associative":
        return AssociativeOperad(int(data.get("arity_cap", 3)))
    if kind == "table":
        try:
            components = {}
            for cd in data["elements"]:
                components.setdefault((cd["out"], tuple(cd["in"])), []).extend(cd["names"])
            rho = {(r[0], tuple(r[1])): r[2] for r in data.get("rho", [])}
            units = dict(data.get("units", {}))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"operad table: malformed ({exc})") from exc
        return TableOperad(data.get("name", "operad"), colorset_from_json(data), components, rho, units=units)
    raise FormatError(f"operad spec: unknown kind {kind!r}")


def propertope_to_json(P: PropImpl, g) -> dict:
    return json.loads(metagraph_to_json(encode_metagraph(P, g)))


def propertope_from_json(P: PropImpl, data: dict):
    return decode_metagraph(P, metagraph_from_json(P, data))


def universe_to_json(P: PropImpl, universe: dict[int, list]) -> dict:
    return {
        "shapes": [propertope_to_json(P, g) for dim in sorted(universe) for g in universe[dim]]
    }


def universe_from_json(P: PropImpl, data: dict) -> dict[int, list]:
    try:
        shapes = [propertope_from_json(P, sd) for sd in data["shapes"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"universe: malformed ({exc})") from exc
    out: dict[int, list] = {}
    for g in shapes:
        out.setdefault(g.dim, []).append(g)
    return out


def ptset_to_json(X) -> dict:
    """Serialize a propertopic set: shapes by metagraph, cells, face tables."""
    shapes = []
    index: dict[str, int] = {}
    for dim in sorted(X.universe):
        for g in X.universe[dim]:
            index[g.enc] = len(shapes)
            shapes.append(g)
    cells = []
    faces = []
    for g in shapes:
        cells.append({"shape": index[g.enc], "cells": [_tree_to_json(canon(c)) for c in X.cells_of(g)]})
    for (genc, direction, idx), fn in sorted(X.face_fn.items()):
        if genc not in index:
            continue
        faces.append(
            {
                "shape": index[genc],
                "dir": direction,
                "index": idx,
                "map": [[_tree_to_json(canon(k)), _tree_to_json(canon(v))] for k, v in sorted(fn.items(), key=lambda kv: enc(canon(kv[0])))],
            }
        )
    return {
        "bound": X.bound,
        "default": list(X.default) if X.default else None,
        "shapes": [propertope_to_json(X.base, g) for g in shapes],
        "cells": cells,
        "faces": faces,
        "name": X.name,
    }


def ptset_from_json(P: PropImpl, data: dict):
    from .presheaves import PropertopicSet

    try:
        shapes = [propertope_from_json(P, sd) for sd in data["shapes"]]
        bound = int(data["bound"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"ptset: malformed ({exc})") from exc
    universe: dict[int, list] = {}
    for g in shapes:
        universe.setdefault(g.dim, []).append(g)
    cells = {}
    for row in data.get("cells", []):
        g = shapes[row["shape"]]
        cells[g.enc] = tuple(_tree_from_json(c) for c in row["cells"])
    face_fn = {}
    for row in data.get("faces", []):
        g = shapes[row["shape"]]
        face_fn[(g.enc, row["dir"], int(row["index"]))] = {
            _tree_from_json(k): _tree_from_json(v) for k, v in row["map"]
        }
    default = tuple(data["default"]) if data.get("default") else None
    return PropertopicSet(P, bound, universe, cells, face_fn, default, name=data.get("name", "ptset"))


def algebra_to_json(A: PropAlgebra, support: list[PropElement]) -> dict:
    """Tabulate an algebra on the given elements (all argument tuples)."""
    import itertools

    rows = []
    for x in support:
        arg_space = [A.carrier.fiber(c) for c in x.in_profile]
        for args in itertools.product(*arg_space):
            rows.append(
                {
                    "element": element_to_json(x),
                    "args": [_tree_to_json(canon(a)) for a in args],
                    "out": [_tree_to_json(canon(v)) for v in A.apply(x, args)],
                }
            )
    return {
        "carrier": [
            {"color": _tree_to_json(canon(c)), "fiber": [_tree_to_json(canon(v)) for v in fib]}
            for c, fib in A.carrier.fibers
        ],
        "act": rows,
        "name": A.name,
    }


def algebra_from_json(P: PropImpl, data: dict) -> PropAlgebra:
    try:
        fibers = {
            _tree_from_json(cd["color"]): [_tree_from_json(v) for v in cd["fiber"]]
            for cd in data["carrier"]
        }
        carrier = GradedSet.from_dict(fibers)
        table: dict[tuple[str, tuple], tuple] = {}
        for row in data["act"]:
            x = element_from_json(P, row["element"])
            args = tuple(_tree_from_json(a) for a in row["args"])
            out = tuple(_tree_from_json(v) for v in row["out"])
            table[(x.enc, enc(canon(args)))] = out
    except (KeyError, TypeError) as exc:
        raise FormatError(f"algebra: malformed ({exc})") from exc

    def act(x: PropElement, args: tuple) -> tuple:
        key = (x.enc, enc(canon(tuple(args))))
        if key not in table:
            raise PropError(f"algebra table has no entry for {x!r} on {args!r}")
        return table[key]

    return PropAlgebra(P, carrier, act, name=data.get("name", "algebra"))
