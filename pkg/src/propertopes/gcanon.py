"""Canonical forms for graph expressions ``sigma . X . tau``.

A *graph expression* denotes a PROP value as a decorated graph X (components
ordered, legs labeled per component) twisted by an output permutation sigma
and an input permutation tau, reading X's legs in (component, label) order.
The same value has many expressions: legs can be relabeled against the
twists, components reordered, and vertices renumbered.  ``canonical_expr``
picks one representative: every component's legs are relabeled to attachment
order, vertices are ordered by structure-invariant signatures (ties searched
exhaustively under a cap), components are sorted by encoding with equal
components assigned greedily through sigma, and all compensations are folded
into (sigma, tau), minimizing their encoding.

The raw input format is a dict with vertices ("decs"), colored edges, and
leg attachment specs; "thru" entries pair an input leg directly with an
output leg (a formal identity wire).  Used by the free PROP and by slice
elements, whose sequence entries are graph expressions over the base PROP.
"""

from __future__ import annotations

import itertools
from typing import Any

from ._canon import enc
from .core import PropElement, PropError
from .graphs import Component, DecoratedGraph, MNGraph, formal_component
from .perms import Perm

TIE_CAP = 2000


def raw_from_decorated(dg: DecoratedGraph) -> dict:
    """Flatten a decorated graph into the raw expression format."""
    decs: list[PropElement] = []
    offsets: list[int] = []
    for comp_decs in dg.decorations:
        offsets.append(len(decs))
        decs.extend(comp_decs)
    edges = []
    ins: list[tuple] = []
    outs: list[tuple] = []
    thru_colors: dict[int, Any] = {}
    tid = 0
    for ci, c in enumerate(dg.graph.components):
        off = offsets[ci]
        if c.formal:
            thru_colors[tid] = dg.in_colors[ci][0]
            ins.append(("thru", tid))
            outs.append(("thru", tid))
            tid += 1
            continue
        for (edge, col) in zip(c.edges, dg.edge_colors[ci]):
            sv, sp, dv, dp = edge
            edges.append((off + sv, sp, off + dv, dp, col))
        for (v, p) in c.inputs:
            ins.append(("v", off + v, p))
        for (v, p) in c.outputs:
            outs.append(("v", off + v, p))
    return {"decs": decs, "edges": edges, "ins": ins, "outs": outs, "thru_colors": thru_colors}


def _vertex_signatures(raw: dict, group: list[int]) -> dict[int, str]:
    """Numbering-invariant vertex keys inside one connected piece."""
    decs = raw["decs"]
    in_src: dict[tuple[int, int], tuple] = {}
    out_dst: dict[tuple[int, int], tuple] = {}
    for (sv, sp, dv, dp, _c) in raw["edges"]:
        out_dst[(sv, sp)] = ("v", dv, dp)
        in_src[(dv, dp)] = ("v", sv, sp)
    sig = {v: enc((decs[v], len(decs[v].in_profile), len(decs[v].out_profile))) for v in group}
    for _ in range(len(group)):
        nxt = {}
        for v in group:
            ins = []
            for p in range(len(decs[v].in_profile)):
                got = in_src.get((v, p))
                ins.append(("leg",) if got is None else (sig[got[1]], got[2]))
            outs = []
            for p in range(len(decs[v].out_profile)):
                got = out_dst.get((v, p))
                outs.append(("leg",) if got is None else (sig[got[1]], got[2]))
            nxt[v] = enc((sig[v], tuple(ins), tuple(outs)))
        stable = len(set(nxt.values())) == len(set(sig.values())) and all(
            (nxt[a] == nxt[b]) == (sig[a] == sig[b]) for a in group for b in group
        )
        sig = nxt
        if stable:
            break
    return sig


def _build_piece(raw: dict, group_order: list[int]) -> dict:
    decs = raw["decs"]
    local = {g: k for k, g in enumerate(group_order)}
    p_decs = tuple(decs[g] for g in group_order)
    ports = tuple((len(d.in_profile), len(d.out_profile)) for d in p_decs)
    p_edges, p_cols = [], []
    for (sv, sp, dv, dp, col) in raw["edges"]:
        if sv in local:
            p_edges.append((local[sv], sp, local[dv], dp))
            p_cols.append(col)
    paired = sorted(zip(p_edges, p_cols))
    g_ins = [(gi, spec) for gi, spec in enumerate(raw["ins"]) if spec[0] == "v" and spec[1] in local]
    g_outs = [(gi, spec) for gi, spec in enumerate(raw["outs"]) if spec[0] == "v" and spec[1] in local]
    g_ins.sort(key=lambda t: (local[t[1][1]], t[1][2]))
    g_outs.sort(key=lambda t: (local[t[1][1]], t[1][2]))
    comp = Component(
        ports,
        tuple(e for e, _ in paired),
        tuple((local[spec[1]], spec[2]) for _, spec in g_ins),
        tuple((local[spec[1]], spec[2]) for _, spec in g_outs),
    )
    in_cols = tuple(p_decs[local[spec[1]]].in_profile[spec[2]] for _, spec in g_ins)
    out_cols = tuple(p_decs[local[spec[1]]].out_profile[spec[2]] for _, spec in g_outs)
    piece = {
        "comp": comp,
        "decs": p_decs,
        "edge_cols": tuple(c for _, c in paired),
        "in_cols": in_cols,
        "out_cols": out_cols,
        "global_ins": [gi for gi, _ in g_ins],
        "global_outs": [gi for gi, _ in g_outs],
        "vertex_order": list(group_order),
    }
    piece["enc"] = enc((piece["comp"], piece["decs"], piece["edge_cols"], piece["in_cols"], piece["out_cols"]))
    return piece


def _piece_candidates(raw: dict, group: list[int], err_name: str) -> list[dict]:
    sig = _vertex_signatures(raw, group)
    buckets: dict[str, list[int]] = {}
    for v in group:
        buckets.setdefault(sig[v], []).append(v)
    ordered_buckets = [sorted(buckets[k]) for k in sorted(buckets)]
    total = 1
    for b in ordered_buckets:
        for i in range(2, len(b) + 1):
            total *= i
    if total > TIE_CAP:
        raise PropError(f"vertex canonicalization tie explosion ({total} orders) in {err_name}")
    candidates = []
    for combo in itertools.product(*(itertools.permutations(b) for b in ordered_buckets)):
        order = [v for b in combo for v in b]
        candidates.append(_build_piece(raw, order))
    best = min(c["enc"] for c in candidates)
    uniq: dict[str, dict] = {}
    for c in candidates:
        if c["enc"] == best:
            uniq.setdefault(enc((c["global_ins"], c["global_outs"], c["vertex_order"])), c)
    return list(uniq.values())


def _assemble(pieces: list[dict], raw: dict) -> tuple[DecoratedGraph, Perm, Perm, list[int]]:
    comps, decs, ecols, icols, ocols = [], [], [], [], []
    canon_out_pos: dict[int, int] = {}
    canon_in_pos: dict[int, int] = {}
    provenance: list[int] = []
    acc_in = 0
    acc_out = 0
    for p in pieces:
        comps.append(p["comp"])
        decs.append(p["decs"])
        ecols.append(p["edge_cols"])
        icols.append(p["in_cols"])
        ocols.append(p["out_cols"])
        provenance.extend(p["vertex_order"])
        for gi in p["global_ins"]:
            canon_in_pos[gi] = acc_in
            acc_in += 1
        for gi in p["global_outs"]:
            canon_out_pos[gi] = acc_out
            acc_out += 1
    dg = DecoratedGraph(MNGraph(tuple(comps)), tuple(decs), tuple(ecols), tuple(icols), tuple(ocols))
    sigma = Perm(tuple(canon_out_pos[i] for i in range(len(raw["outs"])))).inverse()
    tau = Perm(tuple(canon_in_pos[p] for p in range(len(raw["ins"]))))
    return dg, sigma, tau, provenance


def canonical_expr(
    raw: dict, outer_sigma: Perm, outer_tau: Perm, err_name: str = "graph expression"
) -> tuple[DecoratedGraph, Perm, Perm, list[int]]:
    """Canonical (graph, sigma, tau, vertex-provenance) of a raw expression.

    The returned permutations satisfy: the expressed value equals
    sigma . X . tau with X the canonical graph; provenance lists the raw
    vertex index at each canonical vertex slot.
    """
    decs = raw["decs"]
    n_v = len(decs)
    adj: dict[int, set[int]] = {v: set() for v in range(n_v)}
    for (sv, _, dv, _, _) in raw["edges"]:
        adj[sv].add(dv)
        adj[dv].add(sv)
    seen: set[int] = set()
    vertex_pieces: list[list[int]] = []
    for v in range(n_v):
        if v in seen:
            continue
        group = [v]
        seen.add(v)
        stack = [v]
        while stack:
            u = stack.pop()
            for w in sorted(adj[u]):
                if w not in seen:
                    seen.add(w)
                    group.append(w)
                    stack.append(w)
        vertex_pieces.append(sorted(group))

    piece_cands: list[list[dict]] = [_piece_candidates(raw, g, err_name) for g in vertex_pieces]
    for tid in sorted(raw["thru_colors"]):
        col = raw["thru_colors"][tid]
        piece = {
            "comp": formal_component(),
            "decs": (),
            "edge_cols": (),
            "in_cols": (col,),
            "out_cols": (col,),
            "global_ins": [raw["ins"].index(("thru", tid))],
            "global_outs": [raw["outs"].index(("thru", tid))],
            "vertex_order": [],
        }
        piece["enc"] = enc((piece["comp"], piece["decs"], piece["edge_cols"], piece["in_cols"], piece["out_cols"]))
        piece_cands.append([piece])

    idx = sorted(range(len(piece_cands)), key=lambda i: piece_cands[i][0]["enc"])
    groups: list[list[int]] = []
    for i in idx:
        if groups and piece_cands[groups[-1][0]][0]["enc"] == piece_cands[i][0]["enc"]:
            groups[-1].append(i)
        else:
            groups.append([i])

    # Greedy slot assignment inside equal-piece groups: slots in canonical
    # order take the free piece whose twisted output positions are least;
    # every piece has an output and the twist is a bijection, so this is the
    # lexicographic minimum over group orderings.
    order: list[int] = []
    for g in groups:
        free = list(g)
        for _slot in g:
            free.sort(key=lambda i: tuple(outer_sigma(o) for o in piece_cands[i][0]["global_outs"]))
            order.append(free.pop(0))

    combos = 1
    for cands in piece_cands:
        combos *= len(cands)
    if combos > TIE_CAP:
        raise PropError(f"canonicalization tie explosion ({combos} candidates) in {err_name}")

    best: tuple[str, tuple[DecoratedGraph, Perm, Perm, list[int]]] | None = None
    for cand_combo in itertools.product(*(piece_cands[i] for i in order)):
        dg, s0, t0, prov = _assemble(list(cand_combo), raw)
        sigma = outer_sigma.compose(s0)
        tau = t0.compose(outer_tau)
        key = enc((sigma.images, tau.images))
        if best is None or key < best[0]:
            best = (key, (dg, sigma, tau, prov))
    assert best is not None
    return best[1]
