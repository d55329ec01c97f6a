"""Batch command surface over the library.

Every invocation reads JSON inputs, runs one verification or construction,
prints a machine-readable JSON report to standard output, and exits with:

* 0 — all checks passed;
* 1 — a verification failed (the report carries witnesses);
* 2 — parse or schema error.

All randomness is seeded (``--seed``, default 0), so outputs are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .core import PropError, PropMap, Report
from .facecat import faces as propertope_faces
from .facecat import iterated
from .formats import (
    FormatError,
    algebra_from_json,
    dumps,
    element_from_json,
    element_to_json,
    graph_from_json,
    metagraph_from_json,
    metagraph_to_json,
    prop_from_json,
    propertope_from_json,
    propertope_to_json,
    ptset_from_json,
    ptset_to_json,
    slice_element_from_json,
    slice_element_to_json,
    universe_from_json,
)
from .graphs import evaluate, validate_decoration, validate_mn_graph
from .lawcheck import check_prop_laws
from .presheaves import check_weak_n, map_propertope, psi_build, pullback, validate_presheaf
from .slices import SliceProp, validate_slice_element


def _load(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _load_prop(args) -> Any:
    if not args.prop:
        raise FormatError("--prop is required for this command")
    return prop_from_json(_load(args.prop))


def _emit(payload: dict, out: str | None) -> None:
    blob = dumps(payload)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(blob)
    print(blob)


def _report_json(reports: list[Report]) -> tuple[bool, list[dict]]:
    ok = all(r.ok for r in reports)
    return ok, [r.as_json() for r in reports]


def cmd_validate(args) -> int:
    P = _load_prop(args)
    data = _load(args.input)
    kind = data.get("type")
    reports: list[Report] = []
    if kind == "graph":
        dg = graph_from_json(P, data)
        reports.append(validate_mn_graph(dg.graph))
        reports.append(validate_decoration(P, dg))
    elif kind == "slice-element":
        S = iterated(P, 1)
        x = slice_element_from_json(S, data)
        reports.append(validate_slice_element(P, x))
    elif kind == "metagraph":
        from .facecat import validate_propertope

        g = propertope_from_json(P, data)
        reports.append(validate_propertope(P, g))
    elif kind == "prop-laws":
        reports.append(check_prop_laws(P, seed=args.seed, samples=args.samples, max_arity=3))
    else:
        raise FormatError(f"validate: unknown input type {kind!r}")
    ok, rep = _report_json(reports)
    _emit({"command": "validate", "ok": ok, "reports": rep, "seed": args.seed}, args.out)
    return 0 if ok else 1


def cmd_eval(args) -> int:
    P = _load_prop(args)
    data = _load(args.input)
    dg = graph_from_json(P, data)
    rep1, rep2 = validate_mn_graph(dg.graph), validate_decoration(P, dg)
    if not (rep1.ok and rep2.ok):
        ok, rep = _report_json([rep1, rep2])
        _emit({"command": "eval", "ok": False, "reports": rep}, args.out)
        return 1
    value = evaluate(P, dg)
    _emit({"command": "eval", "ok": True, "element": element_to_json(value)}, args.out)
    return 0


def cmd_slice_vcomp(args) -> int:
    P = _load_prop(args)
    S = iterated(P, 1)
    assert isinstance(S, SliceProp)
    x = slice_element_from_json(S, _load(args.input))
    y = slice_element_from_json(S, _load(args.second))
    z = S.vcomp(x, y)
    rep = validate_slice_element(P, z)
    ok = rep.ok
    _emit(
        {"command": "slice-vcomp", "ok": ok, "element": slice_element_to_json(S, z), "reports": [rep.as_json()]},
        args.out,
    )
    return 0 if ok else 1


def cmd_faces(args) -> int:
    P = _load_prop(args)
    g = propertope_from_json(P, _load(args.input))
    out = []
    for f in propertope_faces(g):
        out.append(
            {
                "direction": f.direction,
                "index": f.index + 1,
                "target": propertope_to_json(P, f.target),
            }
        )
    _emit({"command": "faces", "ok": True, "faces": out}, args.out)
    return 0


def cmd_encode(args) -> int:
    P = _load_prop(args)
    data = _load(args.input)
    kind = data.get("type")
    from .facecat import Propertope, propertope_from_element

    if kind == "element":
        g = Propertope(P.name, 1, element_from_json(P, data))
    elif kind == "slice-element":
        S = iterated(P, 1)
        g = propertope_from_element(P, slice_element_from_json(S, data))
    else:
        raise FormatError(f"encode: unknown input type {kind!r}")
    from .facecat import encode_metagraph

    _emit({"command": "encode", "ok": True, "metagraph": json.loads(metagraph_to_json(encode_metagraph(P, g)))}, args.out)
    return 0


def cmd_decode(args) -> int:
    P = _load_prop(args)
    g = propertope_from_json(P, _load(args.input))
    from .facecat import encode_metagraph, validate_propertope

    rep = validate_propertope(P, g)
    canonical = metagraph_to_json(encode_metagraph(P, g))
    ok = rep.ok
    _emit(
        {
            "command": "decode",
            "ok": ok,
            "dim": g.dim,
            "canonical": json.loads(canonical),
            "reports": [rep.as_json()],
        },
        args.out,
    )
    return 0 if ok else 1


def cmd_psi(args) -> int:
    P = _load_prop(args)
    level = iterated(P, args.n)
    A = algebra_from_json(level, _load(args.input))
    universe = universe_from_json(P, _load(args.universe))
    X = psi_build(A, args.n, args.bound, universe)
    rep = validate_presheaf(X)
    ok = rep.ok
    _emit({"command": "psi", "ok": ok, "ptset": ptset_to_json(X), "reports": [rep.as_json()]}, args.out)
    return 0 if ok else 1


def cmd_check_weak(args) -> int:
    P = _load_prop(args)
    X = ptset_from_json(P, _load(args.input))
    rep1 = validate_presheaf(X)
    n = None if args.n < 0 else args.n
    rep2 = check_weak_n(X, n, args.bound)
    ok, rep = _report_json([rep1, rep2])
    _emit({"command": "check-weak", "ok": ok, "reports": rep, "n": args.n, "bound": args.bound}, args.out)
    return 0 if ok else 1


def _map_from_json(data: dict) -> PropMap:
    kind = data.get("kind")
    if kind == "identity":
        P = prop_from_json(data["prop"])
        return PropMap(P, P, lambda x: x, name="identity")
    if kind == "to-terminal":
        from .builtins import TerminalProp
        from .core import PropElement

        source = prop_from_json(data["source"])
        T = TerminalProp()

        def fn(x: PropElement) -> PropElement:
            return PropElement(T.name, ("*",) * len(x.out_profile), ("*",) * len(x.in_profile), "pt")

        return PropMap(source, T, fn, name=f"{source.name}->T")
    raise FormatError(f"map spec: unknown kind {kind!r}")


def cmd_pullback(args) -> int:
    phi = _map_from_json(_load(args.map))
    X = ptset_from_json(phi.target, _load(args.input))
    universe = universe_from_json(phi.source, _load(args.universe))
    Y = pullback(phi, X, universe)
    rep1 = validate_presheaf(Y)
    reports = [rep1]
    ok = rep1.ok
    if args.n >= 0:
        rep2 = check_weak_n(Y, args.n, args.bound)
        reports.append(rep2)
        ok = ok and rep2.ok
    _emit({"command": "pullback", "ok": ok, "ptset": ptset_to_json(Y), "reports": [r.as_json() for r in reports]}, args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propertopes", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
        if needs_input:
            p.add_argument("input", help="input JSON file")
        p.add_argument("--prop", help="PROP spec JSON file")
        p.add_argument("--n", type=int, default=0, help="categorification level (negative = fibrancy only)")
        p.add_argument("--bound", type=int, default=3, help="dimension bound D")
        p.add_argument("--depth-cap", type=int, default=6, dest="depth_cap", help="chain rewrite depth cap")
        p.add_argument("--samples", type=int, default=200, help="sample count for law checks")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--out", help="also write the JSON report/artifact here")

    common(sub.add_parser("validate", help="validate a graph, slice element, metagraph, or PROP laws"))
    common(sub.add_parser("eval", help="evaluate a decorated graph to a PROP element"))
    p = sub.add_parser("slice-vcomp", help="compose two slice elements by graph substitution")
    common(p)
    p.add_argument("second", help="second slice-element JSON file")
    common(sub.add_parser("faces", help="list the face maps of a propertope"))
    common(sub.add_parser("encode", help="encode an element or slice element as a metagraph"))
    common(sub.add_parser("decode", help="decode a metagraph and print its canonical form"))
    p = sub.add_parser("psi", help="build the weak-n structure of an algebra")
    common(p)
    p.add_argument("--universe", required=True, help="universe JSON file (shape list)")
    common(sub.add_parser("check-weak", help="check weak-n conditions of a propertopic set"))
    p = sub.add_parser("pullback", help="pull a propertopic set back along a PROP map")
    common(p)
    p.add_argument("--map", required=True, help="PROP map spec JSON file")
    p.add_argument("--universe", required=True, help="universe JSON file over the source")
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "eval": cmd_eval,
    "slice-vcomp": cmd_slice_vcomp,
    "faces": cmd_faces,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "psi": cmd_psi,
    "check-weak": cmd_check_weak,
    "pullback": cmd_pullback,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except FormatError as exc:
        print(dumps({"command": args.verb, "ok": False, "error": str(exc), "kind": "format"}))
        return 2
    except PropError as exc:
        print(dumps({"command": args.verb, "ok": False, "error": str(exc), "kind": "verification"}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
