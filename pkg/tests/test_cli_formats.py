import json
import random

import pytest

from propertopes._canon import enc
from propertopes.builtins import TerminalProp, endomorphism_bool
from propertopes.cli import main
from propertopes.facecat import encode_metagraph, iterated, propertope_from_element
from propertopes.fixtures import bool_or_algebra, terminal_universe
from propertopes.formats import (
    FormatError,
    algebra_from_json,
    algebra_to_json,
    dumps,
    element_from_json,
    element_to_json,
    graph_from_json,
    graph_to_json,
    metagraph_to_json,
    prop_from_json,
    ptset_from_json,
    ptset_to_json,
    slice_element_from_json,
    slice_element_to_json,
    universe_to_json,
)
from propertopes.graphs import decorate, make_graph, single_vertex_component
from propertopes.presheaves import psi_build, validate_presheaf
from propertopes.slices import make_special

T = TerminalProp()


def t_elem(m, n):
    return T.component(("*",) * m, ("*",) * n)[0]


def test_element_round_trip():
    E = endomorphism_bool()
    x = E.sample_element(("b",), ("b", "b"), random.Random(1))
    data = element_to_json(x)
    assert element_from_json(E, data) == x
    with pytest.raises(FormatError):
        element_from_json(E, {"out": ["b"], "in": ["b"], "payload": "junk"})


def test_graph_round_trip():
    dg = decorate(make_graph([single_vertex_component(2, 1)]), [[t_elem(1, 2)]])
    data = graph_to_json(dg)
    back = graph_from_json(T, data)
    assert enc(back) == enc(dg)


def test_slice_element_round_trip():
    S = iterated(T, 1)
    x = make_special(S, "circ", t_elem(1, 2), t_elem(2, 1))
    data = slice_element_to_json(S, x)
    assert slice_element_from_json(S, data) == x
    bad = dict(data)
    bad["partition"] = [99]
    with pytest.raises(FormatError):
        slice_element_from_json(S, bad)


def test_prop_spec_round_trip():
    specs = [
        {"kind": "initial"},
        {"kind": "terminal"},
        {"kind": "terminal_colored", "colors": ["a", "b"]},
        {"kind": "endomorphism", "fibers": {"b": ["0", "1"]}},
        {"kind": "free", "colors": ["*"], "generators": {"m": {"out": ["*"], "in": ["*", "*"]}}},
        {"kind": "operad", "operad": {"kind": "terminal", "arity_cap": 3}},
        {"kind": "slice", "of": {"kind": "terminal"}},
    ]
    names = [prop_from_json(s).name for s in specs]
    assert names[0] == "I" and names[1] == "T" and names[-1] == "slice(T)"


def test_algebra_round_trip():
    A = bool_or_algebra(T)
    support = [t_elem(1, 1), t_elem(1, 2), t_elem(2, 1)]
    data = algebra_to_json(A, support)
    B = algebra_from_json(T, data)
    for x in support:
        import itertools

        for args in itertools.product("01", repeat=len(x.in_profile)):
            assert B.apply(x, args) == A.apply(x, args)


def test_ptset_round_trip():
    A = bool_or_algebra(T)
    universe = terminal_universe(2)
    X = psi_build(A, 0, 2, universe)
    data = ptset_to_json(X)
    Y = ptset_from_json(T, data)
    assert validate_presheaf(Y).ok
    assert dumps(ptset_to_json(Y)) == dumps(data)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

@pytest.fixture()
def tdir(tmp_path):
    (tmp_path / "prop.json").write_text(dumps({"kind": "terminal"}))
    return tmp_path


def run_cli(capsys, *argv) -> tuple[int, dict]:
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()[-1]
    return code, json.loads(out)


def test_cli_eval_and_validate(tdir, capsys):
    dg = decorate(make_graph([single_vertex_component(2, 1)]), [[t_elem(1, 2)]])
    gpath = tdir / "graph.json"
    data = graph_to_json(dg)
    data["type"] = "graph"
    gpath.write_text(dumps(data))
    code, rep = run_cli(capsys, "validate", str(gpath), "--prop", str(tdir / "prop.json"))
    assert code == 0 and rep["ok"]
    code, rep = run_cli(capsys, "eval", str(gpath), "--prop", str(tdir / "prop.json"))
    assert code == 0
    assert rep["element"]["payload"] == "pt"


def test_cli_slice_vcomp(tdir, capsys):
    S = iterated(T, 1)
    x = make_special(S, "circ", t_elem(1, 2), t_elem(2, 1))
    u = S.unit(x.in_profile)
    xp, up = tdir / "x.json", tdir / "u.json"
    xp.write_text(dumps(slice_element_to_json(S, x)))
    up.write_text(dumps(slice_element_to_json(S, u)))
    code, rep = run_cli(capsys, "slice-vcomp", str(xp), str(up), "--prop", str(tdir / "prop.json"))
    assert code == 0 and rep["ok"]
    back = slice_element_from_json(S, rep["element"])
    assert back == x  # unit law through the CLI


def test_cli_encode_decode_round_trip(tdir, capsys):
    S = iterated(T, 1)
    x = make_special(S, "tensor", t_elem(1, 1), t_elem(2, 1))
    xp = tdir / "se.json"
    data = slice_element_to_json(S, x)
    data["type"] = "slice-element"
    xp.write_text(dumps(data))
    code, rep = run_cli(capsys, "encode", str(xp), "--prop", str(tdir / "prop.json"))
    assert code == 0
    mpath = tdir / "mg.json"
    mpath.write_text(dumps(rep["metagraph"]))
    code, rep2 = run_cli(capsys, "decode", str(mpath), "--prop", str(tdir / "prop.json"))
    assert code == 0 and rep2["ok"]
    assert dumps(rep2["canonical"]) == dumps(rep["metagraph"])


def test_cli_decode_malformed_exits_2(tdir, capsys):
    bad = tdir / "bad.json"
    bad.write_text(dumps({"dim": 2, "levels": [[{"entries": [], "sigma": [], "tau": []}]], "base": []}))
    code, rep = run_cli(capsys, "decode", str(bad), "--prop", str(tdir / "prop.json"))
    assert code in (1, 2)
    assert not rep["ok"]
    truly_bad = tdir / "bad2.json"
    truly_bad.write_text("{not json")
    code, rep = run_cli(capsys, "decode", str(truly_bad), "--prop", str(tdir / "prop.json"))
    assert code == 2


def test_cli_psi_and_check_weak(tdir, capsys):
    A = bool_or_algebra(T)
    universe = terminal_universe(2)
    support = [g.value for g in universe[1]]  # the table must cover the universe
    apath = tdir / "alg.json"
    apath.write_text(dumps(algebra_to_json(A, support)))
    upath = tdir / "universe.json"
    upath.write_text(dumps(universe_to_json(T, universe)))
    code, rep = run_cli(
        capsys, "psi", str(apath), "--prop", str(tdir / "prop.json"),
        "--universe", str(upath), "--n", "0", "--bound", "2", "--out", str(tdir / "ptset.json"),
    )
    assert code == 0 and rep["ok"]
    ppath = tdir / "ptset_only.json"
    ppath.write_text(dumps(rep["ptset"]))
    code, rep = run_cli(
        capsys, "check-weak", str(ppath), "--prop", str(tdir / "prop.json"), "--n", "0", "--bound", "2"
    )
    assert code == 0 and rep["ok"]


def test_cli_deterministic_under_seed(tdir, capsys):
    code1, rep1 = run_cli(capsys, "validate", str(tdir / "prop.json"), "--prop", str(tdir / "prop.json"))
    # the input is not a typed payload: format error, deterministic
    code2, rep2 = run_cli(capsys, "validate", str(tdir / "prop.json"), "--prop", str(tdir / "prop.json"))
    assert (code1, rep1) == (code2, rep2) == (2, rep2)
