import io
import json
import subprocess
import sys

import pydot
import pytest

from embedded_nash.cli import Request, execute, main, parse_request, render
from embedded_nash.errors import MalformedDocument, MissingM, UnknownCommand, UsageError

CUSP = json.dumps({"nu": 2, "char_exponents": [3]})


def run(argv, stdin=CUSP):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdin, out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(argv, stdin=CUSP):
    code, out, err = run(argv, stdin)
    assert code == 0, err
    return json.loads(out)


# -- parsing ------------------------------------------------------------------


def test_parse_components():
    req = parse_request(["components", "--m", "12"], CUSP)
    assert req.command == "components" and req.m == 12
    assert req.document == {"nu": 2, "char_exponents": [3]}


def test_parse_kind():
    assert parse_request(["valuations", "--m", "6", "--kind", "dlt"], CUSP).kind == "dlt"


def test_parse_missing_m():
    with pytest.raises(MissingM):
        parse_request(["components"], CUSP)


def test_parse_errors():
    with pytest.raises(UnknownCommand):
        parse_request(["frobnicate"], CUSP)
    with pytest.raises(MalformedDocument):
        parse_request(["resolve"], "{not json")
    with pytest.raises(UsageError):
        parse_request(["lct", "--m", "0"], CUSP)
    with pytest.raises(UsageError):
        parse_request(["fim", "--m", "6"], CUSP)


def test_input_file(tmp_path):
    path = tmp_path / "cusp.json"
    path.write_text(CUSP)
    req = parse_request(["lct", "--m", "6", "--input", str(path)], "")
    assert req.document["nu"] == 2


# -- commands -----------------------------------------------------------------


def test_components_m12():
    doc = run_json(["components", "--m", "12"])
    comps = doc["payload"]["components"]
    assert [c["codim"] for c in comps] == [10, 11]
    assert comps[0]["kind"] == "vertical_group" and comps[0]["group"] == 1
    assert comps[1]["fim"] == [{"value": "3", "mult": 1}, {"value": "9", "mult": 1}]
    assert doc["request"] == {"command": "components", "m": 12}


def test_lct_m6():
    doc = run_json(["lct", "--m", "6"])
    assert doc["payload"] == {"lct": "5/6", "codim": 5, "top": ["L0:3/2"]}


def test_lct_empty():
    code, out, err = run(["lct", "--m", "5"])
    doc = json.loads(out)
    assert code == 0 and doc["payload"] is None
    assert doc["diagnostics"] == ["S_m empty"]
    assert "S_m empty" in err


def test_lct_table_empty():
    code, out, _ = run(["lct", "--m", "5", "--format", "table"])
    assert code == 0 and "none" in out


def test_components_table_empty():
    code, out, _ = run(["components", "--m", "5", "--format", "table"])
    assert code == 0 and out == "contact locus is empty\n"


def test_components_table():
    code, out, _ = run(["components", "--m", "12", "--format", "table"])
    lines = out.splitlines()
    assert code == 0 and lines[0].split()[0] == "kind" and len(lines) == 3
    assert "trunk_singleton" in lines[2] and "3x1 9x1" in lines[2]


def test_valuations_kinds():
    ids = lambda kind: [v["id"] for v in run_json(["valuations", "--m", "12", "--kind", kind])["payload"]["vertices"]]
    assert ids("dlt") == ids("contact") == ["L0:3/2", "L1:6/1"]
    assert ids("top") == ["L0:3/2"]
    assert len(ids("essential")) == 6


def test_rupture_alias_in_listing():
    rows = run_json(["valuations", "--m", "6", "--kind", "dlt"])["payload"]["vertices"]
    assert rows == [{"id": "L0:3/2", "N": 6, "nu": 5, "aliases": ["R1"]}]


def test_fim_command():
    doc = run_json(["fim", "--m", "12", "--vertex", "L1:6/1"])
    assert doc["payload"]["entries"] == [{"value": "3", "mult": 1}, {"value": "9", "mult": 1}]
    assert doc["payload"]["location"]["region"] == "trunk"
    assert doc["payload"]["authoritative"] is True


def test_fim_rupture_alias():
    doc = run_json(["fim", "--m", "6", "--vertex", "R1"])
    assert doc["payload"]["vertex"] == "L0:3/2" and doc["payload"]["entries"] == [{"value": "3", "mult": 2}]


def test_fim_literal_kappa():
    code, out, err = run(["fim", "--m", "12", "--vertex", "L1:6/1", "--literal-kappa"])
    doc = json.loads(out)
    assert code == 0 and doc["payload"]["sum"] == "7" and doc["payload"]["authoritative"] is False
    assert "non-authoritative" in err


def test_export_dot_m12():
    code, out, _ = run(["export", "--m", "12"])
    (graph,) = pydot.graph_from_dot_data(out)
    nodes = [n for n in graph.get_nodes() if n.get_name() not in ("node", "edge", "graph")]
    assert code == 0 and len(nodes) == 15
    assert sum(n.get("style") == "filled" for n in nodes) == 6


def test_export_dot_minimal():
    code, out, _ = run(["export"])
    (graph,) = pydot.graph_from_dot_data(out)
    assert code == 0 and len(graph.get_edges()) == 3


def test_separate_listing():
    doc = run_json(["separate", "--m", "7"])
    ids = [v["id"] for v in doc["payload"]["graph"]["vertices"]]
    assert "L1:1/1" in ids and doc["payload"]["graph"]["separation"] == 7


def test_check_command():
    doc = run_json(["check", "--m", "12", "--trials", "2", "--seed", "3"])
    p = doc["payload"]
    assert p["pass"] and p["oracle"]["pass"] and p["monotonicity"]["ok"]
    assert len(p["oracle"]["vertices"]) == 6
    assert p["inclusions"]["dlt"] == ["L0:3/2", "L1:6/1"]


def test_render_fim_structured():
    resp = execute(Request("fim", {"nu": 2, "char_exponents": [3]}, 12, vertex="L1:6/1"))
    doc = json.loads(render(resp, "structured"))
    assert doc["payload"]["entries"] == [{"value": "3", "mult": 1}, {"value": "9", "mult": 1}]


# -- determinism and round trips ----------------------------------------------


@pytest.mark.parametrize("argv", [["components", "--m", "24"], ["check", "--m", "12"], ["export", "--m", "12"], ["resolve"]])
def test_byte_identical(argv):
    assert run(argv) == run(argv)


@pytest.mark.parametrize("m", [2, 4, 6, 7, 12, 24])
def test_resolve_roundtrip(m):
    resolved = run(["resolve"])[1]
    for kind in ("essential", "dlt", "top"):
        a = run_json(["valuations", "--m", str(m), "--kind", kind])["payload"]["vertices"]
        b = run_json(["valuations", "--m", str(m), "--kind", kind], resolved)["payload"]["vertices"]
        strip = lambda rows: sorted((r["N"], r["nu"]) for r in rows)
        assert strip(a) == strip(b)
    a, b = (run_json(["lct", "--m", str(m)], doc)["payload"] for doc in (CUSP, resolved))
    assert (a["lct"], a["codim"]) == (b["lct"], b["codim"])


def test_generic_graph_refuses_components():
    resolved = run(["resolve"])[1]
    code, _, err = run(["components", "--m", "6"], resolved)
    assert code == 1 and json.loads(err)["error"] == "GenericGraphUnsupported"


# -- exit codes ---------------------------------------------------------------


def test_exit_usage():
    code, out, err = run(["components"])
    assert code == 1 and out == "" and json.loads(err)["error"] == "MissingM"
    assert run(["resolve"], json.dumps({"nu": 4, "char_exponents": [6, 8]}))[0] == 1
    assert run(["bogus"])[0] == 1


def test_exit_consistency_failure():
    doc = {
        "vertices": [{"id": x, "N": 2, "nu": 3} for x in "abc"] + [{"id": "st", "N": 1, "nu": 1, "kind": "strict_transform"}],
        "edges": [["a", "b"], ["b", "c"], ["c", "a"], ["a", "st"]],
    }
    code, _, err = run(["valuations", "--m", "2", "--kind", "dlt"], json.dumps(doc))
    assert code == 2 and json.loads(err)["error"] == "CriteriaDisagree"


def test_exit_precision(monkeypatch):
    from embedded_nash import cli
    from embedded_nash.errors import PrecisionExhausted

    def boom(*a, **k):
        raise PrecisionExhausted("truncation cap reached")

    monkeypatch.setattr(cli, "cross_validate", boom)
    code, _, err = run(["check", "--m", "6"])
    assert code == 3 and json.loads(err)["error"] == "PrecisionExhausted"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "embedded_nash", "lct", "--m", "6"], input=CUSP, capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["payload"]["lct"] == "5/6"


@pytest.mark.parametrize("argv", [["check", "--m", "12"], ["export", "--m", "24"], ["components", "--m", "26"]])
def test_byte_identical_across_hash_seeds(argv):
    import os

    outs = set()
    for seed in ("1", "2", "99"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        doc = json.dumps({"nu": 4, "char_exponents": [6, 7]})
        proc = subprocess.run([sys.executable, "-m", "embedded_nash", *argv], input=doc, capture_output=True, text=True, env=env)
        assert proc.returncode == 0, proc.stderr
        outs.add(proc.stdout)
    assert len(outs) == 1
