import json
import subprocess
import sys
from pathlib import Path

import pytest

from planarvcsp import cli, io
from planarvcsp.catalog import LANGUAGES
from planarvcsp.fixtures import four_constraint_instance, star_instance
from planarvcsp.plane import solve

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def run(*argv):
    return cli.run(cli.parse([str(a) for a in argv]))


def test_solve_example():
    r = run("solve", FIX / "four_constraint.json")
    assert r.code == cli.OK
    doc = json.loads(r.output)
    assert doc["optimum"] == "0/1" or doc["optimum"] == "0"
    assert len(doc["assignment"]) == 4


def test_validate_codes():
    assert run("validate", FIX / "four_constraint.json").code == cli.OK
    bad = run("validate", FIX / "four_constraint_reversed.json")
    assert bad.code == cli.INPUT_ERROR
    assert json.loads(bad.output)["violations"]


def test_express_star_matches_library():
    r = run("express", FIX / "star.json")
    doc = json.loads(r.output)
    assert doc["schema"] == "relation" and doc["v"] == [0, 1, 2]
    assert io.relation_from_json(doc).arity == 3


@pytest.mark.parametrize("name,code", [("gamma_is", cli.INTRACTABLE), ("gamma_cut", cli.SELF_COMPLEMENTARY),
                                       ("gamma_cut_g01", cli.INTRACTABLE), ("gamma_imp", cli.OK)])
def test_classify_boolean_codes(name, code):
    r = run("classify-boolean", FIX / f"{name}.json")
    assert r.code == code
    assert "verdict" in json.loads(r.output)


@pytest.mark.parametrize("name,code", [("gamma_cut", cli.INTRACTABLE), ("gamma_imp", cli.OK),
                                       ("rho_neq", cli.OK)])
def test_classify_conservative_codes(name, code):
    assert run("classify-conservative", FIX / f"{name}.json").code == code


def test_check_mm():
    doc = json.loads(run("check-mm", "gamma_imp", "--candidate", "min,max").output)
    assert doc["status"] != "fails"
    doc = json.loads(run("check-mm", "gamma_cut", "--candidate", "min,max").output)
    assert doc["status"] == "fails" and doc["witness"]


def test_pair_graph_dot_and_json():
    dot = run("pair-graph", "gamma_cut", "--dot").output
    assert dot.startswith("graph pairs {") and "dashed" in dot
    doc = json.loads(run("pair-graph", "gamma_cut").output)
    assert doc["schema"] == "pair-graph"


def test_saturate_reports_truncation():
    r = run("saturate", "gamma_cut", "--max-set", "3")
    assert r.code == cli.EXHAUSTED and "truncated" in r.diagnostics
    r = run("saturate", "rho_neq")
    assert r.code == cli.OK


def test_input_errors(tmp_path):
    assert run("solve", tmp_path / "missing.json").code == cli.INPUT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    r = run("solve", bad)
    assert r.code == cli.INPUT_ERROR and "line 1" in r.diagnostics
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"schema": "language", "relations": ["gamma_cut"]}))
    assert run("solve", wrong).code == cli.INPUT_ERROR
    assert cli.main(["solve"]) == cli.INPUT_ERROR
    assert cli.main(["solve", "x", "--max-depth", "0"]) == cli.INPUT_ERROR


def test_max_vars_budget():
    assert run("solve", FIX / "four_constraint.json", "--max-vars", "2").code == cli.EXHAUSTED


@pytest.mark.parametrize("argv", [
    ("classify-boolean", "gamma_nae"),
    ("classify-conservative", "gamma_imp"),
    ("saturate", "gamma_cut", "--conservative"),
    ("pair-graph", "rho_neq", "--dot"),
    ("express", "star"),
])
def test_output_is_deterministic_and_worker_independent(argv):
    argv = tuple(str(FIX / "star.json") if a == "star" else a for a in argv)
    first = run(*argv)
    again = run(*argv)
    one = run(*argv, "--workers", "1")
    assert first.output == again.output == one.output
    assert first.code == again.code == one.code


def test_json_outputs_round_trip():
    for argv in (("saturate", "gamma_imp"), ("classify-conservative", "rho_neq"), ("pair-graph", "gamma_imp")):
        out = run(*argv).output
        assert io.dumps(json.loads(out)) == out


def test_io_round_trips():
    inst = four_constraint_instance()
    doc = io.instance_to_json(inst, (0, 1))
    back, v = io.instance_from_json(json.loads(io.dumps(doc)))
    assert v == (0, 1)
    assert solve(back)[0] == solve(inst)[0]
    for lang in LANGUAGES.values():
        assert io.language_from_json(json.loads(io.dumps(io.language_to_json(lang)))) == lang
    inst, v = star_instance()
    assert io.instance_to_json(*io.instance_from_json(io.instance_to_json(inst, v))) == io.instance_to_json(inst, v)


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "planarvcsp.cli", "classify-boolean", "gamma_is"],
                         capture_output=True, text=True)
    assert out.returncode == cli.INTRACTABLE
    assert json.loads(out.stdout)["verdict"]
