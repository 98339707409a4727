import json
import subprocess
import sys
from pathlib import Path

import pytest

from deplogic.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def sample(name):
    return str(SAMPLES / name)


def cli(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_eval_poly_constant_zero(capsys):
    status, out, _ = cli(capsys, "eval-poly", "--formula", sample("constant_zero.dl"),
                         "--structure", sample("n4.json"))
    assert status == 0 and out.strip() == "true"


def test_eval_poly_dominating_set_is_fragment_error(capsys):
    status, out, err = cli(capsys, "eval-poly", "--formula", sample("dominating_set.dl"),
                           "--structure", sample("p3_loops.json"))
    assert status == 3 and out == ""
    assert err.startswith("fragment violation")


def test_eval_dominating_set(capsys):
    status, out, _ = cli(capsys, "eval", "--formula", sample("dominating_set.dl"),
                         "--structure", sample("p3_loops.json"))
    assert status == 0 and out.strip() == "true"


def test_false_verdict_and_witness(capsys, tmp_path):
    f = write(tmp_path, "f.dl", "exists y1 y2. =(y1) & =(y2) & !(y1 = y2) & y1 = 0 & y2 = 0")
    status, out, _ = cli(capsys, "eval-poly", "--formula", f, "--structure", sample("n4.json"), "--json")
    report = json.loads(out)
    assert status == 1 and report["verdict"] is False and report["route"] == "pipeline"
    assert "violated_clause" in report and "source_clause" in report
    status, _, _ = cli(capsys, "eval", "--formula", f, "--structure", sample("n4.json"))
    assert status == 1


def test_open_formula_with_team(capsys):
    status, out, _ = cli(capsys, "eval-poly", "--formula", sample("open_guard.dl"),
                         "--structure", sample("n4.json"), "--team", sample("team_z0.json"))
    assert status == 0
    status, _, _ = cli(capsys, "eval", "--formula", sample("open_guard.dl"),
                       "--structure", sample("n4.json"), "--team", sample("team_z0.json"))
    assert status == 0


@pytest.mark.parametrize("argv", [
    ["eval"],
    ["eval", "--formula", "missing.dl", "--structure", "missing.json"],
    ["frobnicate", "--formula", "x"],
    ["translate", "--formula", "x"],
    ["stats", "--formula", "x", "--n-range", "5"],
])
def test_usage_errors(capsys, argv):
    assert cli(capsys, *argv)[0] == 2


def test_parse_error_exit(capsys, tmp_path):
    f = write(tmp_path, "bad.dl", "forall x. P(x")
    status, _, err = cli(capsys, "parse", "--formula", f)
    assert status == 2 and "1:" in err


def test_resource_exit(capsys, tmp_path):
    f = write(tmp_path, "f.dl", "forall x1 x2. exists y1 y2. =(x1,y1) & =(x2,y2) & "
                                "(x1 = x2 -> y1 = y2) & (y1 = y2 -> x1 = x2) & !(y1 = 0)")
    s = write(tmp_path, "s.json", '{"universe": 5}')
    status, _, err = cli(capsys, "eval", "--formula", f, "--structure", s, "--max-nodes", "50")
    assert status == 4 and "resource" in err


def test_fragment_report_json(capsys):
    status, out, _ = cli(capsys, "fragment", "--formula", sample("dominating_set.dl"), "--json")
    report = json.loads(out)
    assert status == 0
    assert report["is_dhorn"] and not report["is_bdhorn"]
    assert {w["clause"] for w in report["witnesses"]} == {2, 3}


def test_emit_ground_dimacs(capsys, tmp_path):
    target = tmp_path / "g.cnf"
    status, _, _ = cli(capsys, "eval-poly", "--formula", sample("constant_zero.dl"),
                       "--structure", sample("n4.json"), "--emit-ground", str(target))
    assert status == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "c atom 1 P_0_1(0)"
    assert "p cnf 4 4" in lines
    assert sorted(l for l in lines if not l.startswith(("c", "p"))) == ["1 0", "2 0", "3 0", "4 0"]


def test_translate_targets(capsys):
    status, out, _ = cli(capsys, "translate", "--to", "esohorn", "--formula", sample("constant_zero.dl"))
    assert status == 0 and out.startswith("exists-rel P_0_1/1.")
    status, out, _ = cli(capsys, "translate", "--to", "bdhorn", "--formula", sample("reach.eso"))
    assert status == 0 and out.startswith("forall x y w w1. exists y_T")
    status, out, _ = cli(capsys, "translate", "--to", "openize", "--formula", sample("open_guard.dl"))
    assert status == 0 and "!R(z)" in out
    status, out, _ = cli(capsys, "translate", "--to", "ground", "--formula", sample("reach.eso"),
                         "--structure", sample("path4.json"))
    assert status == 0 and "p cnf 4 5" in out
    status, _, _ = cli(capsys, "translate", "--to", "bdhorn", "--formula", sample("constant_zero.dl"))
    assert status == 2


def test_translate_open_bdhorn(capsys, tmp_path):
    f = write(tmp_path, "neg.eso", "exists-rel P/1.\nforall x. !R(x) | P(x)")
    status, out, _ = cli(capsys, "translate", "--to", "open-bdhorn", "--formula", f)
    assert status == 0 and "z1" in out
    bad = write(tmp_path, "pos.eso", "exists-rel P/1.\nforall x. R(x) | !P(x)")
    assert cli(capsys, "translate", "--to", "open-bdhorn", "--formula", bad)[0] == 3


def test_stats_json(capsys):
    status, out, _ = cli(capsys, "stats", "--formula", sample("constant_zero.dl"),
                         "--n-range", "2..5", "--json")
    report = json.loads(out)
    assert status == 0 and report["universals"] == 2
    assert [r["n"] for r in report["rows"]] == [2, 3, 4, 5]
    assert all(r["clauses"] <= r["bound"] for r in report["rows"])


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.txt"
    status, out, _ = cli(capsys, "parse", "--formula", sample("constant_zero.dl"), "-o", str(target))
    assert status == 0 and out == ""
    assert target.read_text() == "forall x. exists y. =(x, y) & y = 0\n"


def test_eval_and_eval_poly_agree(capsys, tmp_path):
    import random
    from deplogic.generators import random_bdhorn, random_structure
    from deplogic.syntax import pretty_print
    rng = random.Random(12)
    for i in range(25):
        f = write(tmp_path, f"f{i}.dl", pretty_print(random_bdhorn(rng, rng.randint(0, 2), 2, 3)))
        s = write(tmp_path, f"s{i}.json", json.dumps(random_structure(rng, rng.randint(3, 4)).to_json()))
        a = cli(capsys, "eval", "--formula", f, "--structure", s)[0]
        b = cli(capsys, "eval-poly", "--formula", f, "--structure", s)[0]
        assert a == b and a in (0, 1)


def test_subprocess_determinism():
    argv = [sys.executable, "-m", "deplogic", "translate", "--to", "ground",
            "--formula", sample("reach.eso"), "--structure", sample("path4.json")]
    runs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1] and runs[0]
