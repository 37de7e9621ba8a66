import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from dirtime.cli import main

PROBLEMS = Path(__file__).resolve().parent.parent / "demos" / "problems"
TWO_BALLS = str(PROBLEMS / "two_balls.json")
DISK = str(PROBLEMS / "disk_sqrt8.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def test_eval_two_balls(capsys):
    code, out, _ = run(capsys, "eval", TWO_BALLS, "--point=0,0")
    assert code == 0
    table = rows(out)
    assert table[0] == ["target_index", "T", "phi", "proj_x1", "proj_x2", "in_domain"]
    assert [float(r[1]) for r in table[1:]] == [3.0, 3.0]
    assert out.startswith("# dirtime ") and "input_sha256=" in out


def test_grad_convex_singleton(capsys):
    code, out, _ = run(capsys, "grad", DISK, "--point=-3,-3", "--kind", "convex", "--format", "json")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["min_norm_element"] == pytest.approx([-0.5, -0.5])
    assert res["slice"]["constraint"] == "eq-1"


def test_solve_and_certify(capsys):
    code, out, _ = run(capsys, "solve", TWO_BALLS, "--format", "json")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["best_value"] == pytest.approx(5.17157, abs=1e-3)
    code, out, _ = run(capsys, "certify", TWO_BALLS, "--point=0.7071067811865476,0.7071067811865476")
    assert code == 0
    assert all(r[-1] == "true" for r in rows(out)[1:])


def test_other_commands(capsys):
    for argv in (("ddir", DISK, "--point=-3,-3", "--direction=1,0"),
                 ("lipschitz", DISK, "--point=-3,-3"),
                 ("conjugate", DISK, "--point=-0.5,-0.5"),
                 ("oracle-check", TWO_BALLS, "--point=0,0", "--grid=-2,2,40")):
        code, out, err = run(capsys, *argv)
        assert code == 0, (argv, err)
    code, out, _ = run(capsys, "conjugate", DISK, "--point=-0.5,-0.5")
    assert float(rows(out)[1][1]) == pytest.approx(2.0)


def test_json_report_metadata(capsys):
    _, out, _ = run(capsys, "eval", TWO_BALLS, "--point=0,0", "--format", "json", "--seed", "4")
    d = json.loads(out)
    assert {"tool", "version", "command", "seed", "input_sha256", "result"} <= set(d)
    assert d["seed"] == 4 and d["result"]["objective"] == 6.0


def test_output_is_byte_identical(capsys):
    first = run(capsys, "lipschitz", DISK, "--point=-3,-3", "--format", "json")[1]
    second = run(capsys, "lipschitz", DISK, "--point=-3,-3", "--format", "json")[1]
    assert first == second


def test_validation_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dimension": 2, "targets": [{"set": {"type": "ball", "c": [0, 0], "r": -1},
                                                            "direction": [1, 0]}]}))
    code, _, err = run(capsys, "eval", str(bad), "--point=0,0")
    assert code == 2 and "targets[0].set" in err
    assert run(capsys, "eval", TWO_BALLS)[0] == 2
    assert run(capsys, "eval", TWO_BALLS, "--point=0,0,0")[0] == 2
    assert run(capsys, "eval", str(tmp_path / "missing.json"), "--point=0,0")[0] == 2
    assert run(capsys, "grad", DISK, "--point=0,0", "--kind", "holder")[0] == 2


def test_numerical_failure_exit_3(capsys):
    code, _, err = run(capsys, "grad", TWO_BALLS, "--point=0,3")
    assert code == 3 and err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dirtime", "eval", TWO_BALLS, "--point=0,0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "target_index" in proc.stdout
