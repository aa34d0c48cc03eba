import json
import shutil
import subprocess
import sys

import pytest

from padic_uncertainty.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from padic_uncertainty.report import validate

SMALL = ["--primes", "3,5", "--dims", "2", "--trials", "2", "--seed", "7"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_matches_golden_text(golden_dir, capsys):
    code, out, _ = run(["eval", str(golden_dir / "worked_example.instance.json")], capsys)
    assert out == (golden_dir / "worked_example.txt").read_text()
    assert "Delta_x(A) = 5^3 = 125" in out
    # the instance includes the pair on which the max form of (ii) fails
    assert code == EXIT_VIOLATION


def test_eval_matches_golden_json(golden_dir, tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["eval", str(golden_dir / "worked_example.instance.json"), "--format", "json",
          "--out", str(out)])
    assert out.read_bytes() == (golden_dir / "worked_example.json").read_bytes()
    doc = json.loads(out.read_text())
    assert doc["delta_A"] == {"tag": "finite", "twice": 6}


def test_eval_selected_checks(tmp_path, golden_dir, capsys):
    doc = json.loads((golden_dir / "worked_example.instance.json").read_text())
    doc["checks"] = ["HRS_iii", "MP_plus"]
    path = tmp_path / "i.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["eval", str(path)], capsys)
    assert code == EXIT_OK
    assert "HRS_iii" in out and "HRS_i " not in out and "all checks hold" in out


@pytest.mark.parametrize("mutation, message", [
    (lambda d: d["x"].update(coords=[[0, "1"], [1, "1"]]), "<x,x> != 1"),
    (lambda d: d["A"].update(rows=[["1", "2"], ["0", "1"]]) or d.update(checks=["HRS_ii"]),
     "self-adjoint"),
    (lambda d: d["y"][0].update(coords=[[0, "1"]]), "<x,y> != 0"),
    (lambda d: d.update(p=6), "not prime"),
    (lambda d: d["x"].update(coords=[[0, "0.6"]]), "x.coords[0][1]"),
    (lambda d: d.pop("A"), "'A' is a required property"),
])
def test_eval_bad_input(tmp_path, golden_dir, capsys, mutation, message):
    doc = json.loads((golden_dir / "worked_example.instance.json").read_text())
    mutation(doc)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(["eval", str(path)], capsys)
    assert code == EXIT_USAGE
    assert message in err


def test_missing_file_and_bad_json(tmp_path, capsys):
    code, _, err = run(["eval", str(tmp_path / "nope.json")], capsys)
    assert code == EXIT_USAGE and "not found" in err
    (tmp_path / "x.json").write_text("{")
    code, _, err = run(["verify", "--config", str(tmp_path / "x.json")], capsys)
    assert code == EXIT_USAGE and "invalid JSON" in err


def test_config_errors_name_the_field(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dims": [2, 99]}))
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == EXIT_USAGE and "dims[1]" in err
    cfg.write_text(json.dumps({"colour": 1}))
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == EXIT_USAGE and "colour" in err
    code, _, err = run(["verify", "--primes", "4"], capsys)
    assert code == EXIT_USAGE and "primes" in err
    code, _, _ = run(["verify", "--dims", "two"], capsys)
    assert code == EXIT_USAGE
    code, _, _ = run(["frobnicate"], capsys)
    assert code == EXIT_USAGE


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"primes": [3], "dims": [2], "trials_per_cell": 1, "seed": 4}))
    _, out, _ = run(["verify", "--config", str(cfg), "--primes", "7"], capsys)
    doc = json.loads(out)
    assert doc["config"]["primes"] == [7] and doc["config"]["seed"] == 4


def test_verify_report_and_reproducibility(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code_a = main(["verify", *SMALL, "--out", str(a)])
    code_b = main(["verify", *SMALL, "--out", str(b)])
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    validate(da, "report")
    da.pop("wall_time"), db.pop("wall_time")
    assert da == db and code_a == code_b
    # exit code follows the failure count
    assert code_a == (EXIT_OK if da["failed"] == 0 else EXIT_VIOLATION)


def test_verify_formats(capsys):
    _, out, _ = run(["verify", *SMALL, "--format", "csv"], capsys)
    assert out.startswith("check,prime,dim,class,")
    _, out, _ = run(["verify", *SMALL, "--format", "text"], capsys)
    assert "total passed=" in out


def test_verify_without_hrs_ii_is_clean(capsys):
    code, out, _ = run(["identity", *SMALL], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert {c["check"] for c in doc["cells"]} == {"IDENT_ii", "NOTE_comm_zero",
                                                   "NOTE_anticomm_double"}
    assert doc["failed"] == 0


def test_mutate_flag_fails_verify(capsys):
    code, out, _ = run(["verify", *SMALL, "--mutate"], capsys)
    assert code == EXIT_VIOLATION and json.loads(out)["failed"] > 0


def test_selftest(capsys):
    code, out, _ = run(["selftest", "--trials", "1"], capsys)
    assert code == EXIT_OK and "selftest ok" in out


def test_help_and_version(capsys):
    assert main(["--help"]) == EXIT_OK
    assert main(["--version"]) == EXIT_OK


@pytest.mark.skipif(shutil.which("padic-uncertainty") is None, reason="script not installed")
def test_console_script(golden_dir):
    res = subprocess.run(
        ["padic-uncertainty", "eval", str(golden_dir / "worked_example.instance.json")],
        capture_output=True,
    )
    assert res.returncode == EXIT_VIOLATION
    assert res.stdout == (golden_dir / "worked_example.txt").read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "padic_uncertainty", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
