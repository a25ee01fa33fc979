import json
import subprocess
import sys
from importlib import resources

import pytest

from sirsfold.cli import main


def data(name):
    return str(resources.files("sirsfold") / "data" / f"{name}.toml")


def test_analyze_fold_file(tmp_path, capsys):
    assert main(["analyze", "--params", data("fold"), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    sub_endemic = [e for e in doc["equilibria"] if e["regime"] == "Sub" and e["x"] > 0]
    assert len(sub_endemic) == 1
    assert sub_endemic[0]["multiplicity"] == "Double"
    assert sub_endemic[0]["x"] == pytest.approx(1 / 6)
    assert doc["e_SN"] == pytest.approx(8 / 3)
    assert doc["theorem1_case"] == "DoublePositive"
    assert any(d["quantity"] == "wD2F" for d in doc["discrepancies"])
    assert "Double" in capsys.readouterr().out


def test_analyze_cond1_reports_global_stability(tmp_path, capsys):
    assert main(["analyze", "--params", data("cond1"), "--out", str(tmp_path)]) == 0
    text = (tmp_path / "report.txt").read_text()
    assert "globally asymptotically stable disease-free equilibrium" in text


def test_analyze_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["analyze", "--params", data("endemic"), "--out", str(out), "--format", "columnar"]) == 0
    for name in ("report.txt", "report.json", "equilibria.tsv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_json_floats_carry_full_precision(tmp_path):
    main(["analyze", "--params", data("fold"), "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["scaled_sub"]["e"] == 8 / 3


def test_negative_d_exits_2_naming_field(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(open(data("fold")).read().replace("d = 2", "d = -2"))
    assert main(["analyze", "--params", str(bad), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "d:" in err


def test_missing_file_exits_2(tmp_path):
    assert main(["analyze", "--params", str(tmp_path / "nope.toml"), "--out", str(tmp_path)]) == 2


def test_scan_columnar_and_structured(tmp_path):
    assert main(["scan", "--params", data("fold"), "--parameter", "r", "--lo", "3.9", "--hi", "4.1",
                 "--steps", "3", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "scan.tsv").read_text().splitlines()
    assert lines[0].split("\t") == ["value", "x", "y", "regime", "multiplicity", "admissible", "label"]
    assert main(["scan", "--params", data("fold"), "--parameter", "r", "--lo", "3.9", "--hi", "4.1",
                 "--steps", "3", "--out", str(tmp_path), "--format", "structured"]) == 0
    doc = json.loads((tmp_path / "scan.json").read_text())
    assert [len(s["equilibria"]) for s in doc["samples"]][0] >= 3


def test_scan_rejects_single_step(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["scan", "--params", data("fold"), "--parameter", "r", "--lo", "1", "--hi", "2",
              "--steps", "1", "--out", str(tmp_path)])
    assert info.value.code == 2


def test_simulate_writes_trajectory_and_events(tmp_path):
    assert main(["simulate", "--params", data("endemic"), "--x-init", "2", "--y-init", "0.5",
                 "--t-end", "20", "--out", str(tmp_path)]) == 0
    header = (tmp_path / "trajectory.tsv").read_text().splitlines()[0]
    assert header == "t\tx\ty\tregime"
    assert len((tmp_path / "events.tsv").read_text().splitlines()) == 2


def test_simulate_numerical_failure_exits_3(tmp_path):
    bad = tmp_path / "slide.toml"
    # Sub field pushes x up at the capacity line while the saturated field pushes it down
    bad.write_text("A = 6\nd = 1\nlambda = 1\nnu = 0\nmu = 0.5\ntheta = 0\nr = 1\nn = 3\nI0 = 1\n")
    rc = main(["simulate", "--params", str(bad), "--x-init", "0.5", "--y-init", "0", "--t-end", "20",
               "--out", str(tmp_path)])
    assert rc == 3


def test_verify_subset_and_corrupted_override(tmp_path, capsys):
    assert main(["verify", "--only", "1", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "verify.json").read_text())
    assert summary["passed"] and summary["criteria"][0]["number"] == 1
    assert main(["verify", "--only", "1", "--override", "residual=1e-30", "--out", str(tmp_path)]) == 1
    assert "[FAIL]" in capsys.readouterr().out


def test_verify_unknown_override_exits_2(tmp_path):
    assert main(["verify", "--override", "nonsense=1", "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sirsfold", "analyze", "--params", data("cond2"),
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and "Cond2: holds" in proc.stdout
