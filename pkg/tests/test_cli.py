import csv
import json
import subprocess
import sys

import pytest

from ecsm.cli import builtin_golden, load_golden, main, validate_tables
from ecsm.molecules import builtin_table1


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_energy_outputs(capsys):
    assert run(["energy", "--mu", "0.5041", "--de", "4.746768", "--delta", "2.993"]) == 0
    assert capsys.readouterr().out.strip() == "-13.091031"
    assert run(["energy", "--mu", "0.5", "--de", "1", "--delta", "2"]) == 0
    assert capsys.readouterr().out.strip() == "-5.000000"
    assert run(["energy", "--mu", "0.5", "--de", "1", "--delta", "2", "--full-precision"]) == 0
    assert capsys.readouterr().out.strip() == "-5.0000000000000000e+00"


def test_energy_rejects_zero_delta(capsys):
    assert run(["energy", "--mu", "0.5", "--de", "1", "--delta", "0"]) == 2
    assert "delta" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["energy", "--mu", "x", "--de", "1", "--delta", "1"],
        ["energy", "--de", "1", "--delta", "1"],
        ["figures", "--fig", "9", "--out", "unused"],
        ["compare", "--molecule", "Xe2"],
        ["wavefunction", "--molecule", "Xe2"],
        ["tables", "--input", "does-not-exist.csv"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == 2


def test_tables_row_counts(tmp_path):
    out = tmp_path / "energies.csv"
    assert run(["tables", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 253 and list(rows[0]) == ["molecule", "n", "variant", "energy"]
    assert [r["molecule"] for r in rows[::11]] == [m.name for m in builtin_table1()]
    assert (tmp_path / "energies.csv.manifest.json").exists()
    assert run(["tables", "--n-max", "0", "--out", str(out)]) == 0
    assert len(_rows(out)) == 23


def test_tables_empty_registry(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text("name,mu_amu,De,delta\n")
    out = tmp_path / "energies.csv"
    assert run(["tables", "--input", str(src), "--out", str(out)]) == 0
    assert out.read_text() == "molecule,n,variant,energy\n"


def test_validate_builtin_passes(tmp_path):
    report = tmp_path / "report.json"
    assert run(["validate", "--report", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["passed"] and data["n_entries"] == 253
    assert data["variants"]["literal"]["n_fail"] > 253 // 2
    h2_5 = next(e for e in data["entries"] if e["molecule"] == "H2" and e["n"] == 5)
    assert h2_5["expected"] == -308.159133 and h2_5["pass"]


def test_validate_literal_fails():
    assert run(["validate", "--variant", "literal"]) == 1


def test_validate_perturbed_entry(tmp_path):
    lines = builtin_golden().splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("CO,3,"))
    name, n, e = lines[i].split(",")
    lines[i] = f"{name},{n},{float(e) * 1.01:.6f}"
    golden = tmp_path / "golden.csv"
    golden.write_text("\n".join(lines) + "\n")
    report = tmp_path / "report.json"
    assert run(["validate", "--expected", str(golden), "--report", str(report)]) == 1
    assert json.loads(report.read_text())["failures"] == ["CO n=3"]


def test_validate_bad_schema(tmp_path):
    golden = tmp_path / "golden.csv"
    golden.write_text("a,b\n1,2\n")
    assert run(["validate", "--expected", str(golden)]) == 2


def test_validate_tables_function():
    report = validate_tables(load_golden(builtin_golden()), builtin_table1())
    assert report["n_fail"] == 0
    # entries above 1e-3 relative are tiny energies covered by the absolute floor
    for e in report["entries"]:
        if e["rel_dev"] > 1e-3:
            assert e["abs_dev"] <= 2e-6


def test_byte_identical_reruns(tmp_path):
    outputs = {}
    for attempt in range(2):
        d = tmp_path / "run"
        assert run(["tables", "--out", str(d.with_suffix(".csv"))]) == 0
        assert run(["figures", "--fig", "4", "--out", str(d)]) == 0
        assert run(["curve", "--de", "2", "--delta", "0.5", "--out", str(tmp_path / "curve.csv")]) == 0
        outputs[attempt] = {p.name: p.read_bytes() for p in sorted(tmp_path.rglob("*")) if p.is_file()}
    assert outputs[0] == outputs[1]
    assert "fig4.manifest.json" in outputs[0] and "curve.csv.manifest.json" in outputs[0]
    manifest = json.loads(outputs[0]["curve.csv.manifest.json"])
    assert manifest["subcommand"] == "curve" and manifest["parameters"]["de"] == 2.0


@pytest.mark.parametrize("fig", range(1, 7))
def test_energy_figures_decrease(fig, tmp_path):
    assert run(["figures", "--fig", str(fig), "--out", str(tmp_path)]) == 0
    files = sorted(tmp_path.glob(f"fig{fig}_*.csv"))
    assert files
    for f in files:
        series = {}
        for r in _rows(f):
            series.setdefault(r["delta"], []).append(float(r["E"]))
        for values in series.values():
            assert all(b < a for a, b in zip(values, values[1:]))


def test_fig1_first_point(tmp_path):
    from ecsm.spectrum import energy

    assert run(["figures", "--fig", "1", "--out", str(tmp_path)]) == 0
    first = _rows(tmp_path / "fig1_table.csv")[0]
    assert float(first["delta"]) == 0.005 and first["n"] == "0"
    assert float(first["E"]) == pytest.approx(energy(0.5041, 4.746768, 0.005, 0).energy, rel=1e-12)


def test_fig7_decays(tmp_path):
    assert run(["figures", "--fig", "7", "--out", str(tmp_path)]) == 0
    for f in tmp_path.glob("fig7_*.csv"):
        rows = _rows(f)
        last = {}
        for r in rows:
            last[r["delta"]] = float(r["V"])
        assert all(abs(v) < 1e-8 * 4.746768 for v in last.values())


def test_curve_and_wavefunction(tmp_path, capsys):
    assert run(["curve", "--de", "1", "--delta", "1", "--n-points", "3"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "r,V"
    assert run(["wavefunction", "--molecule", "H2", "--variant", "nu", "--r-max", "40"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "r,u,u_normalized"
    assert run(["wavefunction", "--molecule", "Na2", "--variant", "nu"]) == 2


def test_compare_reports(tmp_path):
    out = tmp_path / "cmp.json"
    assert run(["compare", "--molecule", "Na2", "--variant", "nu", "--method", "fd", "--n-grid", "2000", "--out", str(out)]) == 0
    report = json.loads(out.read_text())["reports"][0]
    assert "RegimeError" in report["error"]
    assert run(["compare", "--molecule", "H2", "--variant", "table", "--method", "fd", "--out", str(out)]) == 0
    report = json.loads(out.read_text())["reports"][0]
    assert report["levels"] and report["n_oracle"] >= 1


def test_black_box_subprocess(tmp_path):
    cmd = [sys.executable, "-m", "ecsm.cli"]
    ok = subprocess.run(cmd + ["validate"], capture_output=True, text=True)
    bad = subprocess.run(cmd + ["validate", "--variant", "literal"], capture_output=True, text=True)
    usage = subprocess.run(cmd + ["figures", "--fig", "9", "--out", str(tmp_path)], capture_output=True, text=True)
    assert (ok.returncode, bad.returncode, usage.returncode) == (0, 1, 2)
    assert usage.stderr
