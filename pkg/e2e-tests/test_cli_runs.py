"""End-to-end runs of the spectral-hirota command line."""

import json

import pytest

from spectral_hirota import __version__
from spectral_hirota.cli import main


@pytest.mark.e2e
def test_full_suite_passes(run_dir, capsys):
    """Test that the default acceptance battery passes and writes its report."""
    report_path = run_dir / "suite.json"

    code = main(["suite", "--seed", "42", "--json", str(report_path)])

    out = capsys.readouterr().out
    assert code == 0, out
    document = json.loads(report_path.read_text(encoding="utf-8"))
    assert document["version"] == __version__
    assert document["seed"] == 42
    assert document["passed"] is True
    names = [check["name"] for check in document["checks"]]
    assert "marchaud-spectral equivalence" in names
    assert "one-soliton residual" in names
    assert all(check["passed"] for check in document["checks"] if check["gate"])


@pytest.mark.e2e
def test_suite_with_alpha_sweep(run_dir):
    """Test that swept orders add one gated row each."""
    report_path = run_dir / "sweep.json"

    code = main(
        [
            "suite",
            "--alpha-sweep=0.3:0.5:0.1",
            "--no-diagnostics",
            "--json",
            str(report_path),
        ]
    )

    assert code == 0
    document = json.loads(report_path.read_text(encoding="utf-8"))
    sweep_rows = [c for c in document["checks"] if c["name"].startswith("alpha sweep")]
    assert len(sweep_rows) == 3


@pytest.mark.e2e
def test_two_soliton_run_directory(run_dir):
    """Test a classical two-soliton run with PDE residual on disk."""
    code = main(
        [
            "soliton",
            "--alpha",
            "1",
            "--k",
            "-1",
            "--k",
            "-2",
            "--L",
            "40",
            "--n",
            "1024",
            "--t=-2:2:5",
            "--pde-residual",
            "--out-dir",
            str(run_dir),
        ]
    )

    assert code == 0
    assert {p.name for p in run_dir.iterdir()} == {
        "tau.json",
        "field.csv",
        "residual.json",
        "pde_residual.json",
    }
    residual = json.loads((run_dir / "residual.json").read_text(encoding="utf-8"))
    assert residual["pass"] is True
    assert residual["max_abs"] <= 1e-12
    pde = json.loads((run_dir / "pde_residual.json").read_text(encoding="utf-8"))
    assert pde["pass"] is True
    lines = (run_dir / "field.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + 1024 * 5
