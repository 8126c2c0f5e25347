"""Tests for the command-line front end."""

import json

import numpy as np
import pytest

from spectral_hirota import CheckResult, __version__
from spectral_hirota import cli as cli_module
from spectral_hirota import suite as suite_module
from spectral_hirota._internal.serialization import read_csv_columns, write_csv
from spectral_hirota.cli import (
    EXIT_GATE,
    EXIT_OK,
    EXIT_QUALITY,
    EXIT_USAGE,
    build_parser,
    main,
)
from spectral_hirota.suite import Check
from spectral_hirota.types import ProbeFamily, SobolevProbeReport, grid_nodes


class TestParser:
    """Test argument parsing."""

    def test_version(self, capsys):
        """Test --version prints the package version."""
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])
        assert exc_info.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_unknown_command(self):
        """Test unknown subcommands are argparse errors."""
        with pytest.raises(SystemExit) as exc_info:
            main(["integrate"])
        assert exc_info.value.code == EXIT_USAGE

    def test_bad_choice(self):
        """Test invalid choices are rejected by argparse."""
        with pytest.raises(SystemExit) as exc_info:
            main(["bilinear", "--alpha", "0.5", "--form", "wavelet"])
        assert exc_info.value.code == EXIT_USAGE

    def test_unset_flags_are_absent(self):
        """Test unset flags do not override config values."""
        namespace = vars(build_parser().parse_args(["deriv", "--alpha", "0.5"]))
        assert namespace == {"command": "deriv", "alpha": "0.5"}

    def test_quadrature_flags(self):
        """Test quadrature flags map onto quad.* keys."""
        namespace = vars(
            build_parser().parse_args(["deriv", "--quad-inner-nodes", "64"])
        )
        assert namespace["quad.inner_nodes"] == "64"


class TestDeriv:
    """Test the deriv subcommand."""

    def test_csv_to_stdout(self, capsys):
        """Test CSV columns on stdout."""
        code = main(["deriv", "--alpha", "0.5", "--func", "gaussian", "--L", "20", "--n", "64"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "x,d_re,d_im"
        assert len(lines) == 65

    def test_missing_alpha(self, capsys):
        """Test a missing order is a usage error."""
        assert main(["deriv", "--func", "gaussian"]) == EXIT_USAGE
        err = capsys.readouterr().err
        assert "usage:" in err
        assert "Missing required setting: alpha" in err

    def test_compare_marchaud(self, tmp_path):
        """Test the JSON output carries the Marchaud comparison."""
        out = tmp_path / "deriv.json"
        code = main(
            [
                "deriv",
                "--alpha",
                "0.5",
                "--func",
                "gaussian",
                "--L",
                "20",
                "--n",
                "128",
                "--compare-marchaud",
                "--format",
                "json",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["meta"]["converged"] is True
        assert max(document["columns"]["discrepancy"]) <= 1e-6
        assert len(document["columns"]["x"]) == 128

    def test_compare_skipped_at_alpha_one(self, tmp_path, caplog):
        """Test alpha = 1 skips the Marchaud comparison with a warning."""
        out = tmp_path / "deriv.csv"
        code = main(
            ["deriv", "--alpha", "1", "--L", "20", "--n", "64", "--compare-marchaud", "--out", str(out)]
        )
        assert code == EXIT_OK
        assert "discrepancy" not in read_csv_columns(out)
        assert "comparison skipped" in caplog.text

    def test_strict_quality_flag(self, tmp_path):
        """Test --strict exits 3 when the quadrature does not converge."""
        code = main(
            [
                "deriv",
                "--alpha",
                "0.5",
                "--func",
                "mode:40",
                "--n",
                "16",
                "--compare-marchaud",
                "--quad-inner-nodes",
                "32",
                "--quad-tail-nodes",
                "32",
                "--strict",
                "--out",
                str(tmp_path / "d.csv"),
            ]
        )
        assert code == EXIT_QUALITY

    def test_mode_defaults_to_unit_box(self, tmp_path):
        """Test Fourier modes default to [-pi, pi)."""
        out = tmp_path / "mode.csv"
        assert main(["deriv", "--alpha", "0.5", "--func", "mode:1", "--n", "16", "--out", str(out)]) == EXIT_OK
        columns = read_csv_columns(out)
        np.testing.assert_allclose(columns["x"], grid_nodes(np.pi, 16))
        expected = np.exp(1j * np.pi / 4) * np.exp(1j * np.asarray(columns["x"]))
        np.testing.assert_allclose(columns["d_re"], expected.real, atol=1e-12)

    def test_from_csv(self, tmp_path):
        """Test samples read from a CSV file."""
        source = tmp_path / "f.csv"
        x = grid_nodes(20.0, 256)
        with source.open("w", encoding="utf-8", newline="") as stream:
            write_csv(stream, ("x", "f_re"), zip(x, np.exp(-(x**2)), strict=True))
        out = tmp_path / "d.csv"
        code = main(
            ["deriv", "--alpha", "1", "--func", "from-csv", "--input", str(source), "--out", str(out)]
        )
        assert code == EXIT_OK
        np.testing.assert_allclose(
            read_csv_columns(out)["d_re"], -2 * x * np.exp(-(x**2)), atol=1e-6
        )

    def test_from_csv_without_input(self, capsys):
        """Test from-csv needs an input file."""
        assert main(["deriv", "--alpha", "0.5", "--func", "from-csv"]) == EXIT_USAGE
        assert "from-csv needs an input file" in capsys.readouterr().err

    def test_boundary_error(self, capsys):
        """Test a non-decaying function reports an error."""
        assert main(["deriv", "--alpha", "0.5", "--func", "sech", "--L", "5", "--n", "64"]) == EXIT_USAGE
        assert "boundary" in capsys.readouterr().err


class TestBilinear:
    """Test the bilinear subcommand."""

    @pytest.mark.parametrize("form", ["commutator", "symbol"])
    def test_grid_forms(self, tmp_path, form):
        """Test grid forms write their columns."""
        out = tmp_path / "b.csv"
        code = main(
            [
                "bilinear",
                "--alpha",
                "0.5",
                "--func",
                "gaussian",
                "--func2",
                "x-gaussian",
                "--L",
                "20",
                "--n",
                "128",
                "--form",
                form,
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert list(read_csv_columns(out)) == ["x", "b_re", "b_im"]

    def test_kernel_form(self, tmp_path):
        """Test the kernel form on Fourier modes."""
        out = tmp_path / "b.json"
        code = main(
            [
                "bilinear",
                "--alpha",
                "0.5",
                "--func",
                "mode:1",
                "--func2",
                "mode:2",
                "--n",
                "16",
                "--form",
                "kernel",
                "--format",
                "json",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["meta"]["form"] == "kernel"
        x = np.asarray(document["columns"]["x"])
        factor = 1j**0.5 - (2j) ** 0.5
        expected = factor * np.exp(3j * x)
        np.testing.assert_allclose(document["columns"]["b_re"], expected.real, atol=1e-7)


class TestSoliton:
    """Test the soliton and kp subcommands."""

    def test_out_dir(self, tmp_path):
        """Test the run directory layout."""
        out_dir = tmp_path / "run1"
        code = main(
            [
                "soliton",
                "--alpha",
                "1",
                "--k",
                "-1",
                "--k",
                "-2",
                "--n",
                "128",
                "--t=-1:1:3",
                "--pde-residual",
                "--out-dir",
                str(out_dir),
            ]
        )
        assert code == EXIT_OK
        assert sorted(p.name for p in out_dir.iterdir()) == [
            "field.csv",
            "pde_residual.json",
            "residual.json",
            "tau.json",
        ]
        residual = json.loads((out_dir / "residual.json").read_text(encoding="utf-8"))
        assert residual["pass"] is True
        assert len(json.loads((out_dir / "tau.json").read_text(encoding="utf-8"))) == 4
        pde = json.loads((out_dir / "pde_residual.json").read_text(encoding="utf-8"))
        assert pde["pass"] is True
        assert pde["grid"] == {"Lx": 30.0, "Nx": 128, "tmin": -1.0, "tmax": 1.0, "Nt": 3}
        field = (out_dir / "field.csv").read_text(encoding="utf-8").splitlines()
        assert field[0] == "x,t,u_re,u_im"
        assert len(field) == 1 + 3 * 128

    def test_stdout_document(self, capsys):
        """Test the JSON document on stdout."""
        assert main(["soliton", "--alpha", "0.5", "--k", "-1", "--n", "16"]) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["residual"]["max_abs"] == 0.0
        assert "pde_residual" not in document

    def test_wavenumber_count(self, capsys):
        """Test three wavenumbers are a usage error."""
        argv = ["soliton", "--alpha", "0.5", "--k", "-1", "--k", "-2", "--k", "-3"]
        assert main(argv) == EXIT_USAGE
        assert "one or two wavenumbers required" in capsys.readouterr().err

    def test_degenerate_pair(self, capsys):
        """Test k1 + k2 = 0 is reported."""
        assert main(["soliton", "--alpha", "0.5", "--k", "1", "--k", "-1"]) == EXIT_USAGE
        assert "pole" in capsys.readouterr().err

    def test_kp(self, capsys):
        """Test the KP subcommand on stdout."""
        code = main(
            ["kp", "--alpha", "1", "--k", "-1", "--ell", "0.5", "--sigma", "1", "--n", "16"]
        )
        assert code == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["residual"]["pass"] is True
        assert document["tau"][1]["ell"] == [0.5, 0.0]


class TestOtherCommands:
    """Test limit-check, sobolev-probe, suite and config files."""

    def test_limit_check(self, tmp_path):
        """Test the distance table."""
        out = tmp_path / "limit.csv"
        code = main(
            [
                "limit-check",
                "--func",
                "gaussian",
                "--func2",
                "x-gaussian",
                "--L",
                "20",
                "--n",
                "128",
                "--alphas",
                "0.9,0.99,1.0",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        columns = read_csv_columns(out)
        assert columns["alpha"] == [0.9, 0.99, 1.0]
        assert columns["distance"][0] > columns["distance"][1] > columns["distance"][2]

    def test_sobolev_probe(self, tmp_path):
        """Test the probe report."""
        out = tmp_path / "probe.json"
        code = main(
            ["sobolev-probe", "--trials", "3", "--sizes", "64,128", "--out", str(out)]
        )
        assert code == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["stable"] is True
        assert set(document["max_ratio"]) == {"64", "128"}
        assert document["family"] == "band-limited"

    def test_sobolev_strict_mismatch(self, tmp_path, monkeypatch):
        """Test --strict turns a closed-form mismatch into a quality exit."""
        report = SobolevProbeReport(
            s=1.0,
            alpha=0.5,
            trials=1,
            seed=42,
            family=ProbeFamily(kind="single-mode"),
            max_ratio={64: 2.0, 128: 2.0},
            growth=0.0,
            stable=True,
            closed_form_error=1e-3,
        )
        monkeypatch.setattr(cli_module, "sobolev_bound_probe", lambda *a, **k: report)
        argv = ["sobolev-probe", "--family", "single-mode", "--out", str(tmp_path / "p.json")]
        assert main(argv) == EXIT_OK
        assert main([*argv, "--strict"]) == EXIT_QUALITY

    def test_sobolev_strict_single_mode(self, tmp_path):
        """Test the single-mode family matches its closed form under --strict."""
        out = tmp_path / "probe.json"
        code = main(
            [
                "sobolev-probe",
                "--family",
                "single-mode",
                "--trials",
                "4",
                "--sizes",
                "64,128",
                "--strict",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["closed_form_error"] is not None

    def test_suite(self, tmp_path, monkeypatch, capsys):
        """Test the suite table, JSON report and exit code."""
        rows = [
            CheckResult("good", 0.0, 1.0, True),
            CheckResult("bad", 2.0, 1.0, False),
        ]
        monkeypatch.setattr(
            suite_module, "battery", lambda options: [Check("x", lambda o: rows)]
        )
        report_path = tmp_path / "report.json"
        code = main(["suite", "--seed", "9", "--json", str(report_path)])
        assert code == EXIT_GATE
        assert "FAIL" in capsys.readouterr().out
        document = json.loads(report_path.read_text(encoding="utf-8"))
        assert document["version"] == __version__
        assert document["seed"] == 9
        assert document["passed"] is False
        assert [c["name"] for c in document["checks"]] == ["good", "bad"]

    def test_config_file(self, tmp_path):
        """Test settings from a config file, overridden by flags."""
        config = tmp_path / "run.cfg"
        config.write_text(
            "# deriv run\nalpha = 0.25\nfunc = gaussian\nL = 20\nn = 32\nformat = json\n",
            encoding="utf-8",
        )
        out = tmp_path / "d.json"
        code = main(["deriv", "--config", str(config), "--alpha", "0.5", "--out", str(out)])
        assert code == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["meta"]["alpha"] == 0.5
        assert document["meta"]["N"] == 32

    def test_unknown_config_key(self, tmp_path, capsys):
        """Test unknown config keys are configuration errors."""
        config = tmp_path / "run.cfg"
        config.write_text("alpah = 0.5\n", encoding="utf-8")
        assert main(["deriv", "--config", str(config)]) == EXIT_USAGE
        assert "Unknown key" in capsys.readouterr().err
