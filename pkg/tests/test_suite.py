"""Tests for the acceptance battery."""

import math
import time
from contextlib import aclosing

import anyio
import numpy as np

from spectral_hirota import (
    CheckResult,
    QuadratureSpec,
    SuiteOptions,
    SuiteReport,
    run_checks,
    run_suite,
)
from spectral_hirota import suite as suite_module
from spectral_hirota.functions import gaussian, sech_pulse
from spectral_hirota.suite import (
    Check,
    _alpha_sweep_check,
    battery,
    check_diagnostics,
    check_kp,
    check_pde_residual,
    check_profile_laws,
    check_single_mode,
    check_soliton_algebra,
    decaying_pairs,
    format_table,
    kernel_form_gap,
)


def _rows(name: str, count: int = 1, delay: float = 0.0):
    def run(options: SuiteOptions) -> list[CheckResult]:
        time.sleep(delay)
        return [CheckResult(f"{name} {j}", 0.0, 1.0, True) for j in range(count)]

    return run


def _boom(options: SuiteOptions) -> list[CheckResult]:
    raise RuntimeError("quadrature exploded")


class TestBattery:
    """Test battery composition."""

    def test_default_checks(self):
        """Test the gated checks come first and diagnostics last."""
        names = [check.name for check in battery(SuiteOptions())]
        assert names[0] == "single-mode multiplier"
        assert names[-1] == "diagnostics"
        assert "KP one-soliton" in names

    def test_alpha_sweep_and_no_diagnostics(self):
        """Test sweep checks are appended and diagnostics can be dropped."""
        options = SuiteOptions(alpha_sweep=[0.3, 0.7], include_diagnostics=False)
        names = [check.name for check in battery(options)]
        assert names[-2:] == ["alpha sweep 0.3", "alpha sweep 0.7"]
        assert "diagnostics" not in names


class TestChecks:
    """Test individual acceptance checks."""

    def test_single_mode(self):
        """Test the single-mode multiplier check passes."""
        (row,) = check_single_mode(SuiteOptions())
        assert row.passed, row
        assert row.value <= 1e-12

    def test_soliton_algebra(self):
        """Test exact residuals and the negative control."""
        one, two, control = check_soliton_algebra(SuiteOptions())
        assert one.value == 0.0 and one.passed
        assert two.passed, two
        assert control.passed, control
        assert control.value > 1e-4

    def test_kp(self):
        """Test the KP rows pass."""
        rows = check_kp(SuiteOptions())
        assert all(row.passed for row in rows), rows

    def test_alpha_sweep(self):
        """Test one sweep order."""
        (row,) = _alpha_sweep_check(0.35)(SuiteOptions())
        assert row.name == "alpha sweep 0.35"
        assert row.passed, row

    def test_profile_laws(self):
        """Test profile, amplitude, speed and phase-shift laws are gated."""
        rows = check_profile_laws(SuiteOptions())
        assert [row.name for row in rows] == [
            "soliton profile",
            "amplitude law",
            "speed law",
            "two-soliton phase shifts",
        ]
        assert all(row.gate for row in rows)
        assert all(row.passed for row in rows), rows
        assert rows[-1].value <= 1e-6

    def test_diagnostics_are_not_gated(self):
        """Test the formal residual and log identities carry no verdict."""
        rows = check_diagnostics(SuiteOptions())
        assert [row.name for row in rows] == [
            "PDE residual alpha=0.5",
            "log-derivative identities",
        ]
        assert not any(row.gate for row in rows)

    def test_pde_residual(self):
        """Test the classical PDE residual."""
        (row,) = check_pde_residual(SuiteOptions())
        assert row.passed, row

    def test_decaying_pairs_fit_the_box(self):
        """Test kernel-check inputs are negligible at the box boundary."""
        pairs = decaying_pairs(np.random.default_rng(7), 6)
        assert len(pairs) == 6
        assert pairs[1][1].label.startswith("sech")
        edges = np.array([-32.0, 31.75])
        for f, g in pairs:
            assert np.max(np.abs(f(edges))) <= 1e-12
            assert np.max(np.abs(g(edges))) <= 1e-12

    def test_kernel_form_matches_commutator(self):
        """Test the kernel form agrees with the commutator on decaying inputs."""
        pairs = [
            (gaussian(0.0, 1.0), gaussian(1.0, 1.2)),
            (gaussian(-0.5, 0.9), sech_pulse(0.5)),
        ]
        gap = kernel_form_gap(pairs, (0.25, 0.5, 0.75), QuadratureSpec())
        assert gap <= 1e-6


class TestRunChecks:
    """Test the concurrent runner."""

    def test_rows_keep_declaration_order(self, monkeypatch):
        """Test slow early checks still come out first."""
        checks = [
            Check("slow", _rows("slow", 2, delay=0.2)),
            Check("fast", _rows("fast", 1)),
            Check("faster", _rows("faster", 1)),
        ]
        monkeypatch.setattr(suite_module, "battery", lambda options: checks)

        async def _test():
            return [row async for row in run_checks(SuiteOptions(max_workers=3))]

        rows = anyio.run(_test)
        assert [row.name for row in rows] == ["slow 0", "slow 1", "fast 0", "faster 0"]
        assert [row.order for row in rows] == [0, 1, 2, 3]

    def test_failing_check_becomes_failed_row(self, monkeypatch):
        """Test an exception yields one failed gated row and the rest still run."""
        checks = [Check("boom", _boom), Check("fine", _rows("fine"))]
        monkeypatch.setattr(suite_module, "battery", lambda options: checks)

        report = anyio.run(run_suite, SuiteOptions(max_workers=1))
        boom, fine = report.checks
        assert boom.name == "boom"
        assert not boom.passed
        assert boom.gate
        assert math.isnan(boom.value)
        assert "RuntimeError: quadrature exploded" in boom.detail
        assert fine.passed
        assert not report.passed
        assert report.failures == [boom]

    def test_leaving_early_cancels_pending_checks(self, monkeypatch):
        """Test breaking out after the first row stops the queued checks."""
        ran = []

        def record(name: str, delay: float = 0.0):
            def run(options: SuiteOptions) -> list[CheckResult]:
                ran.append(name)
                return _rows(name, delay=delay)(options)

            return run

        checks = [
            Check("first", record("first")),
            Check("second", record("second", delay=0.2)),
            Check("third", record("third")),
        ]
        monkeypatch.setattr(suite_module, "battery", lambda options: checks)

        async def _test():
            async with aclosing(run_checks(SuiteOptions(max_workers=1))) as rows:
                async for row in rows:
                    return row

        row = anyio.run(_test)
        assert row.name == "first 0"
        assert "third" not in ran

    def test_seed_is_recorded(self, monkeypatch):
        """Test the report carries the seed."""
        monkeypatch.setattr(
            suite_module, "battery", lambda options: [Check("a", _rows("a"))]
        )
        report = anyio.run(run_suite, SuiteOptions(seed=7))
        assert report.seed == 7
        assert report.passed


class TestFormatTable:
    """Test the plain-text table."""

    def test_columns(self):
        """Test pass, fail and info cells."""
        report = SuiteReport(
            seed=1,
            checks=(
                CheckResult("alpha", 1e-13, 1e-12, True),
                CheckResult("beta", 2.0, 1.0, False),
                CheckResult("gamma", 0.5, 1.0, True, gate=False),
            ),
        )
        lines = format_table(report).splitlines()
        assert lines[0].split() == ["check", "value", "tolerance", "pass"]
        assert set(lines[1]) <= {"-", " "}
        assert lines[2].split() == ["alpha", "1.000e-13", "1.0e-12", "PASS"]
        assert lines[3].endswith("FAIL")
        assert lines[4].endswith("info")

    def test_empty_report(self):
        """Test a report with no rows is a header only."""
        lines = format_table(SuiteReport(seed=0, checks=())).splitlines()
        assert len(lines) == 2
