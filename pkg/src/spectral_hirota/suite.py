"""Acceptance battery for the fractional Hirota toolkit."""

import logging
import math
from collections.abc import AsyncIterator, Callable, Sequence
from contextlib import suppress
from dataclasses import dataclass, replace
from functools import partial
from itertools import pairwise

import anyio
import anyio.to_thread
import numpy as np
from anyio.abc import ObjectSendStream, TaskGroup

from .bilinear import (
    REFINEMENT_GROWTH_LIMIT,
    band_limited_coefficients,
    hirota_classical,
    hirota_frac_commutator,
    hirota_frac_symbol,
    kernel_on_grid,
    sobolev_bound_probe,
    synthesize,
)
from .exp_sum import (
    SYMBOLIC_TOL,
    bilinear_residual_symbolic,
    kp_one_soliton,
    mixed_term_identity,
    one_soliton_tau,
    two_soliton_tau,
)
from .functions import (
    fourier_mode,
    gaussian,
    sample_on_grid,
    sech_pulse,
    x_gaussian,
)
from .grid import (
    limit_convergence_check,
    principal_power_ik,
    sobolev_norm_unchecked,
    spectral_frac_derivative,
)
from .kdv import (
    FORMAL_NOTE,
    LAW_TOL,
    PDE_TOL,
    PROFILE_TOL,
    amplitude_check,
    log_identity_check,
    pde_residual,
    soliton_profile_check,
    speed_check,
    two_soliton_phase_shifts,
)
from .marchaud import marchaud_derivative, marchaud_on_grid
from .types import (
    AnalyticFunction,
    BilinearOperatorSpec,
    CheckResult,
    ComplexArray,
    ProbeFamily,
    QuadratureSpec,
    SpaceTimeGrid,
    SuiteOptions,
    SuiteReport,
    grid_nodes,
)

logger = logging.getLogger(__name__)

SINGLE_MODE_ALPHAS = (0.25, 0.5, 0.75, 1.0)
SINGLE_MODE_K = (1.0, 2.0, 5.0)
QUADRATURE_ALPHAS = (0.25, 0.5, 0.75)
SOLITON_K = (-3.0, -2.0, -1.0, -0.5)
SOLITON_ALPHAS = tuple(round(0.1 * j, 10) for j in range(1, 11))
SOLITON_PAIRS = ((-1.0, -2.0), (-1.0, -3.0), (-0.5, -2.0))
KP_TRIPLES = (
    (-1.0, 0.5, 1),
    (-2.0, 1.0, -1),
    (-1.5, -0.5, 1),
    (-1.0, 0.0, 1),
    (-2.0, 0.0, -1),
)

MULTIPLIER_TOL = 1e-12
QUADRATURE_TOL = 1e-6
IDENTITY_TOL = 1e-12
NEGATIVE_CONTROL_FLOOR = 1e-4
PHASE_SHIFT_TOL = 1e-6

BILINEAR_PAIRS = 50
KERNEL_PAIRS = 50
KERNEL_HALF_LENGTH = 32.0
KERNEL_N = 256
PROBE_TRIALS = 100

CheckFn = Callable[[SuiteOptions], list[CheckResult]]


@dataclass(frozen=True)
class Check:
    """A named group of acceptance rows computed by one function."""

    name: str
    run: CheckFn


def _row(
    name: str,
    value: float,
    tolerance: float,
    passed: bool | None = None,
    *,
    gate: bool = True,
    detail: str = "",
) -> CheckResult:
    return CheckResult(
        name=name,
        value=float(value),
        tolerance=tolerance,
        passed=(value <= tolerance) if passed is None else passed,
        gate=gate,
        detail=detail,
    )


def _relative(values: ComplexArray, reference: ComplexArray) -> float:
    scale = float(np.max(np.abs(reference), initial=0.0))
    return float(np.max(np.abs(values - reference), initial=0.0)) / max(scale, 1.0)


# Spectral multiplier and quadrature


def check_single_mode(options: SuiteOptions) -> list[CheckResult]:
    """D^alpha e^{ikx} = (ik)^alpha e^{ikx} on resolved modes of [-pi, pi)."""
    worst = 0.0
    for k in SINGLE_MODE_K:
        f = sample_on_grid(fourier_mode(k), math.pi, 64)
        for alpha in SINGLE_MODE_ALPHAS:
            expected = principal_power_ik(k, alpha) * f.values
            error = np.max(np.abs(spectral_frac_derivative(f, alpha).values - expected))
            worst = max(worst, float(error))
    return [_row("single-mode multiplier", worst, MULTIPLIER_TOL)]


def check_marchaud_equivalence(options: SuiteOptions) -> list[CheckResult]:
    """Marchaud quadrature against the spectral operator, both directions."""
    quad = options.quadrature
    half_length, n = 30.0, 512
    worst = 0.0
    for handle in (gaussian(), sech_pulse()):
        f = sample_on_grid(handle, half_length, n)
        for alpha in QUADRATURE_ALPHAS:
            spectral = spectral_frac_derivative(f, alpha).values
            marchaud = marchaud_on_grid(handle, half_length, n, alpha, quad).values
            discrepancy = np.linalg.norm(marchaud - spectral) / np.linalg.norm(spectral)
            logger.debug("%s alpha=%g: relative L2 %.3e", handle.label, alpha, discrepancy)
            worst = max(worst, float(discrepancy))

    mode = fourier_mode(1.0)
    xs = grid_nodes(math.pi, 16)
    forward_worst = 0.0
    for alpha in QUADRATURE_ALPHAS:
        result = marchaud_derivative(mode, xs, alpha, quad, direction="forward")
        expected = principal_power_ik(-1.0, alpha) * mode(xs)
        forward_worst = max(forward_worst, _relative(result.values, expected))
    return [
        _row("marchaud-spectral equivalence", worst, QUADRATURE_TOL),
        _row("marchaud forward shift", forward_worst, QUADRATURE_TOL),
    ]


# Bilinear operator


def decaying_pairs(
    rng: np.random.Generator, count: int
) -> list[tuple[AnalyticFunction, AnalyticFunction]]:
    """Random Gaussian pairs with distinct centres; every other partner is a sech."""
    pairs = []
    for j in range(count):
        center = float(rng.uniform(-1.0, 1.0))
        shifted = center + float(rng.uniform(0.5, 1.5))
        w1, w2 = (float(w) for w in rng.uniform(0.8, 1.5, size=2))
        partner = sech_pulse(shifted) if j % 2 else gaussian(shifted, w2)
        pairs.append((gaussian(center, w1), partner))
    return pairs


def kernel_form_gap(
    pairs: Sequence[tuple[AnalyticFunction, AnalyticFunction]],
    alphas: Sequence[float],
    quad: QuadratureSpec,
    half_length: float = KERNEL_HALF_LENGTH,
    n: int = KERNEL_N,
) -> float:
    """Worst relative L2 distance between the kernel and commutator forms."""
    worst = 0.0
    for fh, gh in pairs:
        f = sample_on_grid(fh, half_length, n)
        g = sample_on_grid(gh, half_length, n)
        for alpha in alphas:
            kernel = kernel_on_grid(fh, gh, half_length, n, alpha, quad).values
            commutator = hirota_frac_commutator(f, g, alpha).values
            gap = np.linalg.norm(kernel - commutator) / np.linalg.norm(commutator)
            worst = max(worst, float(gap))
    return worst


def check_bilinear_identities(options: SuiteOptions) -> list[CheckResult]:
    """Algebraic identities of the fractional Hirota operator on random pairs."""
    half_length, n = 20.0, 64
    band = n // 4 - 1
    modes = np.arange(-band, band + 1)
    rng = np.random.default_rng(options.seed)
    coefficients = band_limited_coefficients(rng, BILINEAR_PAIRS, band, half_length, 4.0)
    pairs = [
        (
            synthesize(modes, coefficients[j, 0], half_length, n),
            synthesize(modes, coefficients[j, 1], half_length, n),
        )
        for j in range(BILINEAR_PAIRS)
    ]
    a, b = 0.7 - 0.2j, -1.3 + 0.4j

    skew = diagonal = linearity = symbol_gap = 0.0
    for j, (f, g) in enumerate(pairs):
        h = pairs[(j + 1) % BILINEAR_PAIRS][0]
        mixed = f.with_values(a * f.values + b * h.values)
        for alpha in QUADRATURE_ALPHAS:
            fg = hirota_frac_commutator(f, g, alpha).values
            gf = hirota_frac_commutator(g, f, alpha).values
            skew = max(skew, float(np.max(np.abs(fg + gf))))
            diagonal = max(
                diagonal, float(np.max(np.abs(hirota_frac_commutator(f, f, alpha).values)))
            )
            combined = a * fg + b * hirota_frac_commutator(h, g, alpha).values
            linearity = max(
                linearity,
                _relative(hirota_frac_commutator(mixed, g, alpha).values, combined),
            )
            symbol = hirota_frac_symbol(f, g, alpha).values
            symbol_gap = max(symbol_gap, _relative(symbol, fg))

    kernel_gap = kernel_form_gap(
        decaying_pairs(rng, KERNEL_PAIRS), QUADRATURE_ALPHAS, options.quadrature
    )

    detail = f"{BILINEAR_PAIRS} pairs, alpha in {list(QUADRATURE_ALPHAS)}"
    return [
        _row("bilinear skew-symmetry", skew, 0.0, skew == 0.0, detail=detail),
        _row("bilinear diagonal", diagonal, 0.0, diagonal == 0.0, detail=detail),
        _row("bilinearity", linearity, IDENTITY_TOL, detail=detail),
        _row("commutator vs symbol", symbol_gap, IDENTITY_TOL, detail=detail),
        _row(
            "commutator vs kernel",
            kernel_gap,
            QUADRATURE_TOL,
            detail=f"{KERNEL_PAIRS} decaying pairs, alpha in {list(QUADRATURE_ALPHAS)}",
        ),
    ]


def check_sobolev_probe(options: SuiteOptions) -> list[CheckResult]:
    """Boundedness of the Sobolev ratio under grid refinement."""
    report = sobolev_bound_probe(
        ProbeFamily(), 1.0, 0.5, PROBE_TRIALS, seed=options.seed
    )
    ratios = ", ".join(f"N={n}: {r:.6g}" for n, r in report.max_ratio.items())
    return [
        _row(
            "sobolev probe growth",
            report.growth,
            REFINEMENT_GROWTH_LIMIT,
            report.stable,
            detail=ratios,
        )
    ]


def check_classical_limit(options: SuiteOptions) -> list[CheckResult]:
    """Convergence of D^alpha f.g to D f.g as alpha -> 1."""
    half_length, n, s = 30.0, 512, 1.0
    test_pairs = (
        (gaussian(), sech_pulse()),
        (x_gaussian(), gaussian(1.0, 1.5)),
    )
    worst_ratio = 0.0
    at_one = 0.0
    distances = []
    for fh, gh in test_pairs:
        f = sample_on_grid(fh, half_length, n)
        g = sample_on_grid(gh, half_length, n)
        rows = limit_convergence_check(f, g, s, (0.9, 0.99, 0.999))
        distances.extend(f"{r.distance:.3e}" for r in rows)
        for before, after in pairwise(rows):
            worst_ratio = max(worst_ratio, after.distance / before.distance)
        gap = (
            hirota_frac_commutator(f, g, 1.0).values - hirota_classical(f, g, 1).values
        )
        at_one = max(at_one, sobolev_norm_unchecked(gap, half_length, s - 1.0))
    return [
        _row(
            "classical limit monotone",
            worst_ratio,
            1.0,
            worst_ratio < 1.0,
            detail="distances " + ", ".join(distances),
        ),
        _row("classical limit at alpha=1", at_one, IDENTITY_TOL),
    ]


# Solitons


def check_soliton_algebra(options: SuiteOptions) -> list[CheckResult]:
    """Exact one-soliton residuals and the two-soliton interaction coefficient."""
    kdv = BilinearOperatorSpec.kdv()
    one = 0.0
    for alpha in SOLITON_ALPHAS:
        for k in SOLITON_K:
            report = bilinear_residual_symbolic(kdv, one_soliton_tau(k, 0.0, alpha))
            one = max(one, report.max_abs)

    two = 0.0
    control = math.inf
    for alpha in SOLITON_ALPHAS:
        for k1, k2 in SOLITON_PAIRS:
            tau = two_soliton_tau(k1, k2, 0.0, 0.0, alpha)
            two = max(two, bilinear_residual_symbolic(kdv, tau).max_abs)
            a12 = ((k1 - k2) / (k1 + k2)) ** 2
            perturbed = two_soliton_tau(k1, k2, 0.0, 0.0, alpha, a12=1.01 * a12)
            control = min(control, bilinear_residual_symbolic(kdv, perturbed).max_abs)
    return [
        _row("one-soliton residual", one, 0.0, one == 0.0),
        _row("two-soliton residual", two, SYMBOLIC_TOL),
        _row(
            "two-soliton negative control",
            control,
            NEGATIVE_CONTROL_FLOOR,
            control > NEGATIVE_CONTROL_FLOOR,
            detail="A12 perturbed by 1%",
        ),
    ]


def check_profile_laws(options: SuiteOptions) -> list[CheckResult]:
    """One-soliton profile, amplitude and speed, and two-soliton phase shifts."""
    grid = SpaceTimeGrid(30.0, 1024, (-1.0, 0.0, 1.0))
    profile = amplitude = speed = 0.0
    for alpha in (0.5, 1.0):
        for k in (-1.0, -2.0):
            profile = max(profile, soliton_profile_check(k, 0.0, alpha, grid).max_abs)
            amplitude = max(amplitude, amplitude_check(k, alpha, t=0.5).max_abs)
            speed = max(speed, speed_check(k, alpha).max_abs)
    shifts = [
        shift
        for alpha in (0.5, 1.0)
        for shift in two_soliton_phase_shifts(-1.0, -2.0, alpha)
    ]
    shift_detail = ", ".join(
        f"k={s.k:g}: {s.measured:.6f} vs {s.predicted:.6f}" for s in shifts
    )
    return [
        _row("soliton profile", profile, PROFILE_TOL),
        _row("amplitude law", amplitude, LAW_TOL),
        _row("speed law", speed, LAW_TOL),
        _row(
            "two-soliton phase shifts",
            max(s.error for s in shifts),
            PHASE_SHIFT_TOL,
            detail=shift_detail,
        ),
    ]


def check_pde_residual(options: SuiteOptions) -> list[CheckResult]:
    """Classical KdV residual of one- and two-soliton fields."""
    grid = SpaceTimeGrid(30.0, 1024, tuple(np.linspace(-2.0, 2.0, 9)))
    worst = 0.0
    for tau in (
        one_soliton_tau(-1.0, 0.0, 1.0),
        two_soliton_tau(-1.0, -2.0, 0.0, 0.0, 1.0),
    ):
        worst = max(worst, pde_residual(tau, 1.0, grid).max_abs)
    return [_row("classical PDE residual", worst, PDE_TOL)]


def check_kp(options: SuiteOptions) -> list[CheckResult]:
    """KP one-soliton residuals and the ell = 0 reduction to KdV."""
    worst = 0.0
    mismatches = 0
    for alpha in (0.5, 1.0):
        for k, ell, sign in KP_TRIPLES:
            tau = kp_one_soliton(k, ell, sign, 0.0, alpha)
            report = bilinear_residual_symbolic(BilinearOperatorSpec.kp(sign), tau)
            worst = max(worst, report.max_abs)
            if ell == 0.0 and tau.terms != one_soliton_tau(k, 0.0, alpha).terms:
                mismatches += 1
    return [
        _row("KP one-soliton residual", worst, 0.0, worst == 0.0),
        _row(
            "KP reduction to KdV",
            mismatches,
            0.0,
            mismatches == 0,
            detail="ell = 0 tau equals the KdV one-soliton",
        ),
    ]


def _alpha_sweep_check(alpha: float) -> CheckFn:
    def run(options: SuiteOptions) -> list[CheckResult]:
        kdv = BilinearOperatorSpec.kdv()
        worst = 0.0
        for k in SOLITON_K:
            worst = max(
                worst, bilinear_residual_symbolic(kdv, one_soliton_tau(k, 0.0, alpha)).max_abs
            )
        for k1, k2 in SOLITON_PAIRS:
            tau = two_soliton_tau(k1, k2, 0.0, 0.0, alpha)
            worst = max(worst, bilinear_residual_symbolic(kdv, tau).max_abs)
            worst = max(worst, mixed_term_identity(tau).max_abs)
        return [_row(f"alpha sweep {alpha:g}", worst, SYMBOLIC_TOL)]

    return run


# Diagnostics (not gated)


def check_diagnostics(options: SuiteOptions) -> list[CheckResult]:
    """Formal alpha < 1 residual and log identities."""
    small = SpaceTimeGrid(10.0, 32, tuple(np.linspace(-1.0, 1.0, 5)))
    formal = pde_residual(one_soliton_tau(-1.0, 0.0, 0.5), 0.5, small, options.quadrature)

    grid = SpaceTimeGrid(30.0, 256, (-1.0, 0.0, 1.0))
    identity = log_identity_check(two_soliton_tau(-1.0, -2.0, 0.0, 0.0, 1.0), grid)
    return [
        _row(
            "PDE residual alpha=0.5",
            formal.max_abs,
            PDE_TOL,
            gate=False,
            detail=FORMAL_NOTE,
        ),
        _row("log-derivative identities", identity.max_abs, LAW_TOL, gate=False),
    ]


def battery(options: SuiteOptions) -> list[Check]:
    """Checks in report order."""
    checks = [
        Check("single-mode multiplier", check_single_mode),
        Check("marchaud equivalence", check_marchaud_equivalence),
        Check("bilinear identities", check_bilinear_identities),
        Check("sobolev probe", check_sobolev_probe),
        Check("classical limit", check_classical_limit),
        Check("soliton algebra", check_soliton_algebra),
        Check("profile laws", check_profile_laws),
        Check("classical PDE residual", check_pde_residual),
        Check("KP one-soliton", check_kp),
    ]
    checks.extend(
        Check(f"alpha sweep {alpha:g}", _alpha_sweep_check(alpha))
        for alpha in options.alpha_sweep
    )
    if options.include_diagnostics:
        checks.append(Check("diagnostics", check_diagnostics))
    return checks


async def _run_one(
    index: int,
    check: Check,
    options: SuiteOptions,
    limiter: anyio.CapacityLimiter,
    send: ObjectSendStream[tuple[int, list[CheckResult]]],
) -> None:
    async with send:
        try:
            results = await anyio.to_thread.run_sync(
                partial(check.run, options), limiter=limiter
            )
        except Exception as e:
            logger.error("Check %r failed with %s: %s", check.name, type(e).__name__, e)
            results = [
                CheckResult(
                    name=check.name,
                    value=math.nan,
                    tolerance=math.nan,
                    passed=False,
                    detail=f"{type(e).__name__}: {e}",
                )
            ]
        logger.debug("Check %r finished", check.name)
        try:
            await send.send((index, results))
        except anyio.BrokenResourceError:
            logger.debug("Check %r finished after the run was closed", check.name)


class SuiteRun:
    """One battery run: workers in a task group, rows through a memory stream.

    ``start`` enters the task group and schedules every check; ``close``
    cancels whatever is still pending and waits for the group to exit.
    """

    def __init__(self, options: SuiteOptions):
        self.options = options
        self.checks = battery(options)
        self._send, self._receive = anyio.create_memory_object_stream[
            tuple[int, list[CheckResult]]
        ](max_buffer_size=len(self.checks))
        self._tg: TaskGroup | None = None

    async def start(self) -> None:
        if self._tg is not None:
            return
        limiter = anyio.CapacityLimiter(max(1, self.options.max_workers))
        self._tg = anyio.create_task_group()
        await self._tg.__aenter__()
        async with self._send:
            for index, check in enumerate(self.checks):
                self._tg.start_soon(
                    _run_one, index, check, self.options, limiter, self._send.clone()
                )

    async def receive_rows(self) -> AsyncIterator[CheckResult]:
        """Rows in declaration order, numbered through ``order``."""
        pending: dict[int, list[CheckResult]] = {}
        next_index = 0
        position = 0
        async with self._receive:
            async for index, results in self._receive:
                pending[index] = results
                while next_index in pending:
                    for result in pending.pop(next_index):
                        yield replace(result, order=position)
                        position += 1
                    next_index += 1

    async def close(self) -> None:
        self._receive.close()
        if self._tg is not None:
            self._tg.cancel_scope.cancel()
            with suppress(anyio.get_cancelled_exc_class()):
                await self._tg.__aexit__(None, None, None)
            self._tg = None


async def run_checks(options: SuiteOptions | None = None) -> AsyncIterator[CheckResult]:
    """
    Run the acceptance battery and stream its rows.

    Each check runs in a worker thread; at most ``options.max_workers`` run at
    once. Rows are yielded in declaration order regardless of which check
    finishes first, so the output is deterministic. Leaving the loop early
    cancels the checks that have not started.

    A check that raises does not stop the battery: it yields one failed gated
    row whose detail names the exception.

    Args:
        options: Suite options (defaults to SuiteOptions() if None).

    Yields:
        CheckResult rows, numbered through ``order``.

    Example:
        ```python
        async for row in run_checks(SuiteOptions(alpha_sweep=[0.3, 0.7])):
            print(row.name, row.passed)
        ```
    """
    if options is None:
        options = SuiteOptions()
    run = SuiteRun(options)
    try:
        await run.start()
        async for row in run.receive_rows():
            yield row
    finally:
        await run.close()


async def run_suite(options: SuiteOptions | None = None) -> SuiteReport:
    """Run the whole battery and collect it."""
    if options is None:
        options = SuiteOptions()
    rows = [row async for row in run_checks(options)]
    report = SuiteReport(seed=options.seed, checks=tuple(rows))
    logger.debug(
        "Suite finished: %d rows, %d gate failures", len(rows), len(report.failures)
    )
    return report


def format_table(report: SuiteReport) -> str:
    """Plain-text table of name, value, tolerance and pass."""
    header = ("check", "value", "tolerance", "pass")
    rows = [
        (
            row.name,
            f"{row.value:.3e}",
            f"{row.tolerance:.1e}",
            ("PASS" if row.passed else "FAIL") if row.gate else "info",
        )
        for row in report.checks
    ]
    widths = [max(len(r[i]) for r in (header, *rows)) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(r, widths, strict=True))
        for r in (header, *rows)
    ]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
