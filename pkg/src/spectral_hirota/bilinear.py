"""Fractional and classical Hirota bilinear operators on grid functions.

The fractional operator D^alpha f.g is available in three forms:

- commutator: (D^alpha f) g - f (D^alpha g) with dealiased products,
- symbol: the bilinear multiplier (ik1)^alpha - (ik2)^alpha applied on the
  zero-padded grid and truncated once,
- kernel: the bilinear Marchaud integral on analytic handles.
"""

import logging
import math
from dataclasses import replace

import numpy as np
import numpy.typing as npt
from scipy.special import comb

from ._errors import ParameterError
from ._internal import transforms
from .functions import fits_box
from .grid import (
    check_boundary_decay,
    check_same_grid,
    frac_symbol,
    principal_power_ik,
    sobolev_norm,
    spectral_derivative,
    spectral_frac_derivative,
    wavenumbers,
)
from .marchaud import marchaud_kernel
from .types import (
    AnalyticFunction,
    BilinearForm,
    BilinearResult,
    ComplexArray,
    GridFunction,
    MarchaudResult,
    ProbeFamily,
    QuadratureSpec,
    SobolevProbeReport,
    check_order,
    grid_nodes,
)

logger = logging.getLogger(__name__)

# Maximum relative growth of the probe's max ratio under grid refinement.
REFINEMENT_GROWTH_LIMIT = 0.10


def hirota_frac_commutator(f: GridFunction, g: GridFunction, alpha: float) -> GridFunction:
    """(D^alpha f) g - f (D^alpha g) with 2x zero-padded products.

    Swapping f and g negates the result exactly and f = g gives exactly 0.
    """
    alpha = check_order(alpha)
    check_same_grid(f, g)
    df = spectral_frac_derivative(f, alpha).values
    dg = spectral_frac_derivative(g, alpha).values
    values = transforms.dealiased_product(df, g.values) - transforms.dealiased_product(
        f.values, dg
    )
    return GridFunction(values, f.half_length, periodic=True)


def hirota_frac_symbol(f: GridFunction, g: GridFunction, alpha: float) -> GridFunction:
    """Bilinear multiplier [(ik1)^alpha - (ik2)^alpha] f^(k1) g^(k2).

    Both factors are lifted to the 2N grid, the symbol is applied there to each
    slot, and the difference of products is truncated back once.
    """
    alpha = check_order(alpha)
    check_same_grid(f, g)
    check_boundary_decay(f)
    check_boundary_decay(g)

    fine_f = transforms.upsample(np.asarray(f.values))
    fine_g = transforms.upsample(np.asarray(g.values))
    symbol = frac_symbol(wavenumbers(f.half_length, fine_f.shape[0]), alpha)
    first = transforms.apply_multiplier(fine_f, symbol) * fine_g
    second = fine_f * transforms.apply_multiplier(fine_g, symbol)
    values = transforms.downsample(first - second, f.n)
    return GridFunction(values, f.half_length, periodic=True)


def hirota_classical(f: GridFunction, g: GridFunction, n: int) -> GridFunction:
    """Classical Hirota derivative D^n f.g.

    sum_{m=0}^{n} (-1)^m C(n, m) (d^{n-m} f)(d^m g), all derivatives spectral and
    all products dealiased.
    """
    if n < 1:
        raise ParameterError(f"must be a positive integer, got {n}", "n")
    check_same_grid(f, g)
    total = np.zeros(f.n, dtype=np.complex128)
    for m in range(n + 1):
        coefficient = (-1) ** m * comb(n, m, exact=True)
        left = spectral_derivative(f, n - m).values
        right = spectral_derivative(g, m).values
        total = total + coefficient * transforms.dealiased_product(left, right)
    return GridFunction(total, f.half_length, periodic=True)


def hirota_frac_kernel(
    f: AnalyticFunction,
    g: AnalyticFunction,
    xs: npt.ArrayLike,
    alpha: float,
    quad: QuadratureSpec | None = None,
) -> MarchaudResult:
    """Bilinear Marchaud kernel form at arbitrary points (0 < alpha < 1)."""
    return marchaud_kernel(f, g, xs, alpha, quad)


def hirota_frac(
    f: GridFunction | AnalyticFunction,
    g: GridFunction | AnalyticFunction,
    alpha: float,
    form: BilinearForm = "commutator",
    *,
    half_length: float | None = None,
    n: int | None = None,
    quad: QuadratureSpec | None = None,
) -> BilinearResult:
    """Dispatch to one of the three forms.

    The kernel form takes analytic handles and evaluates them, periodized, at
    the nodes of the grid given by ``half_length`` and ``n``.
    """
    match form:
        case "commutator" | "symbol":
            if not isinstance(f, GridFunction) or not isinstance(g, GridFunction):
                raise ParameterError("grid forms need GridFunction inputs", "form")
            op = hirota_frac_commutator if form == "commutator" else hirota_frac_symbol
            return BilinearResult(values=op(f, g, alpha), form_used=form)
        case "kernel":
            if isinstance(f, GridFunction) or isinstance(g, GridFunction):
                raise ParameterError("the kernel form needs analytic handles", "form")
            if half_length is None or n is None:
                raise ParameterError("the kernel form needs a grid (L, N)", "form")
            result = kernel_on_grid(f, g, half_length, n, alpha, quad)
            return BilinearResult(
                values=result.values, form_used="kernel", diagnostics=result
            )
        case _:
            raise ParameterError(f"unknown form {form!r}", "form")


def _on_box(h: AnalyticFunction, half_length: float) -> AnalyticFunction:
    # Periods that divide the box are replaced by the common period 2L.
    if h.period is None:
        return h.periodized(half_length)
    if fits_box(h, half_length):
        return replace(h, period=2.0 * half_length)
    return h


def kernel_on_grid(
    f: AnalyticFunction,
    g: AnalyticFunction,
    half_length: float,
    n: int,
    alpha: float,
    quad: QuadratureSpec | None = None,
) -> MarchaudResult:
    """Kernel form at the grid nodes, on the 2L-periodic extensions of f and g."""
    fp = _on_box(f, half_length)
    gp = _on_box(g, half_length)
    return marchaud_kernel(fp, gp, grid_nodes(half_length, n), alpha, quad)


# Sobolev bound probe


def single_mode_ratio(
    k1: float, k2: float, s: float, alpha: float, half_length: float
) -> float:
    """Closed-form probe ratio for f = e^{ik1 x}, g = e^{ik2 x} on [-L, L)."""
    symbol = abs(principal_power_ik(k1, alpha) - principal_power_ik(k2, alpha))
    numerator = symbol * (1.0 + (k1 + k2) ** 2) ** ((s - alpha) / 2.0)
    denominator = (
        math.sqrt(2.0 * half_length)
        * (1.0 + k1**2) ** (s / 2.0)
        * (1.0 + k2**2) ** (s / 2.0)
    )
    return numerator / denominator


def band_limited_coefficients(
    rng: np.random.Generator,
    count: int,
    band: int,
    half_length: float,
    envelope_width: float,
) -> ComplexArray:
    """Complex Gaussian coefficients of ``count`` random pairs on modes |m| <= band.

    Shape (count, 2, 2 band + 1); mode m has wavenumber pi m / L and is damped by
    exp(-(k / envelope_width)^2).
    """
    modes = np.arange(-band, band + 1)
    envelope = np.exp(-(((np.pi / half_length) * modes / envelope_width) ** 2))
    shape = (count, 2, modes.size)
    draws = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return draws * envelope


def synthesize(
    modes: npt.NDArray[np.int64],
    coefficients: ComplexArray,
    half_length: float,
    n: int,
) -> GridFunction:
    """Samples of sum_m c_m e^{i pi m x / L} on the N-point grid, flagged periodic."""
    # At x_j = -L + jh this is N * ifft of (-1)^m c_m.
    spectrum = np.zeros(n, dtype=np.complex128)
    np.add.at(spectrum, modes % n, np.where(modes % 2 == 0, 1.0, -1.0) * coefficients)
    return GridFunction(n * np.fft.ifft(spectrum), half_length, periodic=True)


def _probe_ratio(f: GridFunction, g: GridFunction, s: float, alpha: float) -> float:
    norm_f = sobolev_norm(f, s)
    norm_g = sobolev_norm(g, s)
    if norm_f == 0.0 or norm_g == 0.0:
        return 0.0
    product = hirota_frac_commutator(f, g, alpha)
    return sobolev_norm(product, s - alpha) / (norm_f * norm_g)


def sobolev_bound_probe(
    family: ProbeFamily,
    s: float,
    alpha: float,
    trials: int,
    *,
    seed: int = 42,
    sizes: tuple[int, ...] = (1024, 2048),
) -> SobolevProbeReport:
    """Empirical max of ||D^alpha f.g||_{H^(s-alpha)} / (||f||_{H^s} ||g||_{H^s}).

    The random pairs are drawn once from ``numpy.random.default_rng(seed)``
    on the band |k| < N_min pi/(4L) of the coarsest grid, then evaluated on
    every grid in ``sizes``. The bound is stable when the max ratio grows by
    less than 10% from the coarsest to the finest grid.

    Raises:
        ParameterError: If s <= 1/2, trials < 1 or sizes is empty.
    """
    if s <= 0.5:
        raise ParameterError(f"must exceed 1/2, got {s}", "s")
    if trials < 1:
        raise ParameterError(f"must be positive, got {trials}", "trials")
    if not sizes:
        raise ParameterError("at least one grid size is required", "sizes")
    alpha = check_order(alpha)
    sizes = tuple(sorted(sizes))
    half_length = family.half_length
    band = sizes[0] // 4 - 1
    rng = np.random.default_rng(seed)
    modes = np.arange(-band, band + 1, dtype=np.int64)

    match family.kind:
        case "band-limited":
            coefficients = band_limited_coefficients(
                rng, trials, band, half_length, family.envelope_width
            )
            pair_modes = np.broadcast_to(modes, (trials, 2, modes.size))
        case "single-mode":
            picked = rng.integers(-band, band + 1, size=(trials, 2))
            pair_modes = picked[:, :, None]
            coefficients = np.ones((trials, 2, 1), dtype=np.complex128)
        case _:
            raise ParameterError(f"unknown family {family.kind!r}", "family")

    max_ratio: dict[int, float] = {}
    closed_form_error: float | None = None
    for n in sizes:
        ratios = []
        for trial in range(trials):
            f = synthesize(pair_modes[trial, 0], coefficients[trial, 0], half_length, n)
            g = f if family.diagonal else synthesize(
                pair_modes[trial, 1], coefficients[trial, 1], half_length, n
            )
            ratio = _probe_ratio(f, g, s, alpha)
            ratios.append(ratio)
            if family.kind == "single-mode" and not family.diagonal:
                k1, k2 = (np.pi / half_length) * pair_modes[trial, :, 0]
                expected = single_mode_ratio(float(k1), float(k2), s, alpha, half_length)
                error = abs(ratio - expected)
                closed_form_error = max(closed_form_error or 0.0, error)
        max_ratio[n] = float(max(ratios))
        logger.debug("Sobolev probe N=%d: max ratio %.6e", n, max_ratio[n])

    first, last = max_ratio[sizes[0]], max_ratio[sizes[-1]]
    growth = (last - first) / first if first > 0 else 0.0
    stable = bool(np.isfinite(last)) and growth < REFINEMENT_GROWTH_LIMIT
    return SobolevProbeReport(
        s=s,
        alpha=alpha,
        trials=trials,
        seed=seed,
        family=family,
        max_ratio=max_ratio,
        growth=growth,
        stable=stable,
        closed_form_error=closed_form_error,
    )
