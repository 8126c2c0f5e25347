"""Spectral fractional derivative and discrete Sobolev norms on periodic grids.

Grid functions are samples on [-L, L) with N a power of two. The fractional
derivative D^alpha is the Fourier multiplier (ik)^alpha taken in the principal
branch, with the zero mode and the Nyquist mode mapped to 0.
"""

import logging
from collections.abc import Sequence

import numpy as np

from ._errors import BoundaryDecayError, GridMismatchError, ParameterError
from ._internal import transforms
from .types import (
    BOUNDARY_TOL,
    ComplexArray,
    GridFunction,
    LimitRow,
    RealArray,
    WavenumberGrid,
    check_order,
)

logger = logging.getLogger(__name__)


def principal_power_ik(k: float, alpha: float) -> complex:
    """Return (ik)^alpha in the principal branch.

    (ik)^alpha = |k|^alpha exp(i alpha pi/2 sign k) for k != 0 and 0 for k = 0.
    At alpha = 1 the exact value ik is returned.
    """
    alpha = check_order(alpha)
    k = float(k)
    if k == 0.0:
        return 0j
    if alpha == 1.0:
        return 1j * k
    return complex(abs(k) ** alpha * np.exp(1j * alpha * (np.pi / 2) * np.sign(k)))


def wavenumbers(half_length: float, n: int) -> WavenumberGrid:
    """Wavenumbers pi*n/L of an N-point grid on [-L, L) in FFT ordering."""
    modes = (np.pi / half_length) * transforms.mode_indices(n).astype(np.float64)
    modes.setflags(write=False)
    return WavenumberGrid(modes=modes, half_length=float(half_length), nyquist_index=n // 2)


def integer_symbol(grid: WavenumberGrid, order: int) -> ComplexArray:
    """Symbol (ik)^m of the m-th derivative, built by repeated multiplication."""
    ik = 1j * grid.modes
    symbol = np.ones_like(ik)
    for _ in range(order):
        symbol = symbol * ik
    if order > 0:
        symbol[grid.nyquist_index] = 0.0
    return symbol


def frac_symbol(grid: WavenumberGrid, alpha: float) -> ComplexArray:
    """Symbol (ik)^alpha over the whole wavenumber grid."""
    alpha = check_order(alpha)
    if alpha == 1.0:
        return integer_symbol(grid, 1)
    k = grid.modes
    symbol = np.abs(k) ** alpha * np.exp(1j * alpha * (np.pi / 2) * np.sign(k))
    # sign(0) = 0 leaves |0|^alpha * 1 = 0 at the zero mode already.
    symbol[grid.nyquist_index] = 0.0
    return symbol.astype(np.complex128)


def check_boundary_decay(f: GridFunction, tolerance: float = BOUNDARY_TOL) -> None:
    """Raise if a non-periodic grid function is not negligible at +-L."""
    if f.periodic:
        return
    peak = f.max_abs()
    if peak == 0.0:
        return
    for side, sample in (("left", f.values[0]), ("right", f.values[-1])):
        magnitude = abs(sample) / peak
        if magnitude > tolerance:
            raise BoundaryDecayError(magnitude, tolerance, side)


def check_same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f.grid, g.grid)


def _apply(f: GridFunction, symbol: ComplexArray) -> GridFunction:
    # The operator acts on the 2L-periodic extension, so its output is periodic.
    values = transforms.apply_multiplier(f.values, symbol)
    return GridFunction(values, f.half_length, periodic=True)


def spectral_frac_derivative(f: GridFunction, alpha: float) -> GridFunction:
    """Spectral fractional derivative D^alpha f.

    Args:
        f: Samples that decay at the box boundary, or periodic samples.
        alpha: Order in (0, 1]. alpha = 1 is the spectral first derivative.

    Returns:
        The inverse transform of (ik_n)^alpha f^(k_n), flagged periodic.

    Raises:
        BoundaryDecayError: If f is not negligible at +-L.
    """
    alpha = check_order(alpha)
    check_boundary_decay(f)
    grid = wavenumbers(f.half_length, f.n)
    logger.debug("D^%g on grid L=%g, N=%d", alpha, f.half_length, f.n)
    return _apply(f, frac_symbol(grid, alpha))


def spectral_derivative(f: GridFunction, order: int = 1) -> GridFunction:
    """Integer-order spectral derivative d^m f/dx^m."""
    if order < 0:
        raise ParameterError(f"must be non-negative, got {order}", "order")
    check_boundary_decay(f)
    return _apply(f, integer_symbol(wavenumbers(f.half_length, f.n), order))


def sobolev_norm_unchecked(values: ComplexArray, half_length: float, s: float) -> float:
    """Discrete H^s norm without the boundary assertion."""
    n = values.shape[0]
    spectrum = transforms.forward(values, half_length)
    k = wavenumbers(half_length, n).modes
    dk = np.pi / half_length
    weights: RealArray = (1.0 + k**2) ** s
    total = float(np.sum(weights * np.abs(spectrum) ** 2)) * dk / (2.0 * np.pi)
    return float(np.sqrt(total))


def sobolev_norm(f: GridFunction, s: float) -> float:
    """Discrete H^s norm.

    The square root of (1/2pi) sum_n (1 + k_n^2)^s |f^(k_n)|^2 dk with
    dk = pi/L, where f^ is the integral-convention transform. At s = 0 this is
    the physical-space norm (h sum |f_j|^2)^(1/2).
    """
    check_boundary_decay(f)
    return sobolev_norm_unchecked(np.asarray(f.values), f.half_length, s)


def frac_derivative_bound(f: GridFunction, s: float, alpha: float) -> float:
    """Ratio ||D^alpha f||_{H^(s-alpha)} / ||f||_{H^s}.

    |(ik)^alpha| <= (1 + k^2)^(alpha/2) makes the ratio at most 1.
    """
    alpha = check_order(alpha)
    denominator = sobolev_norm(f, s)
    if denominator == 0.0:
        return 0.0
    derivative = spectral_frac_derivative(f, alpha)
    return sobolev_norm(derivative, s - alpha) / denominator


def limit_convergence_check(
    f: GridFunction, g: GridFunction, s: float, alphas: Sequence[float]
) -> list[LimitRow]:
    """Distance of the fractional Hirota operator from the classical one.

    For each alpha returns ||D^alpha f.g - D f.g||_{H^(s-1)}. On smooth
    decaying inputs the distances decrease to 0 as alpha -> 1.

    Raises:
        ParameterError: If s <= 1/2.
    """
    if s <= 0.5:
        raise ParameterError(f"must exceed 1/2, got {s}", "s")
    # bilinear builds on this module
    from .bilinear import hirota_frac_commutator

    check_same_grid(f, g)
    classical = hirota_frac_commutator(f, g, 1.0).values
    rows = []
    for alpha in alphas:
        alpha = check_order(alpha)
        difference = hirota_frac_commutator(f, g, alpha).values - classical
        distance = sobolev_norm_unchecked(difference, f.half_length, s - 1.0)
        logger.debug("alpha=%g: H^%g distance %.6e", alpha, s - 1.0, distance)
        rows.append(LimitRow(alpha=alpha, distance=distance))
    return rows
