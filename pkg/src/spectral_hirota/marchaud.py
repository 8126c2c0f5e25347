"""Marchaud singular-integral form of the fractional derivative.

For 0 < alpha < 1 the spectral derivative with symbol (ik)^alpha equals

    C_alpha * integral_0^inf (f(xi) - f(xi - y)) / y^(1 + alpha) dy,

with C_alpha = alpha / Gamma(1 - alpha). The forward shift f(xi + y) gives the
symbol (-ik)^alpha instead. The integral is evaluated by quadrature on
analytic handles, which makes it an independent check of the FFT route.
"""

import logging
from collections.abc import Callable

import numpy as np
import numpy.typing as npt
from scipy.special import gamma

from ._errors import ParameterError, SpectralHirotaError
from ._internal.quadrature import singular_rule, tail_completion
from .functions import fourier_mode
from .types import (
    AnalyticFunction,
    ComplexArray,
    Direction,
    MarchaudResult,
    QuadratureSpec,
    RealArray,
    check_order,
    grid_nodes,
)

logger = logging.getLogger(__name__)

# Relative agreement required between alpha/Gamma(1-alpha) and -1/Gamma(-alpha).
GAMMA_SELF_TEST_TOL = 1e-12

Difference = Callable[[RealArray, RealArray], ComplexArray]
FarTerm = Callable[[RealArray], ComplexArray]


def marchaud_constant(alpha: float) -> float:
    """C_alpha = alpha / Gamma(1 - alpha), cross-checked against -1/Gamma(-alpha).

    Raises:
        ParameterError: If alpha is not in (0, 1).
    """
    alpha = check_order(alpha, strict_below_one=True)
    value = float(alpha / gamma(1.0 - alpha))
    reflected = float(-1.0 / gamma(-alpha))
    if abs(value - reflected) > GAMMA_SELF_TEST_TOL * abs(value):
        raise SpectralHirotaError(
            f"Gamma self-test failed at alpha={alpha}: {value!r} != {reflected!r}"
        )
    return value


def _sign(direction: Direction) -> float:
    match direction:
        case "backward":
            return -1.0
        case "forward":
            return 1.0
        case _:
            raise ParameterError(f"unknown direction {direction!r}", "direction")


def _integrate(
    difference: Difference,
    far: FarTerm | None,
    points: RealArray,
    alpha: float,
    quad: QuadratureSpec,
    period: float | None,
) -> tuple[ComplexArray, ComplexArray]:
    """Integral of difference(xi, y) y^(-1-alpha) dy at every xi.

    Returns the result of the requested rule and of its half-resolution
    companion. ``far(xi)`` is the limit of the difference as y -> inf and
    closes the truncated tail when the rule is not periodic.
    """
    fine = singular_rule(alpha, quad, period)
    coarse = singular_rule(alpha, quad.coarse(), period)
    completion = 0.0 if period is not None else tail_completion(alpha, quad.y_max)

    values = np.empty(points.size, dtype=np.complex128)
    companion = np.empty(points.size, dtype=np.complex128)
    for start in range(0, points.size, quad.chunk_size):
        chunk = slice(start, start + quad.chunk_size)
        xi = points[chunk, None]
        values[chunk] = difference(xi, fine.nodes[None, :]) @ fine.weights
        companion[chunk] = difference(xi, coarse.nodes[None, :]) @ coarse.weights
        if far is not None and completion:
            closing = far(points[chunk]) * completion
            values[chunk] += closing
            companion[chunk] += closing
    return values, companion


def _finish(
    values: ComplexArray,
    companion: ComplexArray,
    c_alpha: float,
    tail_bound: float,
    direction: Direction,
    quad: QuadratureSpec,
) -> MarchaudResult:
    estimate = float(c_alpha * np.max(np.abs(values - companion), initial=0.0))
    values = c_alpha * values
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    converged = estimate <= quad.tolerance * scale
    logger.debug(
        "Marchaud %s: %d points, error estimate %.3e, tail bound %.3e",
        direction,
        values.size,
        estimate,
        tail_bound,
    )
    if not converged:
        logger.warning(
            "Marchaud quadrature did not reach tolerance %.1e (estimate %.3e)",
            quad.tolerance,
            estimate,
        )
    values.setflags(write=False)
    return MarchaudResult(
        values=values,
        direction=direction,
        tail_bound=tail_bound,
        error_estimate=estimate,
        converged=converged,
    )


def tail_bound(alpha: float, sup_norm: float, quad: QuadratureSpec) -> float:
    """2 M C_alpha / (alpha Ymax^alpha) for a function bounded by M."""
    return 2.0 * sup_norm * marchaud_constant(alpha) / (alpha * quad.y_max**alpha)


def marchaud_derivative(
    f: AnalyticFunction,
    xs: npt.ArrayLike,
    alpha: float,
    quad: QuadratureSpec | None = None,
    direction: Direction = "backward",
) -> MarchaudResult:
    """One-sided Marchaud derivative of an analytic handle at arbitrary points.

    Args:
        f: Function handle; periodic handles fold the tail exactly.
        xs: Evaluation points.
        alpha: Order in (0, 1).
        quad: Quadrature parameters (defaults to ``QuadratureSpec()``).
        direction: "backward" realizes (ik)^alpha, "forward" (-ik)^alpha.

    Returns:
        MarchaudResult with values, tail bound and the embedded error estimate.
    """
    alpha = check_order(alpha, strict_below_one=True)
    quad = quad or QuadratureSpec()
    sign = _sign(direction)
    c_alpha = marchaud_constant(alpha)
    points = np.asarray(xs, dtype=np.float64).ravel()

    def difference(xi: RealArray, y: RealArray) -> ComplexArray:
        return f(xi) - f(xi + sign * y)

    def far(xi: RealArray) -> ComplexArray:
        return f(xi) - f.far_value

    values, companion = _integrate(difference, far, points, alpha, quad, f.period)
    bound = 0.0 if f.period is not None else tail_bound(alpha, f.sup_norm, quad)
    return _finish(values, companion, c_alpha, bound, direction, quad)


def marchaud_kernel(
    f: AnalyticFunction,
    g: AnalyticFunction,
    xs: npt.ArrayLike,
    alpha: float,
    quad: QuadratureSpec | None = None,
) -> MarchaudResult:
    """Bilinear Marchaud kernel

        C_alpha * integral_0^inf [f(xi) g(xi-y) - f(xi-y) g(xi)] / y^(1+alpha) dy,

    the singular-integral form of (D^alpha f) g - f (D^alpha g). The integrand
    changes sign exactly when f and g are swapped.
    """
    alpha = check_order(alpha, strict_below_one=True)
    quad = quad or QuadratureSpec()
    c_alpha = marchaud_constant(alpha)
    points = np.asarray(xs, dtype=np.float64).ravel()
    period = f.period if f.period is not None and f.period == g.period else None

    def difference(xi: RealArray, y: RealArray) -> ComplexArray:
        return f(xi) * g(xi - y) - f(xi - y) * g(xi)

    def far(xi: RealArray) -> ComplexArray:
        return f(xi) * g.far_value - f.far_value * g(xi)

    values, companion = _integrate(difference, far, points, alpha, quad, period)
    bound = 0.0 if period is not None else tail_bound(alpha, f.sup_norm * g.sup_norm, quad)
    return _finish(values, companion, c_alpha, bound, "backward", quad)


def marchaud_on_grid(
    f: AnalyticFunction,
    half_length: float,
    n: int,
    alpha: float,
    quad: QuadratureSpec | None = None,
    direction: Direction = "backward",
) -> MarchaudResult:
    """Marchaud derivative at the grid nodes of [-L, L).

    The spectral operator on the box acts on the 2L-periodic extension of the
    samples, so a non-periodic handle is periodized before integration.
    """
    handle = f if f.period is not None else f.periodized(half_length)
    return marchaud_derivative(
        handle, grid_nodes(half_length, n), alpha, quad, direction
    )


def scalar_symbol_integral(
    k: float, alpha: float, quad: QuadratureSpec | None = None
) -> complex:
    """integral_0^inf (1 - e^{-iky}) / y^(1+alpha) dy.

    Equals -Gamma(-alpha) (ik)^alpha; this is the backward integral of the mode
    e^{ikx} at xi = 0 without the constant C_alpha.
    """
    alpha = check_order(alpha, strict_below_one=True)
    if k == 0:
        return 0j
    result = marchaud_derivative(fourier_mode(k), [0.0], alpha, quad)
    return complex(result.values[0] / marchaud_constant(alpha))
