"""Fields from tau-functions and residuals of the fractional KdV equation.

The field is u = 2 (ln F)_xx. Every x- and t-derivative is taken exactly from
the exponential sum: with normalized weights w_j = c_j e^{theta_j} / F the
ratios F^(n)/F are sum_j w_j k_j^n, and the log-derivatives follow from them by
a recursion. Only the fractional time derivative for alpha < 1 is numerical.
"""

import logging
import math
from collections.abc import Sequence
from itertools import pairwise
from typing import IO, Literal

import numpy as np
import numpy.typing as npt
from scipy.special import comb

from ._errors import ParameterError, SingularTauError
from ._internal.serialization import write_csv
from .exp_sum import (
    ExpSum,
    apply_bilinear_symbolic,
    dispersion_omega,
    kp_one_soliton,
    one_soliton_tau,
    soliton_params,
    tau_from_params,
)
from .grid import spectral_derivative
from .marchaud import marchaud_derivative
from .types import (
    AnalyticFunction,
    BilinearOperatorSpec,
    ComplexArray,
    GridFunction,
    PhaseShift,
    QuadratureSpec,
    RealArray,
    ResidualReport,
    SpaceTimeGrid,
    check_order,
)

logger = logging.getLogger(__name__)

# |F| below this fraction of sum_j |c_j e^{theta_j}| counts as a zero of F.
SINGULAR_TOL = 1e-14

PROFILE_TOL = 1e-12
LAW_TOL = 1e-10
PDE_TOL = 1e-8
FORMAL_NOTE = "formal regime α<1"

XDerivatives = Literal["exact", "spectral"]


def _normalized_weights(
    f: ExpSum, x: npt.ArrayLike, t: npt.ArrayLike, y: npt.ArrayLike = 0.0
) -> ComplexArray:
    exponents = f.exponents(x, y, t)
    c = f.arrays()[0]
    if not f.terms:
        xb, tb = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        raise SingularTauError(float(xb.flat[0]), float(tb.flat[0]), 0.0)
    shift = np.max(exponents.real, axis=-1, keepdims=True)
    weights = c * np.exp(exponents - shift)
    total = np.sum(weights, axis=-1)
    scale = np.sum(np.abs(weights), axis=-1)
    singular = np.abs(total) <= SINGULAR_TOL * scale
    if np.any(singular):
        xb, tb = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        index = int(np.argmax(singular))
        xs, ts = np.broadcast_to(xb, singular.shape), np.broadcast_to(tb, singular.shape)
        raise SingularTauError(
            float(xs.flat[index]),
            float(ts.flat[index]),
            float(np.abs(total).flat[index] / scale.flat[index]),
        )
    return weights / total[..., None]


def _ratios(weights: ComplexArray, k: ComplexArray, order: int) -> list[ComplexArray]:
    # r_n = F^(n) / F for n = 0..order.
    ratios = [np.ones(weights.shape[:-1], dtype=np.complex128)]
    power = np.ones_like(k)
    for _ in range(order):
        power = power * k
        ratios.append(np.sum(weights * power, axis=-1))
    return ratios


def _log_derivatives(ratios: list[ComplexArray]) -> list[ComplexArray]:
    # l_n = r_n - sum_{j=0}^{n-2} C(n-1, j) l_{j+1} r_{n-1-j}; index 0 unused.
    logs: list[ComplexArray] = [np.zeros_like(ratios[0])]
    for n in range(1, len(ratios)):
        value = ratios[n].copy()
        for j in range(n - 1):
            value -= comb(n - 1, j, exact=True) * logs[j + 1] * ratios[n - 1 - j]
        logs.append(value)
    return logs


def log_x_derivatives(
    f: ExpSum,
    x: npt.ArrayLike,
    t: npt.ArrayLike,
    order: int,
    y: npt.ArrayLike = 0.0,
) -> list[ComplexArray]:
    """[(ln F), (ln F)_x, ..., d^order/dx^order ln F] at broadcast points.

    Entry 0 is a placeholder of zeros; ln F itself is never needed.

    Raises:
        SingularTauError: If F vanishes at one of the points.
    """
    weights = _normalized_weights(f, x, t, y)
    k = f.arrays()[1]
    return _log_derivatives(_ratios(weights, k, order))


def u_at(
    f: ExpSum, x: npt.ArrayLike, t: npt.ArrayLike, y: npt.ArrayLike = 0.0
) -> ComplexArray:
    """u = 2 (ln F)_xx at broadcast points."""
    return 2.0 * log_x_derivatives(f, x, t, 2, y)[2]


def u_from_tau(f: ExpSum, grid: SpaceTimeGrid, y: float = 0.0) -> ComplexArray:
    """u = 2 (F F_xx - F_x^2) / F^2 on the grid, shape (len(times), N_x).

    Raises:
        SingularTauError: If F vanishes somewhere on the grid.
    """
    x = grid.x_nodes[None, :]
    t = grid.t_nodes[:, None]
    return u_at(f, x, t, y)


def _u_t(f: ExpSum, x: npt.ArrayLike, t: npt.ArrayLike) -> ComplexArray:
    # u_t = 2 phi_xxt with phi = ln F, from mixed ratios F_{x^a t^b} / F.
    weights = _normalized_weights(f, x, t)
    _, k, _, omega, _ = f.arrays()
    r_x = np.sum(weights * k, axis=-1)
    r_xx = np.sum(weights * k * k, axis=-1)
    r_t = np.sum(weights * omega, axis=-1)
    r_xt = np.sum(weights * k * omega, axis=-1)
    r_xxt = np.sum(weights * k * k * omega, axis=-1)
    phi_xxt = r_xxt - r_t * r_xx - 2.0 * r_x * r_xt + 2.0 * r_x * r_x * r_t
    return 2.0 * phi_xxt


def _stable_sech2(z: RealArray) -> RealArray:
    e = np.exp(-2.0 * np.abs(z))
    return 4.0 * e / (1.0 + e) ** 2


def soliton_profile(k: float, theta: RealArray) -> RealArray:
    """(k^2 / 2) sech^2(theta / 2), which equals 2 d^2/dx^2 ln(1 + e^theta)."""
    return 0.5 * k * k * _stable_sech2(0.5 * theta)


def _real_negative(k: complex, name: str = "k") -> float:
    k = complex(k)
    if k.imag != 0.0 or k.real >= 0.0:
        raise ParameterError(f"the real soliton needs a real k < 0, got {k}", name)
    return k.real


def soliton_profile_check(
    k: float,
    delta: float,
    alpha: float,
    grid: SpaceTimeGrid,
    tolerance: float = PROFILE_TOL,
) -> ResidualReport:
    """Max |u_from_tau - (k^2/2) sech^2(theta/2)| for the one-soliton."""
    k = _real_negative(k)
    alpha = check_order(alpha)
    f = one_soliton_tau(k, delta, alpha)
    omega = dispersion_omega(k, alpha).omega.real
    x = grid.x_nodes[None, :]
    t = grid.t_nodes[:, None]
    theta = k * x + omega * t + float(np.real(delta))
    residual = u_from_tau(f, grid) - soliton_profile(k, theta)
    return ResidualReport.from_residual(
        residual,
        tolerance,
        grid=grid.metadata(),
        notes=f"one-soliton k={k:g}, alpha={alpha:g}",
        weight=2.0 * grid.half_length / grid.n_x,
    )


def kp_profile_check(
    k: float,
    ell: float,
    sigma_sign: int,
    delta: float,
    alpha: float,
    grid: SpaceTimeGrid,
    y: float = 0.0,
    tolerance: float = PROFILE_TOL,
) -> ResidualReport:
    """KP one-soliton field 2 (ln F)_xx at fixed y against (k^2/2) sech^2(theta/2)."""
    k = _real_negative(k)
    f = kp_one_soliton(k, ell, sigma_sign, delta, alpha)
    (_, phase) = f.terms[-1]
    if phase.omega.imag != 0.0:
        raise ParameterError(
            f"the profile check needs a real frequency, got omega={phase.omega}",
            "sigma_sign",
        )
    x = grid.x_nodes[None, :]
    t = grid.t_nodes[:, None]
    theta = k * x + float(ell) * y + phase.omega.real * t + float(np.real(delta))
    residual = u_from_tau(f, grid, y) - soliton_profile(k, theta)
    return ResidualReport.from_residual(
        residual,
        tolerance,
        grid=grid.metadata(),
        notes=f"KP one-soliton k={k:g}, ell={float(ell):g}, sign={sigma_sign:+d}",
        weight=2.0 * grid.half_length / grid.n_x,
    )


def log_identity_check(
    f: ExpSum, grid: SpaceTimeGrid, tolerance: float = LAW_TOL
) -> ResidualReport:
    """Check the bilinearizing identities on the grid.

    D_x^2 F.F / F^2 = 2 (ln F)_xx and
    D_x^4 F.F / F^2 = 2 (ln F)_xxxx + 12 ((ln F)_xx)^2, with the left sides
    from the symbolic operator. The report is relative to max |right side|.
    """
    x = grid.x_nodes[None, :]
    t = grid.t_nodes[:, None]
    logs = log_x_derivatives(f, x, t, 4)
    mantissa, shift = f.evaluate_scaled(x, 0.0, t)
    worst = 0.0
    for n, expected in ((2, 2.0 * logs[2]), (4, 2.0 * logs[4] + 12.0 * logs[2] ** 2)):
        g = apply_bilinear_symbolic(BilinearOperatorSpec.hirota_x(n), f, f)
        g_mantissa, g_shift = g.evaluate_scaled(x, 0.0, t)
        ratio = g_mantissa / mantissa**2 * np.exp(g_shift - 2.0 * shift)
        scale = max(1.0, float(np.max(np.abs(expected))))
        worst = max(worst, float(np.max(np.abs(ratio - expected))) / scale)
    return ResidualReport(
        max_abs=worst,
        l2=worst,
        tolerance=tolerance,
        passed=worst <= tolerance,
        notes="D_x^2 and D_x^4 log identities",
        grid=grid.metadata(),
        relative=worst,
    )


def _time_derivative(
    f: ExpSum,
    alpha: float,
    grid: SpaceTimeGrid,
    quad: QuadratureSpec,
    sup_norm: float,
) -> ComplexArray:
    x = grid.x_nodes
    t = grid.t_nodes
    if alpha == 1.0:
        return _u_t(f, x[None, :], t[:, None])
    # D_t^alpha u at fixed x: backward Marchaud in t on the exact field.
    result = np.empty((t.size, x.size), dtype=np.complex128)
    for column, xi in enumerate(x):
        handle = AnalyticFunction(
            lambda times, xi=xi: u_at(f, xi, times),
            sup_norm=sup_norm,
            label=f"u({xi:g}, t)",
        )
        derivative = marchaud_derivative(handle, t, alpha, quad)
        result[:, column] = derivative.values
    return result


def pde_residual(
    f: ExpSum,
    alpha: float,
    grid: SpaceTimeGrid,
    quad: QuadratureSpec | None = None,
    *,
    x_derivatives: XDerivatives = "exact",
    tolerance: float = PDE_TOL,
) -> ResidualReport:
    """Residual of D_t^alpha u + u_xxx + 6 u u_x on the space-time grid.

    At alpha = 1 the time derivative is exact and the report is gated at
    ``tolerance``. For alpha < 1 the time derivative is a Marchaud quadrature
    in t and the report is a diagnostic: ``passed`` is None.
    """
    alpha = check_order(alpha)
    quad = quad or QuadratureSpec()
    x = grid.x_nodes[None, :]
    t = grid.t_nodes[:, None]
    logs = log_x_derivatives(f, x, t, 5)
    u = 2.0 * logs[2]
    match x_derivatives:
        case "exact":
            u_x = 2.0 * logs[3]
            u_xxx = 2.0 * logs[5]
        case "spectral":
            rows = [GridFunction(row, grid.half_length) for row in u]
            u_x = np.array([spectral_derivative(r, 1).values for r in rows])
            u_xxx = np.array([spectral_derivative(r, 3).values for r in rows])
        case _:
            raise ParameterError(f"unknown mode {x_derivatives!r}", "x_derivatives")

    sup_norm = float(np.max(np.abs(u))) if u.size else 0.0
    d_t = _time_derivative(f, alpha, grid, quad, sup_norm)
    residual = d_t + u_xxx + 6.0 * u * u_x
    gated = alpha == 1.0
    notes = f"x-derivatives {x_derivatives}"
    if not gated:
        notes = f"{FORMAL_NOTE}; {notes}; Marchaud in t"
    report = ResidualReport.from_residual(
        residual,
        tolerance,
        grid=grid.metadata(),
        notes=notes,
        gate=gated,
        weight=2.0 * grid.half_length / grid.n_x,
    )
    logger.debug("PDE residual alpha=%g: max %.3e", alpha, report.max_abs)
    return report


# Soliton kinematics


def soliton_peak(
    f: ExpSum,
    t: float,
    x_guess: float,
    *,
    max_iterations: int = 50,
) -> float:
    """Location of a local maximum of Re u(., t) by Newton's method on u_x."""
    x = float(x_guess)
    for _ in range(max_iterations):
        logs = log_x_derivatives(f, np.array([x]), t, 4)
        u_x = 2.0 * logs[3][0].real
        u_xx = 2.0 * logs[4][0].real
        if u_xx == 0.0:
            break
        step = u_x / u_xx
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def soliton_speed(k: float, alpha: float) -> float:
    """Peak speed -omega/k of the real one-soliton (k^2 at alpha = 1)."""
    k = _real_negative(k)
    return -dispersion_omega(k, alpha).omega.real / k


def amplitude_check(
    k: float, alpha: float, t: float = 0.0, delta: float = 0.0, tolerance: float = LAW_TOL
) -> ResidualReport:
    """max_x u = k^2 / 2 at time t."""
    k = _real_negative(k)
    f = one_soliton_tau(k, delta, alpha)
    guess = (soliton_speed(k, alpha) * t) - delta / k
    peak = soliton_peak(f, t, guess)
    amplitude = float(u_at(f, peak, t).real)
    error = abs(amplitude - 0.5 * k * k)
    return ResidualReport(
        max_abs=error,
        l2=error,
        tolerance=tolerance,
        passed=error <= tolerance,
        notes=f"peak u={amplitude!r} at x={peak!r}",
    )


def speed_check(
    k: float,
    alpha: float,
    times: Sequence[float] = (-1.0, 0.0, 1.0),
    delta: float = 0.0,
    tolerance: float = LAW_TOL,
) -> ResidualReport:
    """Peak positions advance at -omega/k between consecutive times."""
    k = _real_negative(k)
    speed = soliton_speed(k, alpha)
    f = one_soliton_tau(k, delta, alpha)
    peaks = [soliton_peak(f, t, speed * t - delta / k) for t in times]
    errors = [
        abs((x1 - x0) / (t1 - t0) - speed)
        for (t0, x0), (t1, x1) in pairwise(zip(times, peaks, strict=True))
    ]
    worst = max(errors, default=0.0)
    return ResidualReport(
        max_abs=worst,
        l2=worst,
        tolerance=tolerance,
        passed=worst <= tolerance,
        notes=f"expected speed {speed!r}",
    )


def two_soliton_phase_shifts(
    k1: float,
    k2: float,
    alpha: float,
    *,
    t_far: float | None = None,
    delta1: float = 0.0,
    delta2: float = 0.0,
) -> list[PhaseShift]:
    """Measured and predicted displacement of each soliton through the collision.

    With solitons ordered by speed, the slower one is displaced by
    -ln(A12)/k_slow and the faster by +ln(A12)/k_fast. Peaks are located at
    t = -t_far and t = +t_far, far enough apart to be resolved individually.
    """
    k1 = _real_negative(k1, "k1")
    k2 = _real_negative(k2, "k2")
    params = soliton_params([k1, k2], [delta1, delta2], alpha)
    f = tau_from_params(params)
    speeds = [soliton_speed(k, alpha) for k in (k1, k2)]
    if speeds[0] == speeds[1] or not params.a12:
        raise ParameterError("solitons with equal speeds never separate", "k")
    log_a = math.log(params.a12.real)
    if t_far is None:
        t_far = 40.0 / (min(abs(k1), abs(k2)) * abs(speeds[1] - speeds[0]))
    slow = 0 if speeds[0] < speeds[1] else 1

    shifts = []
    for j, (k, delta) in enumerate(((k1, delta1), (k2, delta2))):
        predicted = -log_a / k if j == slow else log_a / k
        speed = speeds[j]
        # Centers: theta_j + offset = 0, offset 0 or ln A12 on either side.
        before_offset = 0.0 if j == slow else log_a
        after_offset = log_a if j == slow else 0.0
        before = soliton_peak(
            f, -t_far, -speed * t_far - (delta + before_offset) / k
        )
        after = soliton_peak(f, t_far, speed * t_far - (delta + after_offset) / k)
        measured = (after - speed * t_far) - (before + speed * t_far)
        shifts.append(PhaseShift(k=k, speed=speed, measured=measured, predicted=predicted))
    return shifts


def field_to_csv(u: ComplexArray, grid: SpaceTimeGrid, stream: IO[str]) -> None:
    """Write the field as CSV with header x,t,u_re,u_im, time-major."""
    x = grid.x_nodes
    rows = (
        (xi, ti, value.real, value.imag)
        for ti, row in zip(grid.times, u, strict=True)
        for xi, value in zip(x, row, strict=True)
    )
    write_csv(stream, ("x", "t", "u_re", "u_im"), rows)

