"""Quadrature rules for one-sided integrals against the kernel y^(-1-alpha).

Every rule here integrates ``d(y) * y**(-1 - alpha)`` over a piece of
(0, inf): ``sum(weights * d(nodes))`` approximates the integral, where ``d`` is
the assembled difference (it vanishes at y = 0).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi, zeta

from ..types import QuadratureSpec, RealArray

logger = logging.getLogger(__name__)

# Lower cut of the logarithmic inner rule, relative to the split point.
LOG_RULE_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class SingularRule:
    """Nodes and weights for d(y) y^(-1-alpha) over (0, y0] and the tail."""

    nodes: RealArray
    weights: RealArray
    inner_count: int
    periodic: bool


def _freeze(array: RealArray) -> RealArray:
    array.setflags(write=False)
    return array


@lru_cache(maxsize=64)
def composite_legendre(
    a: float, b: float, panels: int, order: int
) -> tuple[RealArray, RealArray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    z, w = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * z[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return _freeze(nodes), _freeze(weights)


def _gauss_jacobi_inner(alpha: float, y0: float, n: int) -> tuple[RealArray, RealArray]:
    # Weight (1+x)^(-alpha) on (-1, 1); y = y0 (1+x)/2 turns it into y^(-alpha)
    # and the remaining d(y)/y is smooth.
    x, w = roots_jacobi(n, 0.0, -alpha)
    y = 0.5 * y0 * (1.0 + x)
    weights = (0.5 * y0) ** (1.0 - alpha) * w / y
    return y, weights


def _log_inner(
    alpha: float, y0: float, n: int, order: int
) -> tuple[RealArray, RealArray]:
    # y = e^u: d(y) y^(-1-alpha) dy = d(e^u) e^(-alpha u) du.
    order = min(order, n)
    panels = max(1, n // order)
    u, w = composite_legendre(
        float(np.log(y0 * LOG_RULE_CUTOFF)), float(np.log(y0)), panels, order
    )
    y = np.exp(u)
    return y, w * y ** (-alpha)


def _log_tail(alpha: float, quad: QuadratureSpec) -> tuple[RealArray, RealArray]:
    u, w = composite_legendre(
        float(np.log(quad.y0)), float(np.log(quad.y_max)), quad.panels, quad.panel_order
    )
    y = np.exp(u)
    return y, w * y ** (-alpha)


def _periodic_tail(
    alpha: float, quad: QuadratureSpec, period: float
) -> tuple[RealArray, RealArray]:
    # (y0, inf) folded onto y0 + [0, P): sum_m (y0 + s + mP)^(-1-alpha) is a
    # Hurwitz zeta value.
    s, w = composite_legendre(0.0, period, quad.panels, quad.panel_order)
    folded = period ** (-1.0 - alpha) * zeta(1.0 + alpha, (quad.y0 + s) / period)
    return quad.y0 + s, w * folded


@lru_cache(maxsize=128)
def singular_rule(
    alpha: float, quad: QuadratureSpec, period: float | None = None
) -> SingularRule:
    """Build (and cache) the full rule for a given order, QuadratureSpec and period."""
    match quad.inner_rule:
        case "gauss-jacobi":
            inner_y, inner_w = _gauss_jacobi_inner(alpha, quad.y0, quad.inner_nodes)
        case "log":
            inner_y, inner_w = _log_inner(
                alpha, quad.y0, quad.inner_nodes, quad.panel_order
            )

    if period is None:
        tail_y, tail_w = _log_tail(alpha, quad)
    else:
        tail_y, tail_w = _periodic_tail(alpha, quad, period)

    logger.debug(
        "Built %s rule: alpha=%g, %d inner + %d tail nodes, period=%s",
        quad.inner_rule,
        alpha,
        inner_y.size,
        tail_y.size,
        period,
    )
    return SingularRule(
        nodes=_freeze(np.concatenate([inner_y, tail_y])),
        weights=_freeze(np.concatenate([inner_w, tail_w])),
        inner_count=int(inner_y.size),
        periodic=period is not None,
    )


def tail_completion(alpha: float, y_max: float) -> float:
    """Exact integral of y^(-1-alpha) over (y_max, inf)."""
    return float(y_max ** (-alpha) / alpha)
