"""Exact exponential sums and symbolic Hirota operators.

An ExpSum is a finite sum of terms c * exp(k x + ell y + omega t + delta).
Hirota operators act on products of exponentials through multipliers:

    D_x^nx D_y^ny (D_t^alpha)^f  e^{th1} . e^{th2}
        = (k1 - k2)^nx (ell1 - ell2)^ny (sigma1 - sigma2)^f  e^{th1 + th2},

where sigma is the stored value of omega^alpha. All arithmetic is on Python
complex numbers; integer powers are repeated products, so identities that
cancel algebraically cancel bit for bit.
"""

import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from ._errors import DegenerateParameterError, MissingSigmaError, ParameterError
from .grid import principal_power_ik
from .types import (
    ZERO_PHASE,
    BilinearOperatorSpec,
    ComplexArray,
    DispersionRelation,
    Monomial,
    PhaseTermJSON,
    PhaseVector,
    ResidualReport,
    SolitonParams,
    check_order,
)

logger = logging.getLogger(__name__)

# Merged coefficients below this fraction of the largest pre-merge magnitude
# are dropped.
DROP_RELATIVE = 1e-14
DROP_FLOOR = 1e-300

# Relative residual accepted for symbolic identities.
SYMBOLIC_TOL = 1e-12

Term = tuple[complex, PhaseVector]


def ipow(z: complex, n: int) -> complex:
    """z**n by repeated multiplication."""
    result = 1 + 0j
    for _ in range(n):
        result = result * z
    return result


@dataclass(frozen=True)
class ExpSum:
    """Finite sum of coefficient * exp(phase) terms.

    Instances built with :meth:`of` or returned by the operations in this
    module are canonical: no two terms share (k, ell, omega, delta).
    """

    terms: tuple[Term, ...] = ()

    @classmethod
    def of(cls, *terms: Term) -> "ExpSum":
        """Canonical sum of the given terms."""
        return canonicalize(cls(tuple(terms)))

    @classmethod
    def one(cls) -> "ExpSum":
        return cls(((1 + 0j, ZERO_PHASE),))

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return canonicalize(ExpSum(self.terms + other.terms))

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + other.scale(-1)

    def __mul__(self, other: "ExpSum") -> "ExpSum":
        raw = [(c1 * c2, p1 + p2) for c1, p1 in self.terms for c2, p2 in other.terms]
        return canonicalize(ExpSum(tuple(raw)))

    def scale(self, factor: complex) -> "ExpSum":
        return ExpSum(tuple((factor * c, p) for c, p in self.terms))

    def max_coefficient(self) -> float:
        return max((abs(c) for c, _ in self.terms), default=0.0)

    def arrays(
        self,
    ) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
        """Coefficients, k, ell, omega and delta as parallel arrays."""
        columns = [
            [c for c, _ in self.terms],
            [p.k for _, p in self.terms],
            [p.ell for _, p in self.terms],
            [p.omega for _, p in self.terms],
            [p.delta for _, p in self.terms],
        ]
        c, k, ell, omega, delta = (np.asarray(col, dtype=np.complex128) for col in columns)
        return c, k, ell, omega, delta

    def exponents(
        self, x: npt.ArrayLike, y: npt.ArrayLike = 0.0, t: npt.ArrayLike = 0.0
    ) -> ComplexArray:
        """Phases k x + ell y + omega t + delta, one per term along the last axis."""
        _, k, ell, omega, delta = self.arrays()
        xb, yb, tb = np.broadcast_arrays(
            np.asarray(x, dtype=np.float64),
            np.asarray(y, dtype=np.float64),
            np.asarray(t, dtype=np.float64),
        )
        return (
            xb[..., None] * k + yb[..., None] * ell + tb[..., None] * omega + delta
        )

    def evaluate_scaled(
        self, x: npt.ArrayLike, y: npt.ArrayLike = 0.0, t: npt.ArrayLike = 0.0
    ) -> tuple[ComplexArray, npt.NDArray[np.float64]]:
        """Return (m, s) with value = m * exp(s), safe against overflow."""
        c = self.arrays()[0]
        exponents = self.exponents(x, y, t)
        if not self.terms:
            return np.zeros(exponents.shape[:-1], dtype=np.complex128), np.zeros(
                exponents.shape[:-1]
            )
        shift = np.max(exponents.real, axis=-1)
        mantissa = np.sum(c * np.exp(exponents - shift[..., None]), axis=-1)
        return mantissa, shift

    def evaluate(
        self, x: npt.ArrayLike, y: npt.ArrayLike = 0.0, t: npt.ArrayLike = 0.0
    ) -> ComplexArray:
        """Sum of c exp(k x + ell y + omega t + delta) at broadcast points."""
        mantissa, shift = self.evaluate_scaled(x, y, t)
        return mantissa * np.exp(shift)

    def to_json(self) -> list[PhaseTermJSON]:
        """Serialize as a list of terms with [re, im] pairs."""
        from ._internal.serialization import exp_sum_to_json

        return exp_sum_to_json(self)

    @classmethod
    def from_json(cls, data: Any) -> "ExpSum":
        """Parse the output of :meth:`to_json`.

        Raises:
            ExpSumParseError: If the document is malformed.
        """
        from ._internal.serialization import parse_exp_sum

        return parse_exp_sum(data)


def canonicalize(terms: ExpSum) -> ExpSum:
    """Merge equal phases and drop negligible coefficients.

    Coefficients are summed in first-occurrence order. A merged coefficient is
    dropped when its magnitude is below 1e-14 times the largest pre-merge
    magnitude (floor 1e-300). Merged terms keep a stored sigma only when every
    contribution agrees on it.
    """
    largest = terms.max_coefficient()
    threshold = max(DROP_RELATIVE * largest, DROP_FLOOR)
    merged: dict[tuple[complex, ...], tuple[complex, PhaseVector]] = {}
    for coefficient, phase in terms:
        key = phase.key
        if key not in merged:
            merged[key] = (coefficient, phase)
            continue
        total, kept = merged[key]
        if kept.sigma != phase.sigma:
            kept = PhaseVector(kept.k, kept.ell, kept.omega, None, kept.delta)
        merged[key] = (total + coefficient, kept)
    return ExpSum(tuple((c, p) for c, p in merged.values() if abs(c) >= threshold))


def _sigma(phase: PhaseVector) -> complex:
    if phase.sigma is not None:
        return phase.sigma
    if phase.is_zero:
        return 0j
    raise MissingSigmaError(phase)


def _monomial_factor(mono: Monomial, p1: PhaseVector, p2: PhaseVector) -> complex:
    factor = mono.coefficient * ipow(p1.k - p2.k, mono.nx) * ipow(p1.ell - p2.ell, mono.ny)
    if mono.frac_t:
        factor = factor * (_sigma(p1) - _sigma(p2))
    return factor


def _raw_bilinear(op: BilinearOperatorSpec, f: ExpSum, g: ExpSum) -> list[Term]:
    raw: list[Term] = []
    for c1, p1 in f:
        for c2, p2 in g:
            phase = p1 + p2
            for mono in op.monomials:
                raw.append((c1 * c2 * _monomial_factor(mono, p1, p2), phase))
    return raw


def apply_bilinear_symbolic(op: BilinearOperatorSpec, f: ExpSum, g: ExpSum) -> ExpSum:
    """Apply a Hirota polynomial to F.G term by term.

    Raises:
        MissingSigmaError: If a fractional monomial meets a phase without sigma.
    """
    return canonicalize(ExpSum(tuple(_raw_bilinear(op, f, g))))


def apply_linear_symbolic(
    f: ExpSum, nx: int = 0, frac_t: bool = False, ny: int = 0
) -> ExpSum:
    """Term-wise d_x^nx d_y^ny and, formally, D_t^alpha e^theta = sigma e^theta."""
    terms = []
    for c, p in f:
        factor = c * ipow(p.k, nx) * ipow(p.ell, ny)
        if frac_t:
            factor = factor * _sigma(p)
        terms.append((factor, p))
    return canonicalize(ExpSum(tuple(terms)))


def _report(
    residual: ExpSum, scale: float, notes: str, tolerance: float = SYMBOLIC_TOL
) -> ResidualReport:
    magnitudes = np.array([abs(c) for c, _ in residual], dtype=np.float64)
    if scale == 0.0 or magnitudes.size == 0:
        relative_max, relative_l2 = 0.0, 0.0
    else:
        relative_max = float(magnitudes.max()) / scale
        relative_l2 = float(np.sqrt(np.sum(magnitudes**2))) / scale
    return ResidualReport(
        max_abs=relative_max,
        l2=relative_l2,
        tolerance=tolerance,
        passed=relative_max <= tolerance,
        notes=notes,
        relative=relative_max,
    )


def bilinear_residual_symbolic(
    op: BilinearOperatorSpec, f: ExpSum, tolerance: float = SYMBOLIC_TOL
) -> ResidualReport:
    """Residual of op(F.F) = 0.

    ``max_abs`` is the largest surviving coefficient relative to the largest
    individual contribution before cancellation; an empty result reports 0.
    """
    raw = _raw_bilinear(op, f, f)
    scale = max((abs(c) for c, _ in raw), default=0.0)
    residual = canonicalize(ExpSum(tuple(raw)))
    logger.debug(
        "Symbolic residual: %d raw terms, %d surviving, scale %.3e",
        len(raw),
        len(residual),
        scale,
    )
    return _report(
        residual,
        scale,
        f"{len(residual)} surviving terms; coefficients relative to {scale:.6g}",
        tolerance,
    )


def mixed_term_identity(f: ExpSum, tolerance: float = SYMBOLIC_TOL) -> ResidualReport:
    """Check D_x D_t^alpha F.F = 2 (F D_t^alpha F_x - F_x D_t^alpha F) exactly."""
    op = BilinearOperatorSpec((Monomial(nx=1, frac_t=True),))
    raw = _raw_bilinear(op, f, f)
    lhs = canonicalize(ExpSum(tuple(raw)))
    fx = apply_linear_symbolic(f, nx=1)
    rhs = f * apply_linear_symbolic(fx, frac_t=True) - fx * apply_linear_symbolic(
        f, frac_t=True
    )
    rhs = rhs.scale(2)
    scale = max(max((abs(c) for c, _ in raw), default=0.0), rhs.max_coefficient())
    residual = canonicalize(ExpSum(lhs.terms + rhs.scale(-1).terms))
    return _report(residual, scale, "mixed-term identity", tolerance)


# Dispersion and tau-functions


def _frequency(sigma: complex, alpha: float) -> complex:
    """omega with omega^alpha = sigma: real power on the positive axis, else principal."""
    if sigma.imag == 0.0 and sigma.real > 0.0:
        return complex(sigma.real ** (1.0 / alpha))
    if sigma == 0:
        return 0j
    return complex(sigma ** (1.0 / alpha))


def _round_trip(omega: complex, sigma: complex, alpha: float) -> bool:
    if omega.imag == 0.0 and omega.real >= 0.0:
        back = complex(omega.real**alpha)
    else:
        back = omega**alpha
    return abs(back - sigma) <= 1e-12 * max(1.0, abs(sigma))


def dispersion_omega(k: complex, alpha: float) -> DispersionRelation:
    """Fractional KdV dispersion: sigma = omega^alpha = -k^3.

    omega is the principal (-k^3)^(1/alpha). The solution is real exactly when
    k is real and negative.

    Raises:
        DegenerateParameterError: If k = 0.
    """
    alpha = check_order(alpha)
    k = complex(k)
    if k == 0:
        raise DegenerateParameterError("k must be nonzero", "k")
    sigma = -ipow(k, 3)
    omega = _frequency(sigma, alpha)
    consistent = _round_trip(omega, sigma, alpha)
    if not consistent:
        logger.warning(
            "Principal branch omega=%s does not return sigma=%s at alpha=%g; "
            "the stored sigma is used",
            omega,
            sigma,
            alpha,
        )
    return DispersionRelation(
        sigma=sigma,
        omega=omega,
        is_real=k.imag == 0.0 and k.real < 0.0,
        branch_consistent=consistent,
    )


def soliton_params(
    ks: Iterable[complex],
    deltas: Iterable[complex],
    alpha: float,
    *,
    a12: complex | None = None,
) -> SolitonParams:
    """Dispersion data for one or two solitons.

    For two solitons A12 = ((k1 - k2)/(k1 + k2))^2 unless ``a12`` overrides it.

    Raises:
        DegenerateParameterError: If some k = 0 or k1 + k2 = 0.
        ParameterError: For other than one or two wavenumbers.
    """
    alpha = check_order(alpha)
    k = tuple(complex(v) for v in ks)
    delta = tuple(complex(v) for v in deltas)
    if len(k) not in (1, 2):
        raise ParameterError(f"one or two wavenumbers expected, got {len(k)}", "k")
    if len(delta) != len(k):
        raise ParameterError("one phase constant per wavenumber", "delta")
    relations = [dispersion_omega(kj, alpha) for kj in k]
    if len(k) == 2:
        k1, k2 = k
        if k1 + k2 == 0:
            raise DegenerateParameterError("k1 + k2 = 0 is a pole of A12", "k")
        if k1 == k2:
            logger.warning("k1 == k2: A12 = 0 and the two-soliton collapses")
        if a12 is None:
            ratio = (k1 - k2) / (k1 + k2)
            a12 = ratio * ratio
    else:
        a12 = None
    return SolitonParams(
        alpha=alpha,
        k=k,
        delta=delta,
        sigma=tuple(r.sigma for r in relations),
        omega=tuple(r.omega for r in relations),
        a12=None if a12 is None else complex(a12),
    )


def tau_from_params(params: SolitonParams) -> ExpSum:
    """F = 1 + sum_j e^{theta_j} (+ A12 e^{theta_1 + theta_2})."""
    phases = [
        PhaseVector(k=k, omega=w, sigma=s, delta=d)
        for k, w, s, d in zip(
            params.k, params.omega, params.sigma, params.delta, strict=True
        )
    ]
    terms: list[Term] = [(1 + 0j, ZERO_PHASE)]
    terms.extend((1 + 0j, p) for p in phases)
    if len(phases) == 2 and params.a12 is not None:
        p1, p2 = phases
        # sigma_12 := sigma_1 + sigma_2, the additive convention the
        # interaction coefficient is derived under.
        combined = PhaseVector(
            k=p1.k + p2.k,
            ell=p1.ell + p2.ell,
            omega=p1.omega + p2.omega,
            sigma=params.sigma[0] + params.sigma[1],
            delta=p1.delta + p2.delta,
        )
        terms.append((params.a12, combined))
    return ExpSum.of(*terms)


def one_soliton_tau(k: complex, delta: complex, alpha: float) -> ExpSum:
    """F = 1 + e^{k x + omega t + delta} on the dispersion manifold."""
    return tau_from_params(soliton_params([k], [delta], alpha))


def two_soliton_tau(
    k1: complex,
    k2: complex,
    delta1: complex,
    delta2: complex,
    alpha: float,
    *,
    a12: complex | None = None,
) -> ExpSum:
    """F = 1 + e^{th1} + e^{th2} + A12 e^{th1 + th2}.

    ``a12`` replaces the interaction coefficient (negative controls).
    """
    return tau_from_params(soliton_params([k1, k2], [delta1, delta2], alpha, a12=a12))


def kp_one_soliton(
    k: complex, ell: complex, sigma_sign: int, delta: complex, alpha: float
) -> ExpSum:
    """KP one-soliton F = 1 + e^{k x + ell y + omega t + delta}.

    sigma = omega^alpha solves k sigma + k^4 + sigma_sign ell^2 = 0. With
    ell = 0 this is the KdV value -k^3.

    Raises:
        DegenerateParameterError: If k = 0.
    """
    alpha = check_order(alpha)
    if sigma_sign not in (1, -1):
        raise ParameterError(f"must be +1 or -1, got {sigma_sign}", "sigma_sign")
    k, ell = complex(k), complex(ell)
    if k == 0:
        raise DegenerateParameterError("k must be nonzero", "k")
    if ell == 0:
        sigma = -ipow(k, 3)
    else:
        sigma = -(ipow(k, 4) + sigma_sign * ipow(ell, 2)) / k
    omega = _frequency(sigma, alpha)
    phase = PhaseVector(k=k, ell=ell, omega=omega, sigma=sigma, delta=delta)
    return ExpSum.of((1 + 0j, ZERO_PHASE), (1 + 0j, phase))


def kdv_bilinear_symbol(
    k1: float, k2: float, w1: float, w2: float, alpha: float
) -> complex:
    """Multiplier of D_x D_t^alpha + D_x^4 on e^{i(k1 x + w1 t)}.e^{i(k2 x + w2 t)}."""
    dk = k1 - k2
    return 1j * dk * (
        principal_power_ik(w1, alpha) - principal_power_ik(w2, alpha)
    ) + ipow(dk, 4)


def oscillatory_phase(k: float, w: float, alpha: float) -> PhaseVector:
    """Phase i(k x + w t) with sigma = (iw)^alpha in the principal branch."""
    return PhaseVector(k=1j * k, omega=1j * w, sigma=principal_power_ik(w, alpha))


def interaction_coefficient_residual(k1: complex, k2: complex, a12: complex) -> complex:
    """(k1 - k2)^2 ((k1 + k2)^2 A12 - (k1 - k2)^2); zero at the true A12."""
    minus = ipow(k1 - k2, 2)
    return minus * (ipow(k1 + k2, 2) * a12 - minus)
