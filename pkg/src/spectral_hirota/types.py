"""Type definitions for spectral-hirota."""

import sys
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from ._errors import ParameterError

if sys.version_info >= (3, 11):
    from typing import NotRequired, TypedDict
else:
    from typing_extensions import NotRequired, TypedDict

RealArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

# One-sided shift of the Marchaud difference: backward realizes (ik)^alpha,
# forward realizes (-ik)^alpha.
Direction = Literal["backward", "forward"]

BilinearForm = Literal["commutator", "kernel", "symbol"]

# Rule used on the singular piece (0, y0] of the Marchaud integral.
InnerRule = Literal["gauss-jacobi", "log"]

OutputFormat = Literal["csv", "json"]

ProbeKind = Literal["band-limited", "single-mode"]

# Samples whose boundary magnitude exceeds this fraction of the peak are not
# treated as decaying functions on the real line.
BOUNDARY_TOL = 1e-12


def check_order(alpha: float, *, strict_below_one: bool = False) -> float:
    """Validate a fractional order and return it as a float.

    Args:
        alpha: Fractional order.
        strict_below_one: Require alpha < 1 (Marchaud forms are only valid there).

    Raises:
        ParameterError: If alpha is outside (0, 1] (or (0, 1) when strict).
    """
    value = float(alpha)
    if not np.isfinite(value) or value <= 0.0 or value > 1.0:
        raise ParameterError(f"must lie in (0, 1], got {alpha!r}", parameter="alpha")
    if strict_below_one and value == 1.0:
        raise ParameterError(
            "the Marchaud representation requires alpha < 1", parameter="alpha"
        )
    return value


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


# Grid types
@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on the uniform periodic grid x_j = -L + j*2L/N.

    ``periodic`` marks samples of a genuinely 2L-periodic function (Fourier
    modes, trigonometric polynomials). Otherwise the samples stand in for a
    function on the real line that must be negligible near the boundary.
    """

    values: ComplexArray
    half_length: float
    periodic: bool = False

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.complex128)
        if values.ndim != 1:
            raise ParameterError("grid values must be one-dimensional", "values")
        n = values.shape[0]
        if n < 8 or not _is_power_of_two(n):
            raise ParameterError(f"N must be a power of two >= 8, got {n}", "N")
        if not self.half_length > 0:
            raise ParameterError(f"must be positive, got {self.half_length}", "L")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n

    @property
    def nodes(self) -> RealArray:
        return grid_nodes(self.half_length, self.n)

    @property
    def grid(self) -> tuple[float, int]:
        return (self.half_length, self.n)

    @classmethod
    def sample(
        cls,
        func: Callable[[RealArray], npt.ArrayLike],
        half_length: float,
        n: int,
        *,
        periodic: bool = False,
    ) -> "GridFunction":
        """Sample ``func`` on the grid with half-length ``half_length`` and ``n`` points."""
        x = grid_nodes(half_length, n)
        return cls(np.asarray(func(x), dtype=np.complex128), half_length, periodic)

    def with_values(self, values: npt.ArrayLike) -> "GridFunction":
        """Return a grid function on the same grid with new samples."""
        return GridFunction(
            np.asarray(values, dtype=np.complex128), self.half_length, self.periodic
        )

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def grid_nodes(half_length: float, n: int) -> RealArray:
    """Nodes -L + j*h, j = 0..N-1, of the periodic box [-L, L)."""
    h = 2.0 * half_length / n
    return -half_length + h * np.arange(n, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class WavenumberGrid:
    """Wavenumbers k_n = pi*n/L in FFT ordering (n = 0, 1, ..., -N/2, ..., -1)."""

    modes: RealArray
    half_length: float
    nyquist_index: int

    @property
    def spacing(self) -> float:
        return float(np.pi / self.half_length)


# Quadrature types
@dataclass(frozen=True)
class QuadratureSpec:
    """Parameters of the one-sided singular quadrature.

    The integral over (0, inf) is split at ``y0``. The singular piece uses
    ``inner_nodes`` points of ``inner_rule``; the remainder uses composite
    Gauss-Legendre panels of ``panel_order`` points, ``tail_nodes`` in total,
    over (y0, y_max] for functions on the real line or over one period for
    periodic functions.
    """

    y0: float = 1.0
    inner_nodes: int = 48
    tail_nodes: int = 2048
    y_max: float = 1e4
    inner_rule: InnerRule = "gauss-jacobi"
    panel_order: int = 16
    tolerance: float = 1e-8
    chunk_size: int = 256

    def __post_init__(self) -> None:
        if not 0 < self.y0 < self.y_max:
            raise ParameterError(
                f"require 0 < y0 < y_max, got y0={self.y0}, y_max={self.y_max}",
                "quad.y0",
            )
        if self.inner_nodes < 16:
            raise ParameterError("at least 16 nodes required", "quad.inner_nodes")
        if self.tail_nodes < 16:
            raise ParameterError("at least 16 nodes required", "quad.tail_nodes")
        if self.panel_order < 2 or self.panel_order > self.tail_nodes:
            raise ParameterError("invalid panel order", "quad.panel_order")
        if self.inner_rule not in ("gauss-jacobi", "log"):
            raise ParameterError(f"unknown rule {self.inner_rule!r}", "quad.inner_rule")
        if self.chunk_size < 1:
            raise ParameterError("must be positive", "quad.chunk_size")

    @property
    def panels(self) -> int:
        return max(1, self.tail_nodes // self.panel_order)

    def coarse(self) -> "QuadratureSpec":
        """Half-resolution companion rule used for the embedded error estimate."""
        return QuadratureSpec(
            y0=self.y0,
            inner_nodes=max(16, self.inner_nodes // 2),
            tail_nodes=max(self.panel_order, self.tail_nodes // 2),
            y_max=self.y_max,
            inner_rule=self.inner_rule,
            panel_order=self.panel_order,
            tolerance=self.tolerance,
            chunk_size=self.chunk_size,
        )


@dataclass(frozen=True)
class AnalyticFunction:
    """A scalar function evaluable at arbitrary real points.

    ``sup_norm`` bounds |f| on the real line and feeds the tail bound.
    ``period`` is set for periodic functions; the quadrature then folds the
    whole tail into one period instead of truncating it. For non-periodic
    functions ``far_value`` is the limit of f at +-infinity (0 for decaying
    functions) and closes the truncated tail analytically.
    """

    func: Callable[[RealArray], npt.ArrayLike]
    sup_norm: float
    period: float | None = None
    label: str = ""
    far_value: complex = 0j

    def __call__(self, x: npt.ArrayLike) -> ComplexArray:
        return np.asarray(self.func(np.asarray(x, dtype=np.float64)), dtype=np.complex128)

    def periodized(self, half_length: float) -> "AnalyticFunction":
        """2L-periodic extension of a function negligible outside [-L, L)."""
        period = 2.0 * half_length
        inner = self.func

        def wrapped(x: RealArray) -> npt.ArrayLike:
            return inner(np.mod(x + half_length, period) - half_length)

        return AnalyticFunction(
            wrapped, self.sup_norm, period=period, label=f"{self.label}~periodic"
        )

    def reflected(self) -> "AnalyticFunction":
        """The function x -> f(-x)."""
        inner = self.func
        return AnalyticFunction(
            lambda x: inner(-x),
            self.sup_norm,
            self.period,
            f"{self.label}(-x)",
            self.far_value,
        )


@dataclass(frozen=True, eq=False)
class MarchaudResult:
    """Values of a one-sided Marchaud-type integral plus quality diagnostics."""

    values: ComplexArray
    direction: Direction
    tail_bound: float
    error_estimate: float
    converged: bool


@dataclass(frozen=True, eq=False)
class BilinearResult:
    """Fractional Hirota bilinear operator output and the form that produced it."""

    values: GridFunction | ComplexArray
    form_used: BilinearForm
    diagnostics: MarchaudResult | None = None


# Symbolic types
@dataclass(frozen=True)
class PhaseVector:
    """Affine phase k*x + ell*y + omega*t + delta.

    ``sigma`` is the stored value of omega^alpha consumed by the fractional
    multiplier; it is never recomputed from omega. ``None`` means unset.
    """

    k: complex = 0j
    ell: complex = 0j
    omega: complex = 0j
    sigma: complex | None = 0j
    delta: complex = 0j

    def __post_init__(self) -> None:
        for name in ("k", "ell", "omega", "delta"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.sigma is not None:
            object.__setattr__(self, "sigma", complex(self.sigma))

    @property
    def key(self) -> tuple[complex, complex, complex, complex]:
        return (self.k, self.ell, self.omega, self.delta)

    @property
    def is_zero(self) -> bool:
        return self.key == (0j, 0j, 0j, 0j)

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        # omega^alpha is not additive: the sum only inherits a sigma when one
        # side is the zero phase.
        if self.is_zero:
            sigma = other.sigma
        elif other.is_zero:
            sigma = self.sigma
        else:
            sigma = None
        return PhaseVector(
            k=self.k + other.k,
            ell=self.ell + other.ell,
            omega=self.omega + other.omega,
            sigma=sigma,
            delta=self.delta + other.delta,
        )


ZERO_PHASE = PhaseVector()


@dataclass(frozen=True)
class Monomial:
    """coefficient * D_x^nx * D_y^ny * (D_t^alpha if frac_t)."""

    nx: int = 0
    ny: int = 0
    frac_t: bool = False
    coefficient: complex = 1 + 0j

    def __post_init__(self) -> None:
        if self.nx < 0 or self.ny < 0:
            raise ParameterError("Hirota powers must be non-negative", "monomial")

    @property
    def order(self) -> int:
        return self.nx + self.ny + int(self.frac_t)


@dataclass(frozen=True)
class BilinearOperatorSpec:
    """A polynomial in Hirota operators, applied as a bilinear form."""

    monomials: tuple[Monomial, ...]

    @classmethod
    def kdv(cls) -> "BilinearOperatorSpec":
        """D_x D_t^alpha + D_x^4."""
        return cls((Monomial(nx=1, frac_t=True), Monomial(nx=4)))

    @classmethod
    def kp(cls, sigma_sign: int) -> "BilinearOperatorSpec":
        """D_x D_t^alpha + D_x^4 + sigma_sign * D_y^2."""
        if sigma_sign not in (1, -1):
            raise ParameterError(f"must be +1 or -1, got {sigma_sign}", "sigma_sign")
        return cls(
            (
                Monomial(nx=1, frac_t=True),
                Monomial(nx=4),
                Monomial(ny=2, coefficient=complex(sigma_sign)),
            )
        )

    @classmethod
    def hirota_x(cls, n: int) -> "BilinearOperatorSpec":
        """Classical D_x^n."""
        return cls((Monomial(nx=n),))

    @classmethod
    def frac_t(cls) -> "BilinearOperatorSpec":
        """The fractional time operator D_t^alpha alone."""
        return cls((Monomial(frac_t=True),))


@dataclass(frozen=True)
class DispersionRelation:
    """sigma = omega^alpha on the dispersion manifold and the evaluated omega."""

    sigma: complex
    omega: complex
    is_real: bool
    branch_consistent: bool


@dataclass(frozen=True)
class SolitonParams:
    """Parameters of a one- or two-soliton tau-function."""

    alpha: float
    k: tuple[complex, ...]
    delta: tuple[complex, ...]
    sigma: tuple[complex, ...]
    omega: tuple[complex, ...]
    a12: complex | None = None


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Periodic x-grid (as GridFunction) times a sorted list of sample times."""

    half_length: float
    n_x: int
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n_x < 8 or not _is_power_of_two(self.n_x):
            raise ParameterError(f"N_x must be a power of two >= 8, got {self.n_x}", "Nx")
        if not self.half_length > 0:
            raise ParameterError("must be positive", "Lx")
        times = tuple(float(t) for t in self.times)
        if not times or not all(np.isfinite(times)):
            raise ParameterError("need at least one finite time", "times")
        if list(times) != sorted(times):
            raise ParameterError("times must be sorted", "times")
        object.__setattr__(self, "times", times)

    @property
    def x_nodes(self) -> RealArray:
        return grid_nodes(self.half_length, self.n_x)

    @property
    def t_nodes(self) -> RealArray:
        return np.asarray(self.times, dtype=np.float64)

    def metadata(self) -> "GridMetaJSON":
        return {
            "Lx": self.half_length,
            "Nx": self.n_x,
            "tmin": self.times[0],
            "tmax": self.times[-1],
            "Nt": len(self.times),
        }


@dataclass(frozen=True)
class ResidualReport:
    """Residual magnitudes with pass/fail against a tolerance.

    ``passed`` is None for diagnostic reports whose gate is suppressed.
    """

    max_abs: float
    l2: float
    tolerance: float
    passed: bool | None
    notes: str = ""
    grid: "GridMetaJSON | None" = None
    relative: float | None = None

    @classmethod
    def from_residual(
        cls,
        residual: npt.ArrayLike,
        tolerance: float,
        *,
        grid: "GridMetaJSON | None" = None,
        notes: str = "",
        gate: bool = True,
        weight: float = 1.0,
    ) -> "ResidualReport":
        """Build a report from pointwise residual values.

        ``weight`` is the quadrature weight of one sample in the L2 sum.
        """
        values = np.abs(np.asarray(residual, dtype=np.complex128)).ravel()
        max_abs = float(values.max()) if values.size else 0.0
        l2 = float(np.sqrt(weight * np.sum(values**2)))
        return cls(
            max_abs=max_abs,
            l2=l2,
            tolerance=tolerance,
            passed=(max_abs <= tolerance) if gate else None,
            notes=notes,
            grid=grid,
        )


@dataclass(frozen=True)
class PhaseShift:
    """Asymptotic displacement of one soliton through a two-soliton collision."""

    k: float
    speed: float
    measured: float
    predicted: float

    @property
    def error(self) -> float:
        return abs(self.measured - self.predicted)


@dataclass(frozen=True)
class LimitRow:
    """Distance of D^alpha f.g from the classical D f.g in H^(s-1)."""

    alpha: float
    distance: float


@dataclass(frozen=True)
class ProbeFamily:
    """Random test-function family for the Sobolev bound probe.

    Band-limited members are trigonometric polynomials on [-L, L) with modes
    |n| <= reference_n / 4 weighted by exp(-(k/envelope_width)^2).
    """

    kind: ProbeKind = "band-limited"
    half_length: float = 20.0
    envelope_width: float = 4.0
    reference_n: int = 1024
    diagonal: bool = False


@dataclass(frozen=True)
class SobolevProbeReport:
    """Maximum Sobolev ratio per grid size and its refinement growth."""

    s: float
    alpha: float
    trials: int
    seed: int
    family: ProbeFamily
    max_ratio: dict[int, float]
    growth: float
    stable: bool
    closed_form_error: float | None = None


@dataclass(frozen=True)
class CheckResult:
    """One row of the acceptance battery."""

    name: str
    value: float
    tolerance: float
    passed: bool
    gate: bool = True
    detail: str = ""
    order: int = 0


@dataclass
class SuiteOptions:
    """Options for the acceptance battery."""

    seed: int = 42
    alpha_sweep: list[float] = field(default_factory=list)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    max_workers: int = 4
    include_diagnostics: bool = True


@dataclass(frozen=True)
class SuiteReport:
    """Collected acceptance battery in declaration order."""

    seed: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks if check.gate)

    @property
    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if check.gate and not check.passed]


# JSON wire shapes
class PhaseTermJSON(TypedDict):
    """One exponential-sum term as written to tau JSON."""

    coeff: list[float]
    k: list[float]
    ell: list[float]
    omega: list[float]
    sigma: list[float] | None
    delta: list[float]


class GridMetaJSON(TypedDict):
    """Space-time grid metadata attached to residual reports."""

    Lx: float
    Nx: int
    tmin: float
    tmax: float
    Nt: int


ResidualReportJSON = TypedDict(
    "ResidualReportJSON",
    {
        "max_abs": float,
        "l2": float,
        "pass": bool | None,
        "tolerance": float,
        "notes": str,
        "grid": NotRequired[GridMetaJSON],
        "relative": NotRequired[float],
    },
)


class CheckResultJSON(TypedDict):
    """One suite row as written to the suite report."""

    name: str
    value: float
    tolerance: float
    passed: bool
    gate: bool
    detail: NotRequired[str]


class SuiteReportJSON(TypedDict):
    """Machine-readable suite report."""

    version: str
    seed: int
    passed: bool
    checks: list[CheckResultJSON]
