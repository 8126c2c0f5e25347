"""Spectral fractional derivatives, fractional Hirota operators and soliton checks."""

from ._errors import (
    BoundaryDecayError,
    ConfigError,
    DegenerateParameterError,
    ExpSumParseError,
    GridMismatchError,
    MissingSigmaError,
    ParameterError,
    SingularTauError,
    SpectralHirotaError,
)
from ._version import __version__
from .bilinear import (
    hirota_classical,
    hirota_frac,
    hirota_frac_commutator,
    hirota_frac_kernel,
    hirota_frac_symbol,
    kernel_on_grid,
    single_mode_ratio,
    sobolev_bound_probe,
)
from .exp_sum import (
    ExpSum,
    apply_bilinear_symbolic,
    apply_linear_symbolic,
    bilinear_residual_symbolic,
    canonicalize,
    dispersion_omega,
    interaction_coefficient_residual,
    kdv_bilinear_symbol,
    kp_one_soliton,
    mixed_term_identity,
    one_soliton_tau,
    soliton_params,
    tau_from_params,
    two_soliton_tau,
)
from .grid import (
    frac_derivative_bound,
    frac_symbol,
    limit_convergence_check,
    principal_power_ik,
    sobolev_norm,
    spectral_derivative,
    spectral_frac_derivative,
    wavenumbers,
)
from .kdv import (
    amplitude_check,
    kp_profile_check,
    log_identity_check,
    pde_residual,
    soliton_peak,
    soliton_profile_check,
    speed_check,
    two_soliton_phase_shifts,
    u_from_tau,
)
from .marchaud import (
    marchaud_constant,
    marchaud_derivative,
    marchaud_kernel,
    marchaud_on_grid,
    scalar_symbol_integral,
)
from .suite import run_checks, run_suite
from .types import (
    AnalyticFunction,
    BilinearOperatorSpec,
    BilinearResult,
    CheckResult,
    DispersionRelation,
    GridFunction,
    LimitRow,
    MarchaudResult,
    Monomial,
    PhaseShift,
    PhaseVector,
    ProbeFamily,
    QuadratureSpec,
    ResidualReport,
    SobolevProbeReport,
    SolitonParams,
    SpaceTimeGrid,
    SuiteOptions,
    SuiteReport,
    WavenumberGrid,
)

__all__ = [
    "__version__",
    # Grid and spectral operators
    "GridFunction",
    "WavenumberGrid",
    "wavenumbers",
    "principal_power_ik",
    "frac_symbol",
    "spectral_frac_derivative",
    "spectral_derivative",
    "sobolev_norm",
    "frac_derivative_bound",
    "limit_convergence_check",
    "LimitRow",
    # Marchaud quadrature
    "AnalyticFunction",
    "QuadratureSpec",
    "MarchaudResult",
    "marchaud_constant",
    "marchaud_derivative",
    "marchaud_kernel",
    "marchaud_on_grid",
    "scalar_symbol_integral",
    # Bilinear operators
    "BilinearResult",
    "hirota_frac",
    "hirota_frac_commutator",
    "hirota_frac_symbol",
    "hirota_frac_kernel",
    "hirota_classical",
    "kernel_on_grid",
    "ProbeFamily",
    "SobolevProbeReport",
    "sobolev_bound_probe",
    "single_mode_ratio",
    # Exponential sums
    "ExpSum",
    "PhaseVector",
    "Monomial",
    "BilinearOperatorSpec",
    "DispersionRelation",
    "SolitonParams",
    "canonicalize",
    "apply_bilinear_symbolic",
    "apply_linear_symbolic",
    "bilinear_residual_symbolic",
    "mixed_term_identity",
    "dispersion_omega",
    "soliton_params",
    "tau_from_params",
    "one_soliton_tau",
    "two_soliton_tau",
    "kp_one_soliton",
    "kdv_bilinear_symbol",
    "interaction_coefficient_residual",
    # KdV lab
    "SpaceTimeGrid",
    "ResidualReport",
    "PhaseShift",
    "u_from_tau",
    "soliton_profile_check",
    "kp_profile_check",
    "log_identity_check",
    "pde_residual",
    "soliton_peak",
    "amplitude_check",
    "speed_check",
    "two_soliton_phase_shifts",
    # Suite
    "CheckResult",
    "SuiteOptions",
    "SuiteReport",
    "run_checks",
    "run_suite",
    # Errors
    "SpectralHirotaError",
    "ParameterError",
    "GridMismatchError",
    "DegenerateParameterError",
    "BoundaryDecayError",
    "MissingSigmaError",
    "SingularTauError",
    "ExpSumParseError",
    "ConfigError",
]
