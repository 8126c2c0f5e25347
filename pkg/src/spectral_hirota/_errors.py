"""Error types for spectral-hirota."""

from typing import Any


class SpectralHirotaError(Exception):
    """Base exception for all spectral-hirota errors."""


class ParameterError(SpectralHirotaError, ValueError):
    """Raised when a numerical parameter is outside its admissible range."""

    def __init__(self, message: str, parameter: str | None = None):
        self.parameter = parameter
        if parameter:
            message = f"{parameter}: {message}"
        super().__init__(message)


class GridMismatchError(ParameterError):
    """Raised when two grid functions do not live on the same grid."""

    def __init__(
        self,
        left: tuple[float, int],
        right: tuple[float, int],
    ):
        self.left = left
        self.right = right
        super().__init__(
            f"grid mismatch (L={left[0]}, N={left[1]}) vs "
            f"(L={right[0]}, N={right[1]})",
            parameter="grid",
        )


class DegenerateParameterError(ParameterError):
    """Raised when soliton parameters hit a degenerate value (k = 0, pole of A12)."""


class BoundaryDecayError(SpectralHirotaError):
    """Raised when a grid function is not negligible at the box boundary."""

    def __init__(self, magnitude: float, tolerance: float, side: str):
        self.magnitude = magnitude
        self.tolerance = tolerance
        self.side = side
        super().__init__(
            f"function does not decay at the {side} boundary: relative magnitude "
            f"{magnitude:.3e} exceeds {tolerance:.1e}; enlarge the box or mark "
            "the samples periodic"
        )


class MissingSigmaError(SpectralHirotaError):
    """Raised when a fractional factor needs a phase whose sigma is unset."""

    def __init__(self, phase: Any):
        self.phase = phase
        super().__init__(
            f"phase {phase!r} has no stored sigma (omega^alpha); "
            "the fractional multiplier cannot be applied to it"
        )


class SingularTauError(SpectralHirotaError):
    """Raised when a tau-function vanishes on the evaluation grid."""

    def __init__(self, x: float, t: float, magnitude: float):
        self.x = x
        self.t = t
        self.magnitude = magnitude
        super().__init__(
            f"tau-function vanishes at x={x:.6g}, t={t:.6g} (|F| = {magnitude:.3e})"
        )


class ExpSumParseError(SpectralHirotaError):
    """Raised when an exponential-sum document cannot be parsed."""

    def __init__(self, message: str, data: Any | None = None):
        self.data = data
        super().__init__(message)


class ConfigError(SpectralHirotaError):
    """Raised for unknown or malformed run configuration entries."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        if key:
            message = f"{message}: {key}"
        super().__init__(message)
