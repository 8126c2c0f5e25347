"""Built-in test functions as analytic handles and grid samples."""

import math

import numpy as np
import numpy.typing as npt

from ._errors import ParameterError
from .types import AnalyticFunction, ComplexArray, GridFunction, RealArray


def _sech(x: RealArray) -> RealArray:
    # 2 e^{-|x|} / (1 + e^{-2|x|}) never overflows.
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def gaussian(center: float = 0.0, width: float = 1.0) -> AnalyticFunction:
    """exp(-((x - center)/width)^2)."""
    return AnalyticFunction(
        lambda x: np.exp(-(((x - center) / width) ** 2)),
        sup_norm=1.0,
        label=f"gaussian({center:g},{width:g})",
    )


def x_gaussian() -> AnalyticFunction:
    """x exp(-x^2)."""
    return AnalyticFunction(
        lambda x: x * np.exp(-(x**2)),
        sup_norm=1.0 / math.sqrt(2.0 * math.e),
        label="x-gaussian",
    )


def sech_pulse(center: float = 0.0) -> AnalyticFunction:
    """sech(x - center)."""
    return AnalyticFunction(
        lambda x: _sech(x - center), sup_norm=1.0, label=f"sech({center:g})"
    )


def fourier_mode(k: float) -> AnalyticFunction:
    """exp(ikx), periodic with period 2pi/|k|."""
    if k == 0:
        return constant(1.0)
    return AnalyticFunction(
        lambda x: np.exp(1j * k * x),
        sup_norm=1.0,
        period=2.0 * math.pi / abs(k),
        label=f"mode:{k:g}",
    )


def constant(c: complex) -> AnalyticFunction:
    """The constant function c."""
    return AnalyticFunction(
        lambda x: np.full(np.shape(x), c, dtype=np.complex128),
        sup_norm=abs(c),
        label=f"constant({c})",
        far_value=complex(c),
    )


def trig_polynomial(
    modes: npt.ArrayLike, coefficients: npt.ArrayLike, half_length: float
) -> AnalyticFunction:
    """sum_m c_m exp(i pi m x / L), periodic with period 2L."""
    k = (math.pi / half_length) * np.asarray(modes, dtype=np.float64)
    c = np.asarray(coefficients, dtype=np.complex128)

    def evaluate(x: RealArray) -> ComplexArray:
        total = np.zeros(np.shape(x), dtype=np.complex128)
        for km, cm in zip(k, c, strict=True):
            total += cm * np.exp(1j * km * x)
        return total

    return AnalyticFunction(
        evaluate,
        sup_norm=float(np.sum(np.abs(c))),
        period=2.0 * half_length,
        label=f"trig({k.size} modes)",
    )


def by_name(name: str) -> AnalyticFunction:
    """Resolve a CLI function name: gaussian, x-gaussian, sech or mode:k."""
    match name.split(":", 1):
        case ["gaussian"]:
            return gaussian()
        case ["x-gaussian"]:
            return x_gaussian()
        case ["sech"]:
            return sech_pulse()
        case ["mode", k]:
            try:
                return fourier_mode(float(k))
            except ValueError as e:
                raise ParameterError(f"invalid wavenumber in {name!r}", "func") from e
        case _:
            raise ParameterError(f"unknown test function {name!r}", "func")


def fits_box(f: AnalyticFunction, half_length: float) -> bool:
    """True when f is periodic and 2L is a whole number of its periods."""
    if f.period is None:
        return False
    cycles = 2.0 * half_length / f.period
    return abs(cycles - round(cycles)) <= 1e-9 * max(1.0, cycles)


def sample_on_grid(f: AnalyticFunction, half_length: float, n: int) -> GridFunction:
    """Sample a handle on the N-point grid of [-L, L).

    Periodic handles whose period divides the box are flagged periodic.
    """
    return GridFunction.sample(f, half_length, n, periodic=fits_box(f, half_length))
