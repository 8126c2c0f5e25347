"""Discrete Fourier transform pair on the periodic box [-L, L)."""

import numpy as np
import numpy.typing as npt

from ..types import ComplexArray


def mode_indices(n: int) -> npt.NDArray[np.int64]:
    """Signed mode numbers 0, 1, ..., N/2-1, -N/2, ..., -1 in FFT ordering."""
    return np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)


def _phase(n: int) -> ComplexArray:
    # e^{-i k_n x_0} with x_0 = -L is (-1)^n.
    return np.where(mode_indices(n) % 2 == 0, 1.0, -1.0).astype(np.complex128)


def forward(values: npt.ArrayLike, half_length: float) -> ComplexArray:
    """Integral-convention transform: the result approximates
    the integral of f(x) e^{-i k_n x} over [-L, L) at k_n = pi*n/L."""
    samples = np.asarray(values, dtype=np.complex128)
    n = samples.shape[0]
    h = 2.0 * half_length / n
    return h * _phase(n) * np.fft.fft(samples)


def inverse(spectrum: npt.ArrayLike, half_length: float) -> ComplexArray:
    """Inverse of :func:`forward`."""
    coefficients = np.asarray(spectrum, dtype=np.complex128)
    n = coefficients.shape[0]
    h = 2.0 * half_length / n
    return np.fft.ifft(coefficients / (h * _phase(n)))


def apply_multiplier(values: npt.ArrayLike, symbol: ComplexArray) -> ComplexArray:
    """Apply a Fourier multiplier given in FFT ordering.

    The scaling and phase of :func:`forward` cancel for multipliers, so the raw
    FFT pair is used directly.
    """
    return np.fft.ifft(symbol * np.fft.fft(np.asarray(values, dtype=np.complex128)))


def upsample(values: ComplexArray, factor: int = 2) -> ComplexArray:
    """Band-limited interpolation onto a grid ``factor`` times finer.

    The Nyquist mode of the input is dropped.
    """
    n = values.shape[0]
    half = n // 2
    coarse = np.fft.fft(values)
    fine = np.zeros(factor * n, dtype=np.complex128)
    fine[:half] = coarse[:half]
    fine[-(half - 1) :] = coarse[-(half - 1) :]
    return factor * np.fft.ifft(fine)


def downsample(values: ComplexArray, n: int) -> ComplexArray:
    """Spectral truncation of fine-grid samples back to ``n`` points.

    Modes outside the coarse band, including the coarse Nyquist mode, are
    discarded.
    """
    m = values.shape[0]
    half = n // 2
    fine = np.fft.fft(values)
    coarse = np.zeros(n, dtype=np.complex128)
    coarse[:half] = fine[:half]
    coarse[-(half - 1) :] = fine[-(half - 1) :]
    return (n / m) * np.fft.ifft(coarse)


def dealiased_product(a: ComplexArray, b: ComplexArray) -> ComplexArray:
    """Pointwise product computed on a 2x zero-padded grid and truncated back."""
    return downsample(upsample(a) * upsample(b), a.shape[0])
