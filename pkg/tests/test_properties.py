"""Property-based tests of numerical identities."""

import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from spectral_hirota import (
    BilinearOperatorSpec,
    ExpSum,
    PhaseVector,
    SpaceTimeGrid,
    apply_bilinear_symbolic,
    bilinear_residual_symbolic,
    canonicalize,
    hirota_frac_commutator,
    interaction_coefficient_residual,
    one_soliton_tau,
    principal_power_ik,
    soliton_params,
    spectral_frac_derivative,
    two_soliton_tau,
    u_from_tau,
)
from spectral_hirota._internal.config import parse_sweep, parse_times
from spectral_hirota.bilinear import band_limited_coefficients, synthesize
from spectral_hirota.functions import gaussian, sample_on_grid

orders = st.floats(min_value=1e-3, max_value=1.0)
wavenumbers = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
negative_k = st.floats(min_value=-5.0, max_value=-0.05)
coefficients = st.floats(min_value=-10.0, max_value=10.0).filter(lambda c: c != 0.0)
terms = st.lists(
    st.tuples(coefficients, st.integers(-3, 3), st.integers(-3, 3)), max_size=8
)


def _exp_sum(raw):
    return ExpSum(tuple((complex(c), PhaseVector(k=k, omega=w)) for c, k, w in raw))


@given(k=wavenumbers, alpha=orders)
def test_power_modulus_and_conjugate(k, alpha):
    value = principal_power_ik(k, alpha)
    assert math.isclose(abs(value), abs(k) ** alpha, rel_tol=1e-12, abs_tol=1e-300)
    mirrored = principal_power_ik(-k, alpha)
    assert abs(mirrored - value.conjugate()) <= 1e-15 * abs(value)


@given(k=wavenumbers, a=orders, b=orders)
def test_power_law(k, a, b):
    assume(a + b <= 1.0)
    product = principal_power_ik(k, a) * principal_power_ik(k, b)
    combined = principal_power_ik(k, a + b)
    assert abs(product - combined) <= 1e-12 * max(1.0, abs(combined))


@given(k=negative_k, delta=st.floats(-3.0, 3.0), alpha=orders)
def test_one_soliton_residual_vanishes(k, delta, alpha):
    report = bilinear_residual_symbolic(
        BilinearOperatorSpec.kdv(), one_soliton_tau(k, delta, alpha)
    )
    assert report.max_abs == 0.0


@settings(max_examples=50, deadline=None)
@given(center=st.floats(-2.0, 2.0), width=st.floats(0.8, 2.0), alpha=orders)
def test_real_input_has_real_derivative(center, width, alpha):
    f = sample_on_grid(gaussian(center, width), 20.0, 256)
    derivative = spectral_frac_derivative(f, alpha).values
    assert np.max(np.abs(derivative.imag)) <= 1e-12 * f.max_abs()


@settings(max_examples=25, deadline=None)
@given(k1=negative_k, k2=negative_k, alpha=st.floats(0.3, 1.0))
def test_two_soliton_field_is_real(k1, k2, alpha):
    assume(abs(k1 - k2) > 1e-3)
    grid = SpaceTimeGrid(30.0, 128, (-0.5, 0.0, 0.5))
    u = u_from_tau(two_soliton_tau(k1, k2, 0.0, 0.0, alpha), grid)
    assert np.all(np.isfinite(u))
    assert np.max(np.abs(u.imag)) <= 1e-12 * np.max(np.abs(u))

@given(k1=negative_k, k2=negative_k)
def test_interaction_coefficient(k1, k2):
    assume(abs(k1 - k2) > 1e-3)
    params = soliton_params([k1, k2], [0.0, 0.0], 1.0)
    assert params.a12 is not None
    assert 0.0 < params.a12.real < 1.0
    scale = abs(k1 - k2) ** 2 * abs(k1 + k2) ** 2
    assert abs(interaction_coefficient_residual(k1, k2, params.a12)) <= 1e-13 * scale


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=orders)
def test_commutator_skew_and_diagonal(seed, alpha):
    rng = np.random.default_rng(seed)
    modes = np.arange(-7, 8)
    coefficients = band_limited_coefficients(rng, 1, 7, 10.0, 4.0)[0]
    f = synthesize(modes, coefficients[0], 10.0, 32)
    g = synthesize(modes, coefficients[1], 10.0, 32)
    forward = hirota_frac_commutator(f, g, alpha).values
    np.testing.assert_array_equal(forward, -hirota_frac_commutator(g, f, alpha).values)
    np.testing.assert_array_equal(hirota_frac_commutator(f, f, alpha).values, 0)


@given(
    start=st.floats(-10.0, 10.0),
    width=st.floats(0.0, 10.0),
    count=st.integers(1, 50),
)
def test_time_ranges(start, width, count):
    times = parse_times(f"{start!r}:{start + width!r}:{count}")
    assert len(times) == count
    assert times == sorted(times)
    assert times[0] == start


@given(start=st.integers(1, 5), steps=st.integers(0, 20))
def test_sweeps_include_both_ends(start, steps):
    lo = start / 10
    hi = round(lo + steps * 0.05, 12)
    sweep = parse_sweep(f"{lo}:{hi}:0.05")
    assert len(sweep) == steps + 1
    assert sweep[0] == lo
    assert math.isclose(sweep[-1], hi)


@given(raw=terms)
def test_canonicalize_idempotent(raw):
    once = canonicalize(_exp_sum(raw))
    assert canonicalize(once) == once
    assert len({phase.key for _, phase in once}) == len(once)


@given(f=terms, g=terms, n=st.sampled_from([1, 3, 5]))
def test_odd_hirota_operator_is_skew(f, g, n):
    op = BilinearOperatorSpec.hirota_x(n)
    forward = apply_bilinear_symbolic(op, _exp_sum(f), _exp_sum(g))
    backward = apply_bilinear_symbolic(op, _exp_sum(g), _exp_sum(f))
    scale = 10.0**2 * 6.0**n * max(1, len(f)) * max(1, len(g))
    assert (forward + backward).max_coefficient() <= 1e-13 * scale
