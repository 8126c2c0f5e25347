"""Tests for the Marchaud quadrature route."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from spectral_hirota import (
    ParameterError,
    QuadratureSpec,
    marchaud_constant,
    marchaud_derivative,
    marchaud_kernel,
    marchaud_on_grid,
    principal_power_ik,
    scalar_symbol_integral,
    spectral_frac_derivative,
)
from spectral_hirota._internal.quadrature import singular_rule, tail_completion
from spectral_hirota.functions import (
    constant,
    fourier_mode,
    gaussian,
    sample_on_grid,
    sech_pulse,
    trig_polynomial,
)
from spectral_hirota.marchaud import tail_bound


class TestMarchaudConstant:
    """Test C_alpha = alpha / Gamma(1 - alpha)."""

    def test_half(self):
        """Test C_(1/2) = 1 / (2 sqrt(pi))."""
        assert marchaud_constant(0.5) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.05, 0.25, 0.5, 0.75, 0.95])
    def test_against_mpmath(self, alpha):
        """Test against an arbitrary-precision Gamma."""
        expected = float(mpmath.mpf(alpha) / mpmath.gamma(1 - mpmath.mpf(alpha)))
        assert marchaud_constant(alpha) == pytest.approx(expected, rel=1e-13)

    def test_rejects_alpha_one(self):
        """Test alpha = 1 has no Marchaud form."""
        with pytest.raises(ParameterError, match="alpha < 1"):
            marchaud_constant(1.0)


class TestQuadratureRules:
    """Test the singular quadrature rules."""

    @pytest.mark.parametrize("inner_rule", ["gauss-jacobi", "log"])
    def test_integrates_power(self, inner_rule):
        """Test y^2 y^(-1-alpha) over (0, y0] is y0^(2-alpha) / (2-alpha)."""
        alpha = 0.5
        quad = QuadratureSpec(inner_rule=inner_rule, inner_nodes=64)
        rule = singular_rule(alpha, quad)
        inner = slice(0, rule.inner_count)
        total = float(np.sum(rule.weights[inner] * rule.nodes[inner] ** 2))
        assert total == pytest.approx(1 / (2 - alpha), rel=1e-10)

    def test_rule_is_cached(self):
        """Test rules are built once per order and QuadratureSpec."""
        quad = QuadratureSpec()
        assert singular_rule(0.5, quad) is singular_rule(0.5, quad)

    def test_periodic_rule_flag(self):
        """Test periodic rules are marked."""
        rule = singular_rule(0.5, QuadratureSpec(), 2 * math.pi)
        assert rule.periodic
        assert rule.nodes.size == rule.inner_count + 2048

    def test_tail_completion(self):
        """Test the closed-form tail of y^(-1-alpha)."""
        assert tail_completion(0.5, 1e4) == pytest.approx(0.02)


class TestMarchaudDerivative:
    """Test the Marchaud derivative on analytic handles."""

    def test_scalar_integral(self):
        """Test the k = 1, alpha = 1/2 integral equals 2 sqrt(pi) e^{i pi/4}."""
        value = scalar_symbol_integral(1.0, 0.5)
        expected = 2 * math.sqrt(math.pi) * cmath.exp(1j * math.pi / 4)
        assert abs(value - expected) <= 1e-8 * abs(expected)

    def test_scalar_integral_zero_mode(self):
        """Test k = 0 gives 0."""
        assert scalar_symbol_integral(0.0, 0.5) == 0

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_backward_mode(self, alpha):
        """Test the backward difference realizes (ik)^alpha."""
        xs = np.linspace(-1.0, 1.0, 5)
        result = marchaud_derivative(fourier_mode(2.0), xs, alpha)
        expected = principal_power_ik(2.0, alpha) * np.exp(2j * xs)
        np.testing.assert_allclose(result.values, expected, atol=1e-7)
        assert result.converged
        assert result.direction == "backward"
        assert result.tail_bound == 0.0

    def test_forward_mode(self):
        """Test the forward difference realizes (-ik)^alpha."""
        xs = np.array([0.0, 0.5])
        result = marchaud_derivative(fourier_mode(1.0), xs, 0.5, direction="forward")
        expected = principal_power_ik(-1.0, 0.5) * np.exp(1j * xs)
        np.testing.assert_allclose(result.values, expected, atol=1e-7)

    def test_unknown_direction(self):
        """Test an unknown direction is rejected."""
        with pytest.raises(ParameterError):
            marchaud_derivative(fourier_mode(1.0), [0.0], 0.5, direction="sideways")

    def test_constant_is_annihilated(self):
        """Test the derivative of a constant is exactly 0."""
        result = marchaud_derivative(constant(2.0), [-1.0, 0.0, 3.0], 0.5)
        np.testing.assert_array_equal(result.values, 0)

    def test_decaying_handle_reports_tail_bound(self):
        """Test non-periodic handles carry a positive tail bound."""
        quad = QuadratureSpec()
        result = marchaud_derivative(gaussian(), [0.0], 0.5, quad)
        assert result.tail_bound == pytest.approx(tail_bound(0.5, 1.0, quad))
        assert result.tail_bound > 0

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("handle", [gaussian(), sech_pulse()], ids=["gaussian", "sech"])
    def test_tail_bound_covers_truncation(self, handle, alpha):
        """Test doubling y_max moves the result by less than the tail bound."""
        xs = np.linspace(-2.0, 2.0, 5)
        short = marchaud_derivative(handle, xs, alpha, QuadratureSpec())
        long = marchaud_derivative(handle, xs, alpha, QuadratureSpec(y_max=2e4))
        assert np.max(np.abs(short.values - long.values)) <= short.tail_bound
        assert long.tail_bound < short.tail_bound

    def test_rejects_alpha_one(self):
        """Test the integral form requires alpha < 1."""
        with pytest.raises(ParameterError):
            marchaud_derivative(gaussian(), [0.0], 1.0)

    def test_unconverged_rule_is_flagged(self):
        """Test a crude rule reports non-convergence."""
        quad = QuadratureSpec(inner_nodes=32, tail_nodes=32, panel_order=16)
        result = marchaud_derivative(fourier_mode(40.0), [0.0], 0.5, quad)
        assert not result.converged
        assert result.error_estimate > quad.tolerance


class TestGridEquivalence:
    """Test the Marchaud route against the FFT route."""

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_gaussian(self, alpha):
        """Test both routes agree on exp(-x^2) sampled on [-30, 30)."""
        handle = gaussian()
        spectral = spectral_frac_derivative(sample_on_grid(handle, 30.0, 256), alpha)
        quadrature = marchaud_on_grid(handle, 30.0, 256, alpha)
        error = np.linalg.norm(quadrature.values - spectral.values)
        assert error <= 1e-6 * np.linalg.norm(spectral.values)


    def test_gaussian_fine_grid(self):
        """Test the routes agree at alpha = 1/2 on [-20, 20) with 2048 points."""
        handle = gaussian()
        spectral = spectral_frac_derivative(sample_on_grid(handle, 20.0, 2048), 0.5)
        quadrature = marchaud_on_grid(handle, 20.0, 2048, 0.5)
        assert quadrature.converged
        error = np.linalg.norm(quadrature.values - spectral.values)
        assert error <= 1e-6 * np.linalg.norm(spectral.values)


class TestKernel:
    """Test the bilinear Marchaud kernel."""

    def test_matches_symbol_on_modes(self):
        """Test the kernel of two modes is [(ik1)^a - (ik2)^a] e^{i(k1+k2)x}."""
        f = trig_polynomial([1], [1.0], math.pi)
        g = trig_polynomial([3], [1.0], math.pi)
        xs = np.linspace(-math.pi, math.pi, 7)
        result = marchaud_kernel(f, g, xs, 0.5)
        factor = principal_power_ik(1.0, 0.5) - principal_power_ik(3.0, 0.5)
        np.testing.assert_allclose(result.values, factor * np.exp(4j * xs), atol=1e-7)

    def test_swap_negates(self):
        """Test swapping the arguments negates the kernel."""
        f = gaussian()
        g = gaussian(center=0.5)
        xs = [-0.5, 0.0, 0.5]
        forward = marchaud_kernel(f, g, xs, 0.5)
        swapped = marchaud_kernel(g, f, xs, 0.5)
        np.testing.assert_allclose(forward.values, -swapped.values, atol=1e-14)
