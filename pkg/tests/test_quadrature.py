import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfriction.quadrature import (
    QuadratureConfig,
    deriv_at_zero_plus,
    integrate_finite,
    integrate_semi_infinite,
)


def test_inverse_sqrt_endpoint():
    r = integrate_finite(lambda x: 1 / np.sqrt(1 - x * x), 0.0, 1.0)
    assert r.converged
    assert abs(r.value - math.pi / 2) < 1e-10


def test_log_endpoint_singularity():
    r = integrate_finite(np.log, 0.0, 1.0)
    assert abs(r.value + 1) < 1e-9


def test_complex_and_vector_integrands():
    r = integrate_finite(lambda x: np.exp(1j * x), 0.0, math.pi)
    assert abs(r.value - 2j) < 1e-12
    v = integrate_finite(lambda x: np.stack([x, x**2], axis=1), 0.0, 1.0)
    assert np.allclose(v.value, [0.5, 1 / 3], rtol=1e-12)


def test_semi_infinite_gamma_function():
    for n in range(6):
        r = integrate_semi_infinite(lambda x: x**n * np.exp(-x), 1.0)
        assert r.value == pytest.approx(math.factorial(n), rel=1e-11)


def test_budget_exhaustion_is_reported():
    cfg = QuadratureConfig(rel_tol=1e-14, max_subdivisions=2)
    r = integrate_finite(lambda x: np.sin(200 * x), 0.0, 3.0, cfg)
    assert not r.converged


def test_non_finite_integrand_raises():
    with pytest.raises(ValueError):
        integrate_finite(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=0)
    assert QuadratureConfig().tightened().rel_tol == pytest.approx(1e-11)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 50.0), st.floats(0.01, 20.0))
def test_semi_infinite_exponential(rate, scale):
    r = integrate_semi_infinite(lambda x: np.exp(-rate * x), scale)
    assert r.converged
    assert r.value == pytest.approx(1 / rate, rel=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 5), st.integers(0, 6))
def test_polynomial_exact(a, width, n):
    b = a + width
    r = integrate_finite(lambda x: x**n, a, b)
    exact = (b ** (n + 1) - a ** (n + 1)) / (n + 1)
    assert r.value == pytest.approx(exact, rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 10.0))
def test_additivity(c):
    f = lambda x: np.exp(-x) * np.cos(3 * x)
    whole = integrate_finite(f, 0.0, 2 * c).value
    parts = integrate_finite(f, 0.0, c).value + integrate_finite(f, c, 2 * c).value
    assert whole == pytest.approx(parts, rel=1e-8, abs=1e-12)


def test_richardson_derivative():
    r = deriv_at_zero_plus(lambda h: math.sin(2 * h) + h**2, 0.1)
    assert r.converged
    assert r.value == pytest.approx(2.0, rel=1e-10)
    with pytest.raises(ValueError):
        deriv_at_zero_plus(math.sin, 0.0)
