import math

import numpy as np
import pytest
from attrs import evolve
from hypothesis import given
from hypothesis import strategies as st

from hardybergman.errors import DomainError, NonConvergenceError
from hardybergman.quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    exponential_moments,
    integrate,
    linear_exponential_integral,
)


@pytest.mark.parametrize(
    "f, breakpoints, want",
    [
        (np.sin, [0, math.pi], 2.0),
        (lambda x: x**7, [-1, 2], (2**8 - 1) / 8),
        (np.exp, [-30, 0], 1 - math.exp(-30)),
        (lambda x: 1 / (1 + x**2), [-200, 0, 200], 2 * math.atan(200)),
        (lambda x: np.abs(x - 0.3), [0, 0.3, 1], (0.09 + 0.49) / 2),
        (lambda x: np.exp(1j * 40 * x), [0, 1], (np.exp(40j) - 1) / 40j),
    ],
)
def test_integrate_known_values(f, breakpoints, want):
    assert abs(integrate(f, breakpoints) - want) <= 1e-9 * abs(want)


def test_integrate_vector_valued():
    scales = np.array([1.0, 2.0, 3.0])

    def f(x):
        return np.exp(-scales[:, None] * x)

    got = integrate(f, [0, 40])
    assert got.shape == (3,)
    np.testing.assert_allclose(got, (1 - np.exp(-40 * scales)) / scales, rtol=1e-9)


def test_integrate_zero_function():
    assert integrate(lambda x: np.zeros_like(x), [-1, 1]) == 0


def test_integrate_min_panels_and_duplicate_breakpoints():
    got = integrate(np.cos, [0, 0, 1, 1], min_panels=7)
    assert abs(got - math.sin(1)) < 1e-12


def test_integrate_tighter_target():
    config = evolve(DEFAULT_QUADRATURE, target_rel_error=1e-13)
    got = integrate(lambda x: np.exp(-(x**2)), [-10, 10], config)
    assert abs(got - math.sqrt(math.pi)) < 1e-12


def test_integrate_hidden_jump_does_not_converge():
    config = evolve(DEFAULT_QUADRATURE, max_refinements=6)
    with pytest.raises(NonConvergenceError, match="did not converge") as info:
        integrate(lambda x: np.where(x < 1 / 3, 0.0, 1.0), [0, 1], config)
    assert info.value.refinements == 6
    assert abs(info.value.estimate - 2 / 3) < 1e-2


@pytest.mark.parametrize("breakpoints", [[1.0], [2.0, 2.0], [0.0, np.inf]])
def test_integrate_rejects_bad_intervals(breakpoints):
    with pytest.raises(DomainError, match="finite interval"):
        integrate(np.sin, breakpoints)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"target_rel_error": 0.0},
        {"target_rel_error": -1e-9},
        {"max_refinements": 0},
        {"line_truncation_Y": 0.0},
        {"series_truncation_N": -1},
        {"on_truncation": "loud"},
        {"order": 1},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        QuadratureConfig(**kwargs)


def test_config_defaults():
    assert DEFAULT_QUADRATURE.target_rel_error == 1e-9
    assert DEFAULT_QUADRATURE.max_refinements == 20
    assert DEFAULT_QUADRATURE.line_truncation_Y == 200.0
    assert DEFAULT_QUADRATURE.series_truncation_N == 60


@pytest.mark.parametrize("u", [0.0, 1e-8, 0.3j, -0.49, 0.5, 2 + 3j, -40.0, 25j])
def test_exponential_moments(u):
    e1, e2 = exponential_moments(u)
    t = np.linspace(0, 1, 200001)
    values = np.exp(u * t)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    want1 = trapezoid(values, t)
    want2 = trapezoid(t * values, t)
    assert abs(e1 - want1) < 1e-8 * max(1, abs(want1))
    assert abs(e2 - want2) < 1e-8 * max(1, abs(want2))


def test_exponential_moments_are_continuous_at_series_switch():
    inside = np.array(exponential_moments(0.4999999))
    outside = np.array(exponential_moments(0.5000001))
    assert np.max(np.abs(inside - outside)) < 1e-6


def test_linear_exponential_integral_indicator():
    got = linear_exponential_integral([-1, 0], [1, 1], 1.0)
    assert abs(got - (1 - math.exp(-1))) < 1e-15


def test_linear_exponential_integral_zero_exponent_is_trapezoid():
    grid = np.array([0.0, 0.5, 2.0, 2.5])
    samples = np.array([1.0, -2.0, 3.0 + 1j, 0.0])
    want = np.sum(np.diff(grid) * (samples[1:] + samples[:-1]) / 2)
    assert abs(linear_exponential_integral(grid, samples, 0.0) - want) < 1e-14


def test_linear_exponential_integral_matches_adaptive_quadrature():
    rng = np.random.default_rng(11)
    grid = np.sort(rng.uniform(-3, 1, 30))
    samples = rng.normal(size=30) + 1j * rng.normal(size=30)
    w = np.array([0.0, 1.5 - 2j, 0.01j, 7 + 40j])

    def f(xi):
        real = np.interp(xi, grid, samples.real)
        interpolant = real + 1j * np.interp(xi, grid, samples.imag)
        return interpolant * np.exp(w[:, None] * xi)

    want = integrate(f, grid, evolve(DEFAULT_QUADRATURE, target_rel_error=1e-13))
    got = linear_exponential_integral(grid, samples, w)
    np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-13)


def test_linear_exponential_integral_keeps_shape():
    w = np.ones((2, 3)) * (1 + 1j)
    assert linear_exponential_integral([0, 1], [1, 1], w).shape == (2, 3)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_linear_exponential_integral_ramp(x, y):
    w = complex(x, y)
    _, e2 = exponential_moments(w)
    got = linear_exponential_integral([0, 1], [0, 1], w)
    assert abs(got - e2) < 1e-13 * max(1, abs(e2))
