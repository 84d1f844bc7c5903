import math

import mpmath
import numpy as np
import pytest
from hypothesis import given

from hardybergman.errors import DomainError, SingularWeightError
from hardybergman.kernels import (
    AtomicKernel,
    BergmanKernel,
    HardyKernel,
    ZenKernel,
    bergman_kernel,
    embedding_check,
    gram_matrix,
    growth_envelope,
    hardy_kernel,
    is_positive_semidefinite,
    kernel_M,
    kernel_value,
    kernel_zen,
    min_eigenvalue_ratio,
    pointwise_bound,
    zen_pointwise_bound,
)
from hardybergman.measures import AtomicParams, BoundaryMeasure
from hardybergman.strategies import right_half_plane_points

PARAMS = AtomicParams(2, 1)
PARAMETER_PAIRS = [AtomicParams(2, 1), AtomicParams(1, 2), AtomicParams(0.5, 0.5)]
DIRAC = BoundaryMeasure.dirac()
LEBESGUE = BoundaryMeasure.lebesgue()
GRID_POINTS = [0.5, 1, 2 + 1j, 3 - 2j, 1 + 4j]


def random_points(seed: int, count: int = 8) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(0.2, 4, count) + 1j * rng.uniform(-3, 3, count)


def test_kernel_M_fixture():
    assert kernel_M(1, 1, PARAMS) == pytest.approx(1 / (8 * math.pi), rel=1e-14)


def test_kernel_M_gamma_oracle():
    mpmath.mp.dps = 30
    s = mpmath.mpc(2, 2)
    want = complex(mpmath.mpf(2) ** -s * mpmath.gamma(s) / (2 * mpmath.pi))
    assert abs(kernel_M(1 + 1j, 1 - 1j, PARAMS) - want) <= 1e-13 * abs(want)


@pytest.mark.parametrize("params", PARAMETER_PAIRS, ids=str)
def test_kernel_M_hermitian(params):
    z, w = 1 + 1j, 2 - 0.5j
    assert kernel_M(z, w, params) == pytest.approx(
        np.conj(kernel_M(w, z, params)), rel=1e-14
    )


@pytest.mark.parametrize("params", PARAMETER_PAIRS, ids=str)
@pytest.mark.parametrize("x", [0.1, 1, 5, 20])
def test_kernel_M_diagonal_positive(params, x):
    value = kernel_M(x + 3j, x + 3j, params)
    assert value.real > 0
    assert abs(value.imag) <= 1e-15 * value.real


@pytest.mark.parametrize("z, w", [(-1, 1), (1, -1), (0, 1)])
def test_kernel_M_domain(z, w):
    with pytest.raises(DomainError, match="right half-plane"):
        kernel_M(z, w, PARAMS)


def test_kernel_M_domain_message():
    with pytest.raises(DomainError, match=r"got z=\(-1\+0j\)"):
        kernel_M(-1, 1, PARAMS)


@pytest.mark.parametrize(
    "measure, rel",
    [(DIRAC, 1e-12), (LEBESGUE, 1e-8)],
    ids=["dirac", "lebesgue"],
)
def test_kernel_zen_fixture(measure, rel):
    assert kernel_zen(1, 1, measure) == pytest.approx(1 / (4 * math.pi), rel=rel)


@pytest.mark.parametrize(
    "measure",
    [DIRAC, LEBESGUE, AtomicParams(2, 1).to_measure(20)],
    ids=["dirac", "lebesgue", "atomic"],
)
def test_kernel_zen_hermitian(measure):
    z, w = 1 + 1j, 2
    assert kernel_zen(z, w, measure) == pytest.approx(
        np.conj(kernel_zen(w, z, measure)), rel=1e-9
    )


def test_kernel_zen_matches_hardy():
    for z in GRID_POINTS:
        for w in GRID_POINTS:
            want = hardy_kernel(z, w)
            assert abs(kernel_zen(z, w, DIRAC) - want) <= 1e-10 * abs(want)


def test_kernel_zen_matches_bergman():
    for z in GRID_POINTS:
        for w in GRID_POINTS:
            want = bergman_kernel(z, w)
            assert abs(kernel_zen(z, w, LEBESGUE) - want) <= 1e-8 * abs(want)


def test_kernel_zen_empty_measure():
    with pytest.raises(SingularWeightError, match="empty"):
        kernel_zen(1, 1, BoundaryMeasure())


def test_kernel_zen_weight_underflow():
    # With all mass at x = 5, v(xi) = e^{10 xi} underflows before the integral settles.
    with pytest.raises(SingularWeightError, match="vanishes numerically"):
        kernel_zen(1, 1, BoundaryMeasure.dirac(5.0))


@pytest.mark.parametrize(
    "kernel, z, w, want",
    [
        (hardy_kernel, 1, 1, 1 / (4 * math.pi)),
        (bergman_kernel, 1, 1, 1 / (4 * math.pi)),
        (hardy_kernel, 1 + 1j, 1 + 1j, 1 / (4 * math.pi)),
        (bergman_kernel, 2j + 1, 1, 1 / (math.pi * (2 + 2j) ** 2)),
    ],
)
def test_classical_kernels(kernel, z, w, want):
    assert kernel(z, w) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("kernel", [hardy_kernel, bergman_kernel])
def test_classical_kernels_hermitian_and_domain(kernel):
    assert kernel(1 + 2j, 3 - 1j) == pytest.approx(np.conj(kernel(3 - 1j, 1 + 2j)))
    with pytest.raises(DomainError):
        kernel(-1, 2)


@pytest.mark.parametrize(
    "z, want",
    [
        (1, 1.0),
        (2, 2**0.25),
        (2 + 5j, 2**0.25),
    ],
)
def test_growth_envelope(z, want):
    assert growth_envelope(z, PARAMS) == pytest.approx(want, rel=1e-13)


def test_growth_envelope_domain():
    with pytest.raises(DomainError, match="Re z > 0"):
        growth_envelope(-1 + 1j, PARAMS)


def test_pointwise_bound_fixture():
    assert pointwise_bound(1, PARAMS) == pytest.approx(0.199471, abs=1e-6)
    assert pointwise_bound(1 + 7j, PARAMS) == pointwise_bound(1, PARAMS)


def test_pointwise_bound_follows_growth_envelope():
    # For (a, rho) = (2, 1) the ratio sqrt(K(x, x)) / envelope(x) increases towards
    # 2^{-1/2} pi^{-1/4} (2 pi)^{-1/2} by the duplication formula.
    x = np.linspace(1, 30, 59)
    ratios = np.array(
        [pointwise_bound(t, PARAMS) / growth_envelope(t, PARAMS) for t in x]
    )
    assert np.all(np.diff(ratios) > 0)
    assert ratios[0] == pytest.approx(pointwise_bound(1, PARAMS), rel=1e-12)
    assert ratios[-1] < 0.2118886


@pytest.mark.parametrize("params", PARAMETER_PAIRS[1:], ids=str)
def test_pointwise_bound_ratio_is_bounded(params):
    x = np.linspace(1, 30, 59)
    ratios = np.array(
        [pointwise_bound(t, params) / growth_envelope(t, params) for t in x]
    )
    assert np.all(np.isfinite(ratios))
    assert ratios.max() / ratios.min() < 5


@pytest.mark.parametrize(
    "measure, kernel, rel",
    [(DIRAC, hardy_kernel, 1e-10), (LEBESGUE, bergman_kernel, 1e-8)],
    ids=["dirac", "lebesgue"],
)
def test_zen_pointwise_bound_closed_forms(measure, kernel, rel):
    for z in GRID_POINTS:
        want = math.sqrt(kernel(z, z).real)
        assert zen_pointwise_bound(z, measure) == pytest.approx(want, rel=rel)
    assert zen_pointwise_bound(1 + 7j, measure) == zen_pointwise_bound(1, measure)


def test_zen_pointwise_bound_needs_right_half_plane():
    with pytest.raises(DomainError, match="right half-plane"):
        zen_pointwise_bound(-1, DIRAC)


@pytest.mark.parametrize(
    "a, rho, a2, rho2, want",
    [
        (1, 2, 5, 1, True),
        (3, 1, 2, 1, True),
        (1, 1, 1, 2, False),
        (2, 1, 2, 1, False),
        (1, 1, 3, 1, False),
    ],
)
def test_embedding_check(a, rho, a2, rho2, want):
    assert embedding_check(a, rho, a2, rho2) is want


@pytest.mark.parametrize(
    "spec, want",
    [
        (AtomicKernel(PARAMS), 1 / (8 * math.pi)),
        (ZenKernel(DIRAC), 1 / (4 * math.pi)),
        (HardyKernel(), 1 / (4 * math.pi)),
        (BergmanKernel(), 1 / (4 * math.pi)),
    ],
)
def test_kernel_value_dispatch(spec, want):
    assert kernel_value(spec, 1, 1) == pytest.approx(want, rel=1e-10)
    assert kernel_value(spec, np.complex128(1), 1.0) == pytest.approx(want, rel=1e-10)


def test_gram_single_point():
    G = gram_matrix([1], AtomicKernel(PARAMS))
    assert G.shape == (1, 1)
    assert G[0, 0] == pytest.approx(1 / (8 * math.pi))


@pytest.mark.parametrize(
    "spec",
    [
        AtomicKernel(PARAMS),
        AtomicKernel(AtomicParams(0.5, 0.5)),
        ZenKernel(LEBESGUE),
        ZenKernel(DIRAC),
        HardyKernel(),
        BergmanKernel(),
    ],
    ids=["atomic", "atomic-slow", "zen-lebesgue", "zen-dirac", "hardy", "bergman"],
)
@pytest.mark.parametrize("seed", range(5))
def test_gram_is_hermitian_and_positive(spec, seed):
    G = gram_matrix(random_points(seed), spec)
    assert G.shape == (8, 8)
    np.testing.assert_array_equal(G, G.conj().T)
    assert min_eigenvalue_ratio(G) >= -1e-10
    assert is_positive_semidefinite(G)


def test_indefinite_matrix_detected():
    assert not is_positive_semidefinite(np.array([[1, 2], [2, 1]]))
    assert min_eigenvalue_ratio(np.array([[1, 2], [2, 1]])) == pytest.approx(-1)


@pytest.mark.parametrize(
    "points, match",
    [
        ([1, 1], "distinct"),
        ([1, -1j], "right half-plane"),
    ],
)
def test_gram_validation(points, match):
    with pytest.raises(DomainError, match=match):
        gram_matrix(points, HardyKernel())


def test_empty_gram_matrix():
    with pytest.raises(DomainError, match="empty"):
        min_eigenvalue_ratio(np.empty((0, 0)))


@given(right_half_plane_points(), right_half_plane_points())
def test_kernel_M_hermitian_property(z, w):
    assert kernel_M(z, w, PARAMS) == pytest.approx(
        np.conj(kernel_M(w, z, PARAMS)), rel=1e-12
    )
