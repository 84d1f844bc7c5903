"""Reproducing kernels.

The atomic kernel of M^2_{a,rho} has a closed form through Gamma; the Zen kernel of a
boundary measure nu is an integral against 1/v. Hardy and Bergman kernels are the closed
forms of the Zen kernel for nu = delta_0 and nu = Lebesgue.
"""

import math
from numbers import Number

import numpy as np
from attrs import field, frozen
from attrs.validators import instance_of
from multimethod import multimethod

from hardybergman.errors import (
    DomainError,
    ExponentOverflowError,
    SingularWeightError,
    TruncationWarning,
    handle_problem,
)
from hardybergman.measures import AtomicParams, BoundaryMeasure, zen_weight_v
from hardybergman.quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate
from hardybergman.special import log_gamma

__all__ = [
    "AtomicKernel",
    "ZenKernel",
    "HardyKernel",
    "BergmanKernel",
    "KernelSpec",
    "kernel_M",
    "kernel_zen",
    "hardy_kernel",
    "bergman_kernel",
    "growth_envelope",
    "pointwise_bound",
    "zen_pointwise_bound",
    "embedding_check",
    "kernel_value",
    "gram_matrix",
    "min_eigenvalue_ratio",
    "is_positive_semidefinite",
]

# The Zen integral starts on [-ZEN_START_SCALE / Re s, 0] and then doubles its reach.
ZEN_START_SCALE = 8.0
ZEN_MAX_DOUBLINGS = 60
# Graded breakpoints towards xi = 0, where v varies on the scale of the measure.
ZEN_GRADING_LEVELS = 50
MAX_LOG = math.log(np.finfo(float).max)


def _check_right_half_plane(z: complex, w: complex):
    for name, value in (("z", z), ("w", w)):
        if value.real <= 0:
            raise DomainError(
                "kernel arguments must lie in the right half-plane, "
                f"got {name}={value!r}"
            )


def _sum_argument(z, w) -> complex:
    z, w = complex(z), complex(w)
    _check_right_half_plane(z, w)
    return z + w.conjugate()


def kernel_M(z, w, p: AtomicParams) -> complex:
    s = _sum_argument(z, w) / p.rho
    log_value = (
        -math.log(2 * math.pi * p.rho) - s * math.log(p.a) + complex(log_gamma(s))
    )
    if log_value.real > MAX_LOG:
        raise ExponentOverflowError(
            f"kernel value overflows: log |K| = {log_value.real!r}",
            exponent=log_value.real,
        )
    return complex(np.exp(log_value))


def hardy_kernel(z, w) -> complex:
    return 1 / (2 * math.pi * _sum_argument(z, w))


def bergman_kernel(z, w) -> complex:
    return 1 / (math.pi * _sum_argument(z, w) ** 2)


def _zen_breakpoints(L: float) -> np.ndarray:
    return np.append(-L * 2.0 ** -np.arange(ZEN_GRADING_LEVELS + 1), 0.0)


def kernel_zen(
    z, w, m: BoundaryMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> complex:
    """(1 / 2 pi) * integral over (-inf, 0) of e^{(z + conj w) xi} / v(xi).

    The lower end is pushed out by doubling until the newest piece falls below
    `q.target_rel_error` of the running total.
    """
    s = _sum_argument(z, w)
    if m.is_empty:
        raise SingularWeightError("zen weight vanishes: the boundary measure is empty")

    def f(xi):
        v = zen_weight_v(xi, m)
        if not np.all(v > 0):
            bad = float(np.asarray(xi)[~(v > 0)][0])
            raise SingularWeightError(f"zen weight vanishes numerically at xi={bad!r}")
        return np.exp(s * xi) / v

    L = ZEN_START_SCALE / s.real
    total = complex(integrate(f, _zen_breakpoints(L), q))
    for _ in range(ZEN_MAX_DOUBLINGS):
        piece = complex(integrate(f, [-2 * L, -L], q))
        total += piece
        L *= 2
        if abs(piece) <= q.target_rel_error * abs(total):
            break
    else:
        handle_problem(
            f"zen kernel truncated at xi_min={-L!r} with the last piece still above "
            f"{q.target_rel_error!r} of the total",
            q.on_truncation,
            TruncationWarning,
        )
    return total / (2 * math.pi)


def growth_envelope(z, p: AtomicParams) -> float:
    """(Re z)^{1/4} (2/a)^{Re z / rho} Gamma(Re z / rho).

    This is the growth rate of functions in M^2_{a,rho}.
    """
    x = complex(z).real
    if x <= 0:
        raise DomainError(f"growth envelope requires Re z > 0, got {complex(z)!r}")
    log_value = (
        math.log(x) / 4
        + (x / p.rho) * math.log(2 / p.a)
        + float(log_gamma(x / p.rho).real)
    )
    if log_value > MAX_LOG:
        raise ExponentOverflowError(
            f"growth envelope overflows: log value {log_value!r}", exponent=log_value
        )
    return math.exp(log_value)


def pointwise_bound(z, p: AtomicParams) -> float:
    """sqrt(K(z, z)): |F(z)| <= ||F|| * pointwise_bound(z) for every F in the space."""
    return math.sqrt(kernel_M(z, z, p).real)


def zen_pointwise_bound(
    z, m: BoundaryMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """sqrt(K_nu(z, z)), the point-evaluation bound of the Zen space of m."""
    return math.sqrt(kernel_zen(z, z, m, q).real)


def embedding_check(a: float, rho: float, a2: float, rho2: float) -> bool:
    """Whether M^2_{a,rho} embeds continuously in M^2_{a2,rho2}."""
    return rho > rho2 or (rho == rho2 and a > a2)


@frozen
class AtomicKernel:
    params: AtomicParams = field(validator=instance_of(AtomicParams))


@frozen
class ZenKernel:
    measure: BoundaryMeasure = field(validator=instance_of(BoundaryMeasure))
    quadrature: QuadratureConfig = field(
        default=DEFAULT_QUADRATURE, validator=instance_of(QuadratureConfig)
    )


@frozen
class HardyKernel:
    pass


@frozen
class BergmanKernel:
    pass


KernelSpec = AtomicKernel | ZenKernel | HardyKernel | BergmanKernel


@multimethod
def kernel_value(spec: AtomicKernel, z: Number, w: Number) -> complex:
    return kernel_M(z, w, spec.params)


@multimethod
def kernel_value(spec: ZenKernel, z: Number, w: Number) -> complex:
    return kernel_zen(z, w, spec.measure, spec.quadrature)


@multimethod
def kernel_value(spec: HardyKernel, z: Number, w: Number) -> complex:
    return hardy_kernel(z, w)


@multimethod
def kernel_value(spec: BergmanKernel, z: Number, w: Number) -> complex:
    return bergman_kernel(z, w)


def gram_matrix(points, k: KernelSpec) -> np.ndarray:
    """G[i, j] = K(points[i], points[j]); the lower triangle comes from conjugation."""
    points = [complex(z) for z in points]
    for z in points:
        if z.real <= 0:
            raise DomainError(
                f"Gram points must lie in the right half-plane, got {z!r}"
            )
    if len(set(points)) != len(points):
        raise DomainError("Gram points must be pairwise distinct")
    n = len(points)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = kernel_value(k, points[i], points[j])
            G[j, i] = np.conj(G[i, j])
        G[i, i] = G[i, i].real
    return G


def min_eigenvalue_ratio(G: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian G relative to its largest diagonal entry."""
    G = np.asarray(G, dtype=complex)
    if G.size == 0:
        raise DomainError("Gram matrix is empty")
    return float(np.linalg.eigvalsh(G).min() / np.abs(np.diag(G)).max())


def is_positive_semidefinite(G: np.ndarray, tol: float = 1e-10) -> bool:
    return min_eigenvalue_ratio(G) >= -tol
