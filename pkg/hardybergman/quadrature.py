"""One-dimensional integration.

`integrate` is a locally adaptive composite Gauss-Legendre rule: every panel is compared
with the sum over its two halves, panels whose difference is below their share of the
tolerance are accepted, and the rest are bisected again.

`linear_exponential_integral` integrates a piecewise-linear function against an
exponential exactly, segment by segment.
"""

import math
from functools import cache
from typing import Callable

import numpy as np
from attrs import field, frozen
from attrs.validators import ge, gt, in_, instance_of

from hardybergman.errors import BASE_OPTIONS, DomainError, NonConvergenceError

__all__ = [
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "Integrand",
    "gauss_legendre",
    "integrate",
    "exponential_moments",
    "linear_exponential_integral",
]

# f(x) maps a 1-D array of nodes to an array whose last axis runs over the nodes.
Integrand = Callable[[np.ndarray], np.ndarray]

# Upper bound on the number of integrand evaluations requested in a single call.
CHUNK_NODES = 8192
# Upper bound on the number of (w, segment) pairs handled at once by the exact rule.
BLOCK_ELEMENTS = 1 << 20

SERIES_RADIUS = 0.5
SERIES_TERMS = 18
E1_COEFFICIENTS = tuple(1 / math.factorial(j + 1) for j in range(SERIES_TERMS))
E2_COEFFICIENTS = tuple(1 / (math.factorial(j) * (j + 2)) for j in range(SERIES_TERMS))


@frozen
class QuadratureConfig:
    target_rel_error: float = field(default=1e-9, converter=float, validator=gt(0.0))
    max_refinements: int = field(default=20, validator=[instance_of(int), ge(1)])
    line_truncation_Y: float = field(default=200.0, converter=float, validator=gt(0.0))
    series_truncation_N: int = field(default=60, validator=[instance_of(int), ge(0)])
    order: int = field(default=10, validator=[instance_of(int), ge(2)])
    tail_correction: bool = field(default=True, validator=instance_of(bool))
    on_truncation: str = field(default="warn", validator=in_(BASE_OPTIONS))


DEFAULT_QUADRATURE = QuadratureConfig()


@cache
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _unwrap(values: np.ndarray):
    return values[()] if values.ndim == 0 else values


def _initial_edges(breakpoints, min_panels: int) -> np.ndarray:
    edges = np.unique(np.asarray(breakpoints, dtype=float))
    if len(edges) < 2 or not np.all(np.isfinite(edges)):
        raise DomainError(
            f"integration needs a finite interval, got breakpoints {edges.tolist()!r}"
        )
    segments = len(edges) - 1
    if min_panels > segments:
        per_segment = math.ceil(min_panels / segments)
        t = np.linspace(0.0, 1.0, per_segment + 1)[:-1]
        a, b = edges[:-1, None], edges[1:, None]
        edges = np.append((a + (b - a) * t).ravel(), edges[-1])
    return edges


def _panel_rule(f: Integrand, a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    nodes, weights = gauss_legendre(order)
    half = (b - a) / 2
    mid = (a + b) / 2
    per_chunk = max(1, CHUNK_NODES // order)
    pieces = []
    for start in range(0, len(a), per_chunk):
        part = slice(start, start + per_chunk)
        x = (mid[part, None] + half[part, None] * nodes).ravel()
        values = np.asarray(f(x))
        values = values.reshape(values.shape[:-1] + (len(x) // order, order))
        pieces.append((values @ weights) * half[part])
    return np.concatenate(pieces, axis=-1)


def _panel_error(difference: np.ndarray) -> np.ndarray:
    error = np.abs(difference)
    return error.reshape(-1, error.shape[-1]).max(axis=0)


def integrate(
    f: Integrand,
    breakpoints,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    *,
    min_panels: int = 1,
):
    """Integrate `f` over [min(breakpoints), max(breakpoints)].

    Breakpoints must include every point where the integrand is not smooth.
    Vector-valued integrands are supported: `f(x)` may return shape `batch + x.shape`,
    and convergence is judged on the largest component.
    """
    edges = _initial_edges(breakpoints, min_panels)
    width = edges[-1] - edges[0]
    a, b = edges[:-1], edges[1:]
    coarse = _panel_rule(f, a, b, config.order)
    accepted = np.zeros(coarse.shape[:-1], dtype=coarse.dtype)
    error = np.inf

    for refinement in range(1, config.max_refinements + 1):
        mid = (a + b) / 2
        halves = _panel_rule(
            f, np.concatenate([a, mid]), np.concatenate([mid, b]), config.order
        )
        left, right = halves[..., : len(a)], halves[..., len(a) :]
        fine = left + right
        panel_error = _panel_error(fine - coarse)
        total = accepted + fine.sum(axis=-1)
        tolerance = config.target_rel_error * np.max(np.abs(total))
        error = panel_error.sum()
        if error <= tolerance:
            return _unwrap(total)

        done = panel_error <= tolerance * (b - a) / width
        accepted = accepted + fine[..., done].sum(axis=-1)
        keep = ~done
        a = np.concatenate([a[keep], mid[keep]])
        b = np.concatenate([mid[keep], b[keep]])
        coarse = np.concatenate([left[..., keep], right[..., keep]], axis=-1)

    raise NonConvergenceError(
        f"integral over [{float(edges[0])!r}, {float(edges[-1])!r}] did not converge",
        estimate=_unwrap(total),
        error_estimate=float(error),
        refinements=config.max_refinements,
    )


def _horner(u: np.ndarray, coefficients: tuple[float, ...]) -> np.ndarray:
    result = np.full_like(u, coefficients[-1])
    for c in coefficients[-2::-1]:
        result = result * u + c
    return result


def exponential_moments(u) -> tuple[np.ndarray, np.ndarray]:
    """(E1, E2) with E1(u) = int_0^1 e^{ut} dt and E2(u) = int_0^1 t e^{ut} dt."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < SERIES_RADIUS
    safe = np.where(small, 1.0, u)
    growth = np.exp(safe)
    e1 = np.where(small, _horner(u, E1_COEFFICIENTS), (growth - 1) / safe)
    e2 = np.where(
        small, _horner(u, E2_COEFFICIENTS), (growth * (safe - 1) + 1) / safe**2
    )
    return _unwrap(e1), _unwrap(e2)


def linear_exponential_integral(grid, samples, w):
    """Exact integral of the piecewise-linear interpolant of `samples` times e^{w xi}.

    The interpolant is zero outside [grid[0], grid[-1]]. `w` may have any shape.
    """
    grid = np.asarray(grid, dtype=float)
    samples = np.asarray(samples, dtype=complex)
    w = np.asarray(w, dtype=complex)
    flat = w.reshape(-1, 1)
    widths = np.diff(grid)
    deltas = np.diff(samples)
    total = np.zeros(flat.shape[0], dtype=complex)

    step = max(1, BLOCK_ELEMENTS // flat.shape[0])
    for start in range(0, len(widths), step):
        part = slice(start, start + step)
        h = widths[part]
        u = flat * h
        left = np.exp(flat * grid[part])
        right = np.exp(flat * grid[start + 1 : start + 1 + len(h)])
        small = np.abs(u) < SERIES_RADIUS
        safe = np.where(small, 1.0, u)
        # m1 = e^{w a} E1(u) and m2 = e^{w a} E2(u), from both endpoint exponentials.
        m1 = np.where(small, left * _horner(u, E1_COEFFICIENTS), (right - left) / safe)
        m2 = np.where(
            small,
            left * _horner(u, E2_COEFFICIENTS),
            (right * (safe - 1) + left) / safe**2,
        )
        total += (h * (samples[part] * m1 + deltas[part] * m2)).sum(axis=1)

    return _unwrap(total.reshape(w.shape))
