"""Paley-Wiener side of the function spaces.

A holomorphic function on the right half-plane is carried by its spectral function psi,
sampled on a grid and interpolated linearly, through

    F(z) = (2 pi)^{-1/2} * integral of psi(xi) e^{z xi} d xi.

Norms, inner products, Mellin transforms and the Zen transform are all one-dimensional
integrals over psi. `norm_M_lines` and `norm_zen_lines` compute the same norms from the
spatial side, integrating |F|^2 along vertical lines, and serve as independent checks.
"""

import math
from typing import Callable, Self

import numpy as np
from attrs import evolve, field, frozen

from hardybergman.errors import (
    DecayViolationError,
    DomainError,
    SupportError,
    TruncationWarning,
    handle_problem,
)
from hardybergman.measures import (
    AtomicParams,
    BoundaryMeasure,
    atom_weight,
    zen_weight_v,
)
from hardybergman.quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    integrate,
    linear_exponential_integral,
)

__all__ = [
    "SampledFunction",
    "SpectralFunction",
    "HalfLineFunction",
    "LineSamples",
    "QuadratureConfig",
    "pw_synthesize",
    "norm_M_spectral",
    "line_norms_squared",
    "norm_M_lines",
    "inner_M",
    "average_function",
    "mellin_transform",
    "mellin_to_spectral",
    "norm_halfline_weighted",
    "mellin_inverse_line",
    "zen_synthesize",
    "norm_zen",
    "norm_zen_lines",
    "kernel_spectral_function",
    "kernel_grid",
]

SQRT_TWO_PI = math.sqrt(2 * math.pi)
# Below this modulus the jump expansion of F loses digits and the exact rule is used.
JUMP_EXPANSION_MIN_MODULUS = 1.0
LINE_BLOCK = 64
TAIL_MIN_PHASE = 4.0
# Line integrals nested inside the density integral are held to a tighter target.
INNER_TOLERANCE_FACTOR = 1e-2


def _grid_array(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.flags.writeable = False
    return array


def _sample_array(values) -> np.ndarray:
    array = np.array(values, dtype=complex)
    array.flags.writeable = False
    return array


@frozen
class SampledFunction:
    """Samples on a strictly increasing grid, linear in between and zero outside."""

    grid: np.ndarray = field(converter=_grid_array, eq=False)
    samples: np.ndarray = field(converter=_sample_array, eq=False)

    def __attrs_post_init__(self):
        if self.grid.ndim != 1 or len(self.grid) < 2:
            raise ValueError("a sampled function needs at least two grid points")
        if self.grid.shape != self.samples.shape:
            raise ValueError(
                "grid and samples differ in length: "
                f"{len(self.grid)} != {len(self.samples)}"
            )
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not (np.all(np.isfinite(self.grid)) and np.all(np.isfinite(self.samples))):
            raise ValueError("grid and samples must be finite")

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], grid) -> Self:
        grid = np.asarray(grid, dtype=float)
        return cls(grid, f(grid))

    @classmethod
    def indicator(cls, lo: float, hi: float, value: complex = 1.0) -> Self:
        return cls([lo, hi], [value, value])

    @classmethod
    def zero(cls, lo: float, hi: float) -> Self:
        return cls([lo, hi], [0.0, 0.0])

    @property
    def support(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def is_zero(self) -> bool:
        return not np.any(self.samples)

    def _interpolate(self, x: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        re = np.interp(x, nodes, self.samples.real, left=0.0, right=0.0)
        im = np.interp(x, nodes, self.samples.imag, left=0.0, right=0.0)
        return re + 1j * im

    def __call__(self, x):
        return self._interpolate(np.asarray(x, dtype=float), self.grid)

    def scaled(self, c: complex) -> Self:
        return type(self)(self.grid, c * self.samples)

    @property
    def is_continuous(self) -> bool:
        return bool(self.samples[0] == 0 and self.samples[-1] == 0)

    def __add__(self, other: Self) -> Self:
        if np.array_equal(self.grid, other.grid):
            return type(self)(self.grid, self.samples + other.samples)
        if not (self.is_continuous and other.is_continuous):
            raise ValueError(
                "functions with jumps at their ends can only be added on a common grid"
            )
        grid = np.union1d(self.grid, other.grid)
        return type(self)(grid, self(grid) + other(grid))


@frozen
class SpectralFunction(SampledFunction):
    pass


@frozen
class HalfLineFunction(SampledFunction):
    """A function on (0, inf), interpolated linearly in log t."""

    def __attrs_post_init__(self):
        super().__attrs_post_init__()
        if self.grid[0] <= 0:
            raise SupportError(
                "half-line function must be supported in (0, inf), "
                f"got t_min={float(self.grid[0])!r}"
            )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        positive = t > 0
        log_t = np.log(np.where(positive, t, 1.0))
        return np.where(positive, self._interpolate(log_t, np.log(self.grid)), 0.0)


@frozen
class LineSamples(SampledFunction):
    """Samples y -> f(c + iy) of a function along a vertical line."""


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _unwrap(values):
    values = np.asarray(values)
    return values[()] if values.ndim == 0 else values


def pw_synthesize(psi: SampledFunction, z, q: QuadratureConfig = DEFAULT_QUADRATURE):
    z = _as_complex(z)
    if np.any(z.real < 0):
        raise DomainError(
            f"synthesis requires Re z >= 0, got {complex(z[z.real < 0].flat[0])!r}"
        )
    return _unwrap(linear_exponential_integral(psi.grid, psi.samples, z) / SQRT_TWO_PI)


def _jump_coefficients(psi: SampledFunction) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (a, d) of the jump expansion of psi.

    integral of psi e^{z xi} = sum_j (a_j / z + d_j / z^2) e^{z xi_j}
    """
    s = psi.samples
    slopes = np.diff(s) / np.diff(psi.grid)
    values = np.zeros(len(s), dtype=complex)
    values[0], values[-1] = -s[0], s[-1]
    kinks = np.concatenate([slopes, [0]]) - np.concatenate([[0], slopes])
    return values, kinks


def _synthesize_lines(
    psi: SampledFunction, xs: np.ndarray, y: np.ndarray
) -> np.ndarray:
    """F(x + iy) on the outer product xs x y, shape (len(xs), len(y))."""
    values, kinks = _jump_coefficients(psi)
    growth = np.exp(np.outer(xs, psi.grid))
    phase = np.exp(1j * np.outer(psi.grid, y))
    z = xs[:, None] + 1j * y[None, :]
    small = np.abs(z) < JUMP_EXPANSION_MIN_MODULUS
    safe = np.where(small, 1.0, z)
    result = ((growth * values) @ phase) / safe + ((growth * kinks) @ phase) / safe**2
    if np.any(small):
        result[small] = linear_exponential_integral(psi.grid, psi.samples, z[small])
    return result / SQRT_TWO_PI


def _tail_factors(xs: np.ndarray, Y: float) -> tuple[np.ndarray, np.ndarray]:
    """Integrals of 1/|z|^2 and 1/|z|^4 over |y| > Y on the line Re z = x."""
    r = xs / Y
    small = r < 0.1
    safe = np.where(small, 1.0, xs)
    safe_r = np.where(small, 1.0, r)
    second = np.where(small, (2 / Y) * (1 - r**2 / 3), 2 * np.arctan(safe_r) / safe)
    fourth = np.where(
        small,
        (2 / Y**3) * (1 / 3 - 2 * r**2 / 5 + 3 * r**4 / 7),
        (np.arctan(safe_r) - safe_r / (1 + safe_r**2)) / safe**3,
    )
    return second, fourth


def _pair_tails(
    delta: np.ndarray, Y: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrals over |y| > Y of cos(y d)/y^2, cos(y d)/y^4 and sin(y d)/y^3, per d.

    Far pairs (|d| Y large) use the two leading terms of the oscillatory expansion, near
    pairs the non-oscillating value modulated by cos(Y d).
    """
    far = np.abs(delta) * Y >= TAIL_MIN_PHASE
    d = np.where(far, delta, 1.0)
    sin, cos = np.sin(Y * delta), np.cos(Y * delta)
    second = np.where(far, -2 * sin / (d * Y**2) + 4 * cos / (d**2 * Y**3), 2 * cos / Y)
    fourth = np.where(far, -2 * sin / (d * Y**4), 2 * cos / (3 * Y**3))
    odd = np.where(far, 2 * cos / (d * Y**3), 2 * delta / Y)
    return second, fourth, odd


def _line_tail(psi: SampledFunction, xs: np.ndarray, Y: float) -> np.ndarray:
    """Asymptotics of the integral of |F(x + iy)|^2 over |y| > Y.

    With F = (A/z + B/z^2) / sqrt(2 pi), where A and B are the exponential sums of the
    value and slope jumps, the diagonal terms are integrated exactly in |z| and the
    cross terms through `_pair_tails`.
    """
    values, kinks = _jump_coefficients(psi)
    second, fourth = _tail_factors(xs, Y)
    growth = np.exp(np.outer(xs, psi.grid))
    squared = growth**2
    tail = (
        second * (squared @ np.abs(values) ** 2)
        + fourth * (squared @ np.abs(kinks) ** 2)
        + 2 * xs * fourth * (squared @ (values * np.conj(kinks)).real)
    )
    pair_second, pair_fourth, pair_odd = _pair_tails(
        np.subtract.outer(psi.grid, psi.grid), Y
    )
    coupling = (
        np.outer(values, np.conj(values)).real * pair_second
        + np.outer(kinks, np.conj(kinks)).real * pair_fourth
        - 2 * np.outer(values, np.conj(kinks)).real * pair_odd
    )
    np.fill_diagonal(coupling, 0.0)
    tail = tail + np.einsum("xj,jk,xk->x", growth, coupling, growth)
    return tail / (2 * math.pi)


def line_norms_squared(
    psi: SampledFunction, xs, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> np.ndarray:
    """Integral of |F(x + iy)|^2 dy over the whole line Re z = x, for each x in xs.

    The window |y| <= Y is integrated by quadrature; beyond it the asymptotic expansion
    of |F|^2, read off from the jumps of psi and psi', is added when
    `q.tail_correction` is set.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < 0):
        raise DomainError(f"line norms require Re z >= 0, got x={float(xs.min())!r}")
    if psi.is_zero:
        return np.zeros(xs.shape)

    Y = q.line_truncation_Y
    lo, hi = psi.support
    panels = max(16, math.ceil(Y * (hi - lo) / math.pi))
    result = np.empty(xs.shape)
    for start in range(0, len(xs), LINE_BLOCK):
        block = xs[start : start + LINE_BLOCK]

        def f(y, block=block):
            return np.abs(_synthesize_lines(psi, block, y)) ** 2

        result[start : start + LINE_BLOCK] = integrate(
            f, [-Y, 0.0, Y], q, min_panels=panels
        )
    if q.tail_correction:
        result = result + _line_tail(psi, xs, Y)
    return result


def _log_weight_M(p: AtomicParams) -> Callable[[np.ndarray], np.ndarray]:
    return lambda xi: p.a * np.exp(p.rho * xi)


def _weighted_square_integral(
    psi: SampledFunction, log_weight, q: QuadratureConfig
) -> float:
    if psi.is_zero:
        return 0.0

    def f(xi):
        with np.errstate(divide="ignore"):
            return np.exp(2 * np.log(np.abs(psi(xi))) + log_weight(xi))

    return float(integrate(f, psi.grid, q))


def norm_M_spectral(
    psi: SampledFunction, p: AtomicParams, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    return math.sqrt(_weighted_square_integral(psi, _log_weight_M(p), q))


def _series_tail_check(terms: np.ndarray, q: QuadratureConfig):
    total = terms.sum()
    if terms[-1] > q.target_rel_error * total:
        handle_problem(
            f"line series truncated at N={len(terms) - 1}: "
            f"last term {float(terms[-1])!r} exceeds {q.target_rel_error!r} "
            f"of the sum {float(total)!r}",
            q.on_truncation,
            TruncationWarning,
        )


def norm_M_lines(
    psi: SampledFunction, p: AtomicParams, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    n = np.arange(q.series_truncation_N + 1)
    weights = np.array([atom_weight(int(k), p) for k in n])
    terms = weights * line_norms_squared(psi, p.rho * n / 2, q)
    _series_tail_check(terms, q)
    return math.sqrt(terms.sum())


def inner_M(
    psi1: SampledFunction,
    psi2: SampledFunction,
    p: AtomicParams,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> complex:
    lo = max(psi1.grid[0], psi2.grid[0])
    hi = min(psi1.grid[-1], psi2.grid[-1])
    if lo >= hi or psi1.is_zero or psi2.is_zero:
        return 0j
    grid = np.union1d(psi1.grid, psi2.grid)
    breakpoints = np.concatenate([[lo], grid[(grid > lo) & (grid < hi)], [hi]])
    log_weight = _log_weight_M(p)

    def f(xi):
        return psi1(xi) * np.conj(psi2(xi)) * np.exp(log_weight(xi))

    return complex(integrate(f, breakpoints, q))


def average_function(
    psi: SampledFunction, x: float, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Integral of |F(x + iy)|^2 dy, computed on the spectral side."""
    if x <= 0:
        raise DomainError(f"average function requires x > 0, got {x!r}")
    return _weighted_square_integral(psi, lambda xi: 2 * x * xi, q)


def mellin_transform(
    phi: HalfLineFunction, z, q: QuadratureConfig = DEFAULT_QUADRATURE
):
    if phi.grid[0] <= 0:
        raise SupportError(
            f"Mellin transform needs t_min > 0, got {float(phi.grid[0])!r}"
        )
    z = _as_complex(z)
    if np.any(z.real <= 0):
        raise DomainError(
            "Mellin transform requires Re z > 0, "
            f"got {complex(z[z.real <= 0].flat[0])!r}"
        )
    if phi.is_zero:
        return _unwrap(np.zeros(z.shape, dtype=complex))

    def f(t):
        return phi(t) * np.exp(np.multiply.outer(z - 1, np.log(t)))

    return _unwrap(integrate(f, phi.grid, q) / SQRT_TWO_PI)


def mellin_to_spectral(phi: HalfLineFunction) -> SpectralFunction:
    return SpectralFunction(np.log(phi.grid), phi.samples)


def norm_halfline_weighted(
    phi: HalfLineFunction, p: AtomicParams, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    if phi.is_zero:
        return 0.0

    def f(t):
        with np.errstate(divide="ignore"):
            return np.exp(2 * np.log(np.abs(phi(t))) + p.a * t**p.rho) / t

    return math.sqrt(float(integrate(f, phi.grid, q)))


def mellin_inverse_line(
    f_line: LineSamples, c: float, xi, q: QuadratureConfig = DEFAULT_QUADRATURE
):
    """Recover phi(xi) from samples of its Mellin transform on the line Re z = c."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0):
        raise DomainError(f"Mellin inversion requires xi > 0, got {float(xi.min())!r}")
    magnitude = np.abs(f_line.samples)
    peak = magnitude.max()
    if peak == 0:
        return _unwrap(np.zeros(xi.shape, dtype=complex))
    edge = max(magnitude[0], magnitude[-1]) / peak
    if edge >= q.target_rel_error:
        raise DecayViolationError(
            "line samples do not decay: "
            f"edge/peak ratio {float(edge)!r} >= {q.target_rel_error!r}",
            edge_ratio=float(edge),
        )
    integral = linear_exponential_integral(
        f_line.grid, f_line.samples, -1j * np.log(xi)
    )
    return _unwrap(xi ** (-c) * integral / SQRT_TWO_PI)


def _check_zen_support(phi: SampledFunction):
    if phi.grid[-1] > 0:
        raise SupportError(
            "Zen transform needs support in (-inf, 0], "
            f"got xi_max={float(phi.grid[-1])!r}"
        )


def zen_synthesize(phi: SampledFunction, z, q: QuadratureConfig = DEFAULT_QUADRATURE):
    _check_zen_support(phi)
    z = _as_complex(z)
    if np.any(z.real <= 0):
        raise DomainError(
            f"Zen transform requires Re z > 0, got {complex(z[z.real <= 0].flat[0])!r}"
        )
    return pw_synthesize(phi, z, q)


def norm_zen(
    phi: SampledFunction, m: BoundaryMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    _check_zen_support(phi)
    return math.sqrt(
        _weighted_square_integral(phi, lambda xi: np.log(zen_weight_v(xi, m)), q)
    )


def norm_zen_lines(
    phi: SampledFunction, m: BoundaryMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Spatial Zen norm: line integrals of |T phi|^2 weighted by the measure nu."""
    _check_zen_support(phi)
    inner = evolve(q, target_rel_error=q.target_rel_error * INNER_TOLERANCE_FACTOR)
    total = 0.0
    if m.atoms:
        masses = np.array([atom.mass for atom in m.atoms])
        total += float(
            masses @ line_norms_squared(phi, [atom.x for atom in m.atoms], inner)
        )
    if m.density is not None:
        density = m.density

        def f(x):
            return density(x) * line_norms_squared(phi, x, inner)

        total += float(integrate(f, density.grid, q))
    return math.sqrt(total)


def kernel_grid(
    p: AtomicParams,
    lower: float = -30.0,
    split: float = -10.0,
    fine_step: float = 5e-5,
    coarse_step: float = 5e-3,
    upper_log_weight: float = 50.0,
) -> np.ndarray:
    """Graded grid covering the effective support of the sampled kernels."""
    upper = math.log(upper_log_weight / p.a) / p.rho
    coarse = np.arange(lower, split, coarse_step)
    fine = np.linspace(split, upper, math.ceil((upper - split) / fine_step) + 1)
    return np.concatenate([coarse, fine])


def kernel_spectral_function(z: complex, p: AtomicParams, grid) -> SpectralFunction:
    """Sampled psi_{K_z}: (2 pi)^{-1/2} exp(-a e^{rho xi}) e^{conj(z) xi}."""
    if complex(z).real <= 0:
        raise DomainError(f"kernel requires Re z > 0, got {complex(z)!r}")
    grid = np.asarray(grid, dtype=float)
    log_values = -p.a * np.exp(p.rho * grid) + np.conj(z) * grid
    return SpectralFunction(grid, np.exp(log_values) / SQRT_TWO_PI)
