"""Negative results made computable.

- Projection series of the kernel in the L^p norm of the atomic measure. For p = 2 they
  sum to K(w, w); for p > 2 the terms eventually grow, so no reproducing kernel exists.
- A family f_k whose norms vanish while |f_k| blows up at fixed points off the atom
  lines. Point evaluation is therefore unbounded in the naive space of functions on
  the lines.
- A bounded family converging on the atom lines to a limit g that violates the
  mean-value property, so g extends to no holomorphic function.

Everything that can overflow is computed from its logarithm.
"""

import math
from enum import StrEnum
from typing import Callable

import numpy as np
from attrs import field, frozen

from hardybergman.errors import (
    DomainError,
    ExponentOverflowError,
    TruncationWarning,
    handle_problem,
)
from hardybergman.measures import AtomicParams
from hardybergman.quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    exponential_moments,
    integrate,
)
from hardybergman.spectral import SampledFunction, average_function
from hardybergman.special import log_gamma, log_gamma_magnitude_lower_bound

__all__ = [
    "Trend",
    "DivergenceSeries",
    "LogConvexityCheck",
    "EXPONENT_LIMIT",
    "MAX_PROJECTION_TERMS",
    "projection_partial_sums",
    "divergence_growth_oracle",
    "counterexample_fk",
    "counterexample_fk_log_modulus",
    "counterexample_fk_norm",
    "counterexample_fk_displayed_norm",
    "counterexample_fk_line_norm",
    "bad_point_subsequence",
    "counterexample_fk_growth",
    "counterexample2_fk",
    "counterexample2_limit",
    "counterexample2_norm",
    "mean_value_defect",
    "counterexample2_mean_value_witness",
    "check_log_convexity",
]

EXPONENT_LIMIT = 700.0
MAX_PROJECTION_TERMS = 200
MAX_LINES = 100
TREND_WINDOW = 5
LINE_PANELS = 64
OSCILLATION_CUTOFF = 1e3

SINE_QUARTERS = np.array([0.0, 1.0, 0.0, -1.0])
COSINE_QUARTERS = np.array([1.0, 0.0, -1.0, 0.0])


class Trend(StrEnum):
    DIVERGING = "diverging"
    CONVERGING = "converging"


@frozen
class DivergenceSeries:
    p: float
    params: AtomicParams
    w: complex
    terms: tuple[tuple[int, float], ...] = field(converter=tuple)
    partial_sums_log: tuple[float, ...] = field(converter=tuple)
    verdict: Trend = field(converter=Trend)

    @property
    def log_terms(self) -> np.ndarray:
        return np.array([value for _, value in self.terms])


def _check_k(k: int):
    if int(k) != k or k < 1:
        raise DomainError(f"family index k must be a positive integer, got {k!r}")


def _sincos_turns(turns) -> tuple[np.ndarray, np.ndarray]:
    """sin and cos of 2 pi * turns; exact whenever 4 * turns is an integer."""
    turns = np.asarray(turns, dtype=float)
    quarters = 4 * turns
    exact = quarters == np.round(quarters)
    index = np.mod(np.round(quarters), 4).astype(int)
    angle = 2 * np.pi * np.mod(turns, 1.0)
    sin = np.where(exact, SINE_QUARTERS[index], np.sin(angle))
    cos = np.where(exact, COSINE_QUARTERS[index], np.cos(angle))
    return sin, cos


def _unwrap(values):
    values = np.asarray(values)
    return values[()] if values.ndim == 0 else values


# Projection series of the kernel


def _log_prefactor(p: float, params: AtomicParams, u: float) -> float:
    return (
        math.log(params.rho)
        - p * math.log(2 * math.pi * params.rho)
        - p * u / params.rho * math.log(params.a)
    )


def projection_partial_sums(
    p: float,
    params: AtomicParams,
    w: complex,
    N: int,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> DivergenceSeries:
    """Terms of the L^p norm of K_w summed over the atom lines, in log space.

    term_n = rho (2 pi rho)^{-p} a^{-pu/rho} a^{n(1-p/2)} / n!
             * integral over |y| <= Y of |Gamma(n/2 + u/rho + iy)|^p dy,   u = Re w.

    For p = 2 the full series equals K(w, w).
    """
    w = complex(w)
    u = w.real
    if p < 2:
        raise DomainError(f"projection series requires p >= 2, got {p!r}")
    if u <= 0:
        raise DomainError(f"projection series requires Re w > 0, got {w!r}")
    if not 0 <= N <= MAX_PROJECTION_TERMS:
        raise DomainError(
            f"projection series supports 0 <= N <= {MAX_PROJECTION_TERMS}, got {N!r}"
        )

    n = np.arange(N + 1)
    s = n / 2 + u / params.rho
    # Each line integrand peaks at y = 0; its logarithm there is factored out.
    peak = p * np.real(log_gamma(s))

    def f(y):
        return np.exp(
            p * np.real(log_gamma(s[:, None] + 1j * y[None, :])) - peak[:, None]
        )

    Y = q.line_truncation_Y
    integrals = np.atleast_1d(integrate(f, [-Y, 0.0, Y], q, min_panels=LINE_PANELS))
    log_terms = (
        _log_prefactor(p, params, u)
        + n * (1 - p / 2) * math.log(params.a)
        - np.real(log_gamma(n + 1.0))
        + peak
        + np.log(integrals)
    )
    partial = np.logaddexp.accumulate(log_terms)

    tail = log_terms[-TREND_WINDOW:]
    if len(tail) == TREND_WINDOW and np.all(np.diff(tail) > 0):
        verdict = Trend.DIVERGING
    else:
        verdict = Trend.CONVERGING
        if log_terms[-1] - partial[-1] > math.log(q.target_rel_error):
            handle_problem(
                f"projection series truncated at N={N}: last term is "
                f"{math.exp(log_terms[-1] - partial[-1])!r} of the partial sum",
                q.on_truncation,
                TruncationWarning,
            )
    return DivergenceSeries(
        p=p,
        params=params,
        w=w,
        terms=zip(n.tolist(), log_terms.tolist()),
        partial_sums_log=partial.tolist(),
        verdict=verdict,
    )


def divergence_growth_oracle(
    p: float, params: AtomicParams, w: complex, N: int
) -> np.ndarray:
    """Lower bounds for the log terms of `projection_partial_sums`, n = 1..N.

    Integrating the Gamma lower bound e^{-p pi |y| / 2} over the line gives 4 / (p pi).
    """
    u = complex(w).real
    n = np.arange(1, N + 1)
    bound = np.array(
        [log_gamma_magnitude_lower_bound(int(k), u, params.rho, 0.0, p) for k in n]
    )
    return (
        _log_prefactor(p, params, u)
        + n * (1 - p / 2) * math.log(params.a)
        - np.real(log_gamma(n + 1.0))
        + bound
        + math.log(4 / (p * math.pi))
    )


# First counterexample: f_k(z) = h(kz), h(z) = exp(i e^{2 pi i z}) / (1 + z)


def _fk_exponent(k: int, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(log r, sin, cos) with i e^{2 pi i k z} = r (-sin + i cos)."""
    log_r = -2 * np.pi * k * z.imag
    sin, cos = _sincos_turns(k * z.real)
    return log_r, sin, cos


def _check_closed_half_plane(z: np.ndarray):
    if np.any(bad := z.real < 0):
        raise DomainError(
            f"counterexample requires Re z >= 0, got {complex(z[bad].flat[0])!r}"
        )


def counterexample_fk_log_modulus(k: int, z):
    """log |f_k(z)|; never overflows, and is exact on the atom lines Re z = n/2."""
    _check_k(k)
    z = np.asarray(z, dtype=complex)
    _check_closed_half_plane(z)
    log_r, sin, _ = _fk_exponent(k, z)
    with np.errstate(over="ignore", invalid="ignore"):
        real_exponent = np.where(sin == 0, 0.0, -sin * np.exp(log_r))
    return _unwrap(real_exponent - np.log(np.abs(1 + k * z)))


def counterexample_fk(k: int, z):
    _check_k(k)
    z = np.asarray(z, dtype=complex)
    _check_closed_half_plane(z)
    log_r, sin, cos = _fk_exponent(k, z)
    if np.any(too_large := log_r > EXPONENT_LIMIT):
        raise ExponentOverflowError(
            f"f_k cannot be evaluated at z={complex(z[too_large].flat[0])!r}: "
            f"inner exponent e^{float(log_r[too_large].flat[0])!r}",
            exponent=float(log_r[too_large].flat[0]),
        )
    r = np.exp(log_r)
    exponent = r * (-sin + 1j * cos)
    if np.any(blown := exponent.real > EXPONENT_LIMIT):
        raise ExponentOverflowError(
            f"f_k overflows at z={complex(z[blown].flat[0])!r}: real exponent "
            f"{float(exponent.real[blown].flat[0])!r} exceeds {EXPONENT_LIMIT!r}",
            exponent=float(exponent.real[blown].flat[0]),
        )
    value = np.where(exponent.real < -EXPONENT_LIMIT, 0, np.exp(exponent) / (1 + k * z))
    return _unwrap(value)


def _line_integrals(
    log_modulus: Callable[[np.ndarray], np.ndarray],
    N: int,
    q: QuadratureConfig,
    lower: float | None = None,
) -> np.ndarray:
    """Integrals of |f(n/2 + iy)|^2 over lower <= y <= Y for n = 0..N.

    `lower` defaults to -Y.
    """
    x = np.arange(N + 1)[:, None] / 2

    def f(y):
        return np.exp(2 * log_modulus(x + 1j * y[None, :]))

    Y = q.line_truncation_Y
    lower = -Y if lower is None else lower
    return np.atleast_1d(integrate(f, [lower, 0.0, Y], q, min_panels=LINE_PANELS))


def _line_weights(N: int) -> np.ndarray:
    params = AtomicParams(2, 1)
    return np.exp([params.log_atom_weight(n) for n in range(N + 1)])


def _check_lines(N: int):
    if not 0 <= N <= MAX_LINES:
        raise DomainError(f"line count must satisfy 0 <= N <= {MAX_LINES}, got {N!r}")


def counterexample_fk_norm(
    k: int, N: int, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Squared norm of f_k on the atom lines of M^2_{2,1}, by direct line quadrature."""
    _check_k(k)
    _check_lines(N)
    integrals = _line_integrals(lambda z: counterexample_fk_log_modulus(k, z), N, q)
    if q.tail_correction:
        # |f_k|^2 ~ 1 / (k y)^2 on both sides.
        integrals = integrals + 2 / (k**2 * q.line_truncation_Y)
    return float(_line_weights(N) @ integrals)


def counterexample_fk_line_norm(k: int, n: int, Y: float | None = None) -> float:
    """Integral of |f_k(n/2 + iy)|^2 in closed form, over the line or over |y| <= Y."""
    _check_k(k)
    A = 1 + k * n / 2
    if Y is None:
        return math.pi / (k * A)
    return 2 * math.atan(k * Y / A) / (k * A)


def counterexample_fk_displayed_norm(k: int, N: int) -> float:
    """pi * sum 2^n / n! (1 + k n / 2)^{-2}, the displayed form of the squared norm."""
    _check_k(k)
    n = np.arange(N + 1)
    return float(math.pi * _line_weights(N) @ (1 + k * n / 2) ** -2.0)


def bad_point_subsequence(p: int, q: int, count: int) -> tuple[int, list[int]]:
    """(l0, [l0 + 2ql for l = 1..count]) with sin(2 pi l0 p / q) < 0.

    Along these k the factor exp(i e^{2 pi i k z}) grows without bound at z = p/q + iy
    for every y < 0.
    """
    if q < 1 or count < 0:
        raise DomainError(
            f"bad points need q >= 1 and count >= 0, got q={q!r}, count={count!r}"
        )
    for l0 in range(1, 2 * q + 1):
        sin, _ = _sincos_turns(l0 * p / q)
        if sin < 0:
            return l0, [l0 + 2 * q * l for l in range(1, count + 1)]
    raise DomainError(
        f"no blow-up phase exists for {p}/{q}: sin(2 pi l p / q) is never negative"
    )


def counterexample_fk_growth(
    p: int, q: int, y: float, count: int
) -> list[tuple[int, float]]:
    """(k, log |f_k(p/q + iy)|) along the bad subsequence."""
    if y >= 0:
        raise DomainError(f"blow-up happens below the real axis, got y={y!r}")
    _, ks = bad_point_subsequence(p, q, count)
    z = p / q + 1j * y
    return [(k, float(counterexample_fk_log_modulus(k, z))) for k in ks]


# Second counterexample: f_k(z) = (e^{it} - 1) / (t (1 + z)), t = e^{4 pi i k z}


def counterexample2_fk(k: int, z):
    _check_k(k)
    z = np.asarray(z, dtype=complex)
    _check_closed_half_plane(z)
    log_t = -4 * np.pi * k * z.imag
    sin, cos = _sincos_turns(2 * k * z.real)
    real_line = sin == 0
    huge = log_t > EXPONENT_LIMIT
    if np.any(huge & ~real_line):
        raise ExponentOverflowError(
            f"f_k overflows at z={complex(z[huge & ~real_line].flat[0])!r}: log |t| = "
            f"{float(log_t[huge & ~real_line].flat[0])!r}",
            exponent=float(log_t[huge & ~real_line].flat[0]),
        )
    t = np.exp(np.where(huge, 0.0, log_t)) * (cos + 1j * sin)
    if np.any(blown := (t.imag < -EXPONENT_LIMIT) & ~huge):
        raise ExponentOverflowError(
            f"f_k overflows at z={complex(z[blown].flat[0])!r}: "
            f"e^{{it}} has exponent {float(-t.imag[blown].flat[0])!r}",
            exponent=float(-t.imag[blown].flat[0]),
        )
    e1, _ = exponential_moments(1j * t)
    # On the lines, t is real and |t| > e^700 leaves nothing of f_k.
    return _unwrap(np.where(huge, 0, 1j * e1 / (1 + z)))


def counterexample2_limit(z):
    """Pointwise limit on the atom lines: i / (1 + z) above the real axis, 0 below."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise DomainError("the limit is undefined on the real axis")
    return _unwrap(np.where(z.imag > 0, 1j / (1 + z), 0))


def _counterexample2_log_modulus(k: int, z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(counterexample2_fk(k, z)))


def counterexample2_norm(
    k: int, N: int, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Squared norm of the second family on the atom lines; at most pi e^2 for all k."""
    _check_k(k)
    _check_lines(N)
    # Below the axis t = e^{-4 pi k y} is real on the lines and |f_k|^2 oscillates
    # on the scale 1/t.
    # Past t = OSCILLATION_CUTOFF only its mean 2 / (t |1 + z|)^2 is kept.
    y_cut = -math.log(OSCILLATION_CUTOFF) / (4 * math.pi * k)
    integrals = _line_integrals(
        lambda z: _counterexample2_log_modulus(k, z), N, q, lower=y_cut
    )
    x = np.arange(N + 1) / 2
    remainder = 4 * math.pi * k * (OSCILLATION_CUTOFF * np.abs(1 + x + 1j * y_cut)) ** 2
    integrals = integrals + 1 / remainder
    if q.tail_correction:
        # Only y > 0 contributes beyond Y, where |f_k|^2 ~ 1 / y^2.
        integrals = integrals + 1 / q.line_truncation_Y
    return float(_line_weights(N) @ integrals)


def mean_value_defect(
    f: Callable[[np.ndarray], np.ndarray],
    center: complex,
    radius: float,
    samples: int = 256,
    reference: complex | None = None,
) -> float:
    """|mean of f over the circle - reference|; reference defaults to f(center).

    The circle is sampled at the midpoints of `samples` equal arcs, which avoids the
    horizontal diameter. Holomorphic f give a defect at rounding level.
    """
    if radius <= 0 or samples < 1:
        raise DomainError(
            f"circle needs radius > 0 and samples >= 1, got {radius!r}, {samples!r}"
        )
    theta = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    mean = np.mean(f(center + radius * np.exp(1j * theta)))
    if reference is None:
        reference = complex(f(np.asarray(center)))
    return float(abs(mean - reference))


def counterexample2_mean_value_witness(
    center: float = 0.25, radius: float = 0.2, samples: int = 256
) -> float:
    """Defect of the limit g against both one-sided values at a real center.

    A positive result rules out every holomorphic extension of g near the center.
    """
    above = complex(1j / (1 + center))
    return min(
        mean_value_defect(
            counterexample2_limit, center, radius, samples, reference=above
        ),
        mean_value_defect(counterexample2_limit, center, radius, samples, reference=0j),
    )


@frozen
class LogConvexityCheck:
    x: tuple[float, float, float] = field(converter=tuple)
    values: tuple[float, float, float] = field(converter=tuple)
    holds: bool


def check_log_convexity(
    psi: SampledFunction,
    x1: float,
    x3: float,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> LogConvexityCheck:
    """Midpoint test of log-convexity of x -> integral |F(x + iy)|^2 dy."""
    if not 0 < x1 < x3:
        raise DomainError(f"convexity check requires 0 < x1 < x3, got {x1!r}, {x3!r}")
    x = (x1, (x1 + x3) / 2, x3)
    a1, a2, a3 = (average_function(psi, t, q) for t in x)
    slack = 4 * q.target_rel_error * a2**2
    return LogConvexityCheck(x=x, values=(a1, a2, a3), holds=a2**2 <= a1 * a3 + slack)
