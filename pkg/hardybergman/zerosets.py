"""Counting-function analytics of point sequences in the right half-plane.

The quantities here (exponent of convergence, upper and lower densities, the
Carleman ratio) are limits as r -> infinity. On a finite sequence they are estimated
over a window at the top of the available moduli and reported as estimates, never as
decisions about the limit.
"""

import math
import warnings
from enum import StrEnum
from typing import Iterable, Self

import numpy as np
from attrs import field, frozen
from attrs.validators import instance_of, optional

from hardybergman.errors import DomainError, EstimateWarning, InsufficientDataError

__all__ = [
    "PointSequence",
    "Verdict",
    "DensityReport",
    "MIN_POINTS",
    "CARLEMAN_THRESHOLD",
    "counting_function",
    "counting_samples",
    "exponent_of_convergence_estimate",
    "densities",
    "carleman_ratio",
    "carleman_sweep",
    "convergence_sum",
    "classify",
]

MIN_POINTS = 100
# Carleman-type threshold for zero sets of M^2_{2,1}; unknown for other (a, rho).
CARLEMAN_THRESHOLD = 2 / math.pi
ZERO_SET_DENSITY = 0.5


def _sorted_points(values) -> np.ndarray:
    points = np.atleast_1d(np.array(values, dtype=complex))
    points = points[np.argsort(np.abs(points), kind="stable")]
    points.flags.writeable = False
    return points


@frozen
class PointSequence:
    points: np.ndarray = field(converter=_sorted_points, eq=False)
    generator_tag: str | None = field(
        default=None, validator=optional(instance_of(str))
    )

    def __attrs_post_init__(self):
        if self.points.ndim != 1:
            raise ValueError("points must form a one-dimensional sequence")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("points must be finite")
        if np.any(bad := self.points.real <= 0):
            raise DomainError(
                "sequence points must satisfy Re z > 0, "
                f"got {complex(self.points[bad][0])!r}"
            )

    @classmethod
    def arithmetic(cls, step: float, count: int) -> Self:
        """z_j = step * j for j = 1..count."""
        if step <= 0 or count < 1:
            raise DomainError(
                "arithmetic sequence needs step > 0 and count >= 1, "
                f"got {step!r}, {count!r}"
            )
        return cls(step * np.arange(1, count + 1), generator_tag=f"arith:{step!r}")

    @classmethod
    def geometric(cls, base: float, count: int) -> Self:
        """z_j = base ** j for j = 1..count."""
        if base <= 1 or count < 1:
            raise DomainError(
                "geometric sequence needs base > 1 and count >= 1, "
                f"got {base!r}, {count!r}"
            )
        return cls(
            float(base) ** np.arange(1, count + 1), generator_tag=f"geom:{base!r}"
        )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[float]]) -> Self:
        """Build from (re, im) pairs."""
        pairs = np.array([tuple(row) for row in rows], dtype=float).reshape(-1, 2)
        return cls(pairs[:, 0] + 1j * pairs[:, 1])

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __add__(self, other: "PointSequence") -> "PointSequence":
        return PointSequence(np.concatenate([self.points, other.points]))

    def scaled(self, c: float) -> "PointSequence":
        if c <= 0:
            raise DomainError(f"scale factor must be positive, got {c!r}")
        return PointSequence(c * self.points)


class Verdict(StrEnum):
    SUFFICIENT_ZERO_SET = "sufficient_zero_set"
    UNIQUENESS_SET = "uniqueness_set"
    INCONCLUSIVE = "inconclusive"


@frozen
class DensityReport:
    rho1_estimate: float
    n_samples: tuple[tuple[float, int], ...] = field(converter=tuple)
    d_plus: float
    d_minus: float
    carleman_samples: tuple[tuple[float, float], ...] = field(converter=tuple)
    carleman_trend: float
    eps0: float
    verdict: Verdict = field(converter=Verdict)
    threshold: float = CARLEMAN_THRESHOLD
    threshold_space: str = "M^2_{2,1}"


def counting_function(s: PointSequence, r):
    """n(r) = #{z_j : |z_j| <= r}."""
    counts = np.searchsorted(s.moduli, np.asarray(r, dtype=float), side="right")
    return int(counts) if counts.ndim == 0 else counts


def counting_samples(s: PointSequence, radii) -> list[tuple[float, int]]:
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    return list(
        zip(radii.tolist(), np.atleast_1d(counting_function(s, radii)).tolist())
    )


def _window(r_max: float, window: float, samples: int) -> np.ndarray:
    if not 0 < window < 1:
        raise DomainError(f"estimation window must lie in (0, 1), got {window!r}")
    return np.geomspace(window * r_max, r_max, samples)


def _window_top(s: PointSequence, r_max: float | None, stacklevel: int = 3) -> float:
    """Upper end of the estimation window, clipped to the largest available modulus."""
    top = float(s.moduli[-1])
    if r_max is None:
        return top
    if r_max > top:
        warnings.warn(
            f"window end R={r_max!r} exceeds the largest modulus {top!r}; "
            "the estimate uses the window up to the largest modulus",
            EstimateWarning,
            stacklevel=stacklevel,
        )
        return top
    return r_max


def _check_size(s: PointSequence):
    if len(s) < MIN_POINTS:
        raise InsufficientDataError(
            f"estimate needs at least {MIN_POINTS} points, got {len(s)}",
            count=len(s),
            required=MIN_POINTS,
        )


def exponent_of_convergence_estimate(
    s: PointSequence,
    r_max: float | None = None,
    *,
    window: float = 0.5,
    samples: int = 256,
) -> float:
    """Least-squares slope of log n(r) against log r over [window * r_max, r_max].

    `r_max` defaults to the largest modulus of the sequence and is clipped to it.
    """
    _check_size(s)
    r = _window(_window_top(s, r_max), window, samples)
    counts = counting_function(s, r)
    if counts[0] == 0:
        raise InsufficientDataError(
            f"no points below the estimation window starting at r={float(r[0])!r}",
            count=int(counts[-1]),
            required=1,
        )
    slope, _ = np.polyfit(np.log(r), np.log(counts), 1)
    return float(slope)


def _density_range(s: PointSequence, rho: float, r: np.ndarray) -> tuple[float, float]:
    ratios = counting_function(s, r) / r**rho
    return float(ratios.max()), float(ratios.min())


def densities(
    s: PointSequence,
    rho1: float,
    r_max: float | None = None,
    *,
    window: float = 0.5,
    samples: int = 256,
) -> tuple[float, float]:
    """(d+, d-): max and min of n(r) / r^rho1 over the estimation window."""
    if rho1 <= 0:
        raise DomainError(f"densities require rho1 > 0, got {rho1!r}")
    if len(s) == 0:
        return 0.0, 0.0
    r = _window(_window_top(s, r_max), window, samples)
    return _density_range(s, rho1, r)


def _carleman_sums(s: PointSequence, R: np.ndarray) -> np.ndarray:
    partial = np.concatenate([[0.0], np.cumsum((1 / s.points).real)])
    return partial[np.searchsorted(s.moduli, R, side="right")]


def carleman_ratio(s: PointSequence, R):
    """(1 / log R) * sum over |z_j| <= R of Re(1 / z_j)."""
    R = np.asarray(R, dtype=float)
    if np.any(R <= math.e):
        raise DomainError(f"Carleman ratio requires R > e, got {float(np.min(R))!r}")
    ratios = _carleman_sums(s, R) / np.log(R)
    return float(ratios) if ratios.ndim == 0 else ratios


def carleman_sweep(
    s: PointSequence, R_max: float, samples: int = 256
) -> list[tuple[float, float]]:
    """Carleman ratios on a geometric grid over [max(R_max / 10, e), R_max]."""
    if R_max <= math.e:
        raise DomainError(f"Carleman ratio requires R > e, got {R_max!r}")
    R = np.geomspace(max(R_max / 10, math.e * (1 + 1e-12)), R_max, samples)
    return list(zip(R.tolist(), np.atleast_1d(carleman_ratio(s, R)).tolist()))


def convergence_sum(s: PointSequence, rho: float) -> np.ndarray:
    """Partial sums of |z_j|^{-rho} in order of increasing modulus."""
    if rho <= 0:
        raise DomainError(f"convergence sum requires rho > 0, got {rho!r}")
    return np.cumsum(s.moduli ** (-rho))


def classify(
    s: PointSequence,
    R_max: float,
    *,
    rho_tolerance: float = 0.05,
    carleman_margin: float = 0.05,
    window: float = 0.5,
    samples: int = 256,
) -> DensityReport:
    """Finite-data classification of s against the zero-set criteria for M^2_{2,1}.

    A sequence with exponent of convergence 1 and upper density below 1/2 is reported
    as a zero set. One bounded away from the imaginary axis whose Carleman ratio stays
    above 2/pi over the top decade is reported as a set of uniqueness. An `R_max`
    beyond the largest modulus is clipped to it and the verdict is inconclusive.
    """
    _check_size(s)
    top = _window_top(s, R_max)
    r = _window(top, window, samples)
    rho1 = exponent_of_convergence_estimate(s, top, window=window, samples=samples)
    d_plus, d_minus = _density_range(s, max(rho1, 0.0), r)
    carleman = carleman_sweep(s, top, samples)
    trend = min(ratio for _, ratio in carleman)
    eps0 = float(s.points.real.min())

    zero_set = abs(rho1 - 1) <= rho_tolerance and d_plus < ZERO_SET_DENSITY
    uniqueness = eps0 > 0 and trend >= CARLEMAN_THRESHOLD + carleman_margin
    if top < R_max:
        verdict = Verdict.INCONCLUSIVE
    elif zero_set and uniqueness:
        warnings.warn(
            f"both criteria hold on the window up to R={top!r} "
            f"(rho1={rho1!r}, d+={d_plus!r}, Carleman trend {trend!r}); "
            "the window is too short to decide",
            EstimateWarning,
            stacklevel=2,
        )
        verdict = Verdict.INCONCLUSIVE
    elif zero_set:
        verdict = Verdict.SUFFICIENT_ZERO_SET
    elif uniqueness:
        verdict = Verdict.UNIQUENESS_SET
    else:
        verdict = Verdict.INCONCLUSIVE

    return DensityReport(
        rho1_estimate=rho1,
        n_samples=counting_samples(s, r),
        d_plus=d_plus,
        d_minus=d_minus,
        carleman_samples=carleman,
        carleman_trend=trend,
        eps0=eps0,
        verdict=verdict,
    )
