"""Complex Gamma function on the whole plane minus the poles.

Values come from a Lanczos rational approximation evaluated in log form, with the
reflection identity for the left half-plane. Every formula in the package that
multiplies Gamma by exponentials goes through `log_gamma` and exponentiates last.
"""

import math

import numpy as np
from attrs import field, frozen
from attrs.validators import and_, deep_iterable, ge, gt, instance_of, min_len

from hardybergman.errors import DomainError, PoleError

__all__ = [
    "LANCZOS_G",
    "LANCZOS_COEFFICIENTS",
    "GammaEngine",
    "DEFAULT_ENGINE",
    "gamma",
    "log_gamma",
    "gamma_magnitude_lower_bound",
    "log_gamma_magnitude_lower_bound",
]

LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

HALF_LOG_TWO_PI = 0.5 * math.log(2 * math.pi)


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _unwrap(values: np.ndarray):
    return values[()] if values.ndim == 0 else values


@frozen
class GammaEngine:
    coefficient_set: tuple[float, ...] = field(
        default=LANCZOS_COEFFICIENTS,
        converter=tuple,
        validator=deep_iterable(
            instance_of(float), and_(instance_of(tuple), min_len(2))
        ),
    )
    g: float = field(default=LANCZOS_G, converter=float, validator=gt(0.0))
    reflection_threshold: float = field(default=0.5, converter=float)
    pole_tolerance: float = field(default=1e-14, converter=float, validator=ge(0.0))

    def _series(self, w: np.ndarray) -> np.ndarray:
        head, *tail = self.coefficient_set
        x = np.full_like(w, head)
        for i, c in enumerate(tail, start=1):
            x = x + c / (w + i)
        return x

    def _log_lanczos(self, z: np.ndarray) -> np.ndarray:
        # Only valid for Re z >= reflection_threshold.
        w = z - 1
        t = w + self.g + 0.5
        return HALF_LOG_TWO_PI + (w + 0.5) * np.log(t) - t + np.log(self._series(w))

    def _check_poles(self, z: np.ndarray):
        nearest = np.round(z.real)
        hit = (nearest <= 0) & (np.abs(z - nearest) < self.pole_tolerance)
        if np.any(hit):
            pole = complex(np.asarray(z)[hit].flat[0])
            raise PoleError(
                f"gamma has a pole at {complex(round(pole.real))!r}, got {pole!r}",
                z=pole,
            )

    def gamma(self, z):
        z = _as_complex(z)
        self._check_poles(z)
        reflect = z.real < self.reflection_threshold
        direct = np.exp(self._log_lanczos(np.where(reflect, 1 - z, z)))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            reflected = np.pi / (np.sin(np.pi * z) * direct)
        return _unwrap(np.where(reflect, reflected, direct))

    def log_gamma(self, z):
        """Analytic logarithm of Gamma on Re z > 0.

        This is the continuation of the real log-Gamma, not the principal logarithm of
        `gamma(z)`, so it has no jumps along vertical lines.
        """
        z = _as_complex(z)
        if np.any(bad := z.real <= 0):
            raise DomainError(
                f"log_gamma requires Re z > 0, got {complex(z[bad].flat[0])!r}"
            )
        small = z.real < self.reflection_threshold
        value = self._log_lanczos(np.where(small, z + 1, z))
        return _unwrap(np.where(small, value - np.log(z), value))


DEFAULT_ENGINE = GammaEngine()


def gamma(z):
    return DEFAULT_ENGINE.gamma(z)


def log_gamma(z):
    return DEFAULT_ENGINE.log_gamma(z)


def _check_bound_domain(n, u, rho, p):
    if n < 1:
        raise DomainError(f"lower bound requires n >= 1, got {n!r}")
    if u <= 0 or rho <= 0:
        raise DomainError(
            f"lower bound requires u > 0 and rho > 0, got u={u!r}, rho={rho!r}"
        )
    if p < 1:
        raise DomainError(f"lower bound requires p >= 1, got {p!r}")


def log_gamma_magnitude_lower_bound(n: int, u: float, rho: float, y, p: float):
    """Log of the lower bound for |Gamma(n/2 + u/rho + iy)|^p, with unit constant."""
    _check_bound_domain(n, u, rho, p)
    y = np.asarray(y, dtype=float)
    value = (
        -p * u / rho
        - p * math.pi * np.abs(y) / 2
        + p * (n - 1) / 2 * math.log(n / 2)
        - p * n / 2
    )
    return _unwrap(value)


def gamma_magnitude_lower_bound(n: int, u: float, rho: float, y, p: float):
    return _unwrap(np.exp(np.asarray(log_gamma_magnitude_lower_bound(n, u, rho, y, p))))
