"""Boundary measures nu on [0, inf) for translation-invariant measures nu x dy."""

import math
from typing import Mapping, Self

import numpy as np
from attrs import field, frozen
from attrs.validators import deep_iterable, ge, gt, instance_of, optional

from hardybergman.errors import DomainError, ZeroMassError
from hardybergman.quadrature import linear_exponential_integral
from hardybergman.special import log_gamma

__all__ = [
    "AtomicParams",
    "Atom",
    "Density",
    "BoundaryMeasure",
    "DoublingReport",
    "atom_weight",
    "measure_mass",
    "check_doubling",
    "zen_weight_v",
]

LOG_SPACE_THRESHOLD = 30


def _readonly(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


@frozen
class AtomicParams:
    a: float = field(converter=float, validator=gt(0.0))
    rho: float = field(converter=float, validator=gt(0.0))

    def atom_location(self, n: int) -> float:
        return self.rho * n / 2

    def log_atom_weight(self, n: int) -> float:
        return n * math.log(self.a) - float(log_gamma(n + 1).real)

    def to_measure(self, n_max: int) -> "BoundaryMeasure":
        return BoundaryMeasure(
            atoms=[
                Atom(self.atom_location(n), atom_weight(n, self))
                for n in range(n_max + 1)
            ]
        )


def atom_weight(n: int, params: AtomicParams) -> float:
    if n < 0:
        raise DomainError(f"atom index must be nonnegative, got {n!r}")
    if n > LOG_SPACE_THRESHOLD:
        return math.exp(params.log_atom_weight(n))
    return params.a**n / math.factorial(n)


@frozen
class Atom:
    x: float = field(converter=float, validator=ge(0.0))
    mass: float = field(converter=float, validator=gt(0.0))


@frozen
class Density:
    """Piecewise-linear density against Lebesgue measure, zero outside its grid."""

    grid: np.ndarray = field(converter=lambda g: _readonly(g, float), eq=False)
    values: np.ndarray = field(converter=lambda v: _readonly(v, float), eq=False)

    def __attrs_post_init__(self):
        if self.grid.ndim != 1 or len(self.grid) < 2:
            raise ValueError("density grid needs at least two points")
        if self.grid.shape != self.values.shape:
            raise ValueError(
                "density grid and values differ in length: "
                f"{len(self.grid)} != {len(self.values)}"
            )
        if self.grid[0] < 0 or np.any(np.diff(self.grid) <= 0):
            raise ValueError("density grid must be strictly increasing and nonnegative")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("density values must be finite and nonnegative")

    def __call__(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def cumulative(self, t) -> np.ndarray:
        """Integral of the density over [0, t) for each t."""
        t = np.asarray(t, dtype=float)
        h = np.diff(self.grid)
        partial = np.concatenate(
            [[0.0], np.cumsum(h * (self.values[1:] + self.values[:-1]) / 2)]
        )
        clipped = np.clip(t, self.grid[0], self.grid[-1])
        k = np.clip(
            np.searchsorted(self.grid, clipped, side="right") - 1, 0, len(h) - 1
        )
        inside = clipped - self.grid[k]
        return partial[k] + inside * (self.values[k] + self(clipped)) / 2


@frozen
class BoundaryMeasure:
    atoms: tuple[Atom, ...] = field(
        factory=tuple,
        converter=lambda atoms: tuple(sorted(atoms, key=lambda atom: atom.x)),
        validator=deep_iterable(instance_of(Atom)),
    )
    density: Density | None = field(
        default=None, validator=optional(instance_of(Density))
    )

    @classmethod
    def dirac(cls, x: float = 0.0, mass: float = 1.0) -> Self:
        return cls(atoms=[Atom(x, mass)])

    @classmethod
    def lebesgue(cls, upper: float = 1e5, level: float = 1.0) -> Self:
        return cls(density=Density([0.0, upper], [level, level]))

    @classmethod
    def from_mapping(cls, document: Mapping) -> Self:
        atoms = [Atom(entry["x"], entry["mass"]) for entry in document.get("atoms", [])]
        density = document.get("density")
        if density is not None:
            density = Density(density["grid"], density["values"])
        return cls(atoms=atoms, density=density)

    def __add__(self, other: "BoundaryMeasure") -> "BoundaryMeasure":
        if self.density is not None and other.density is not None:
            if not np.array_equal(self.density.grid, other.density.grid):
                raise ValueError("densities can only be superposed on a common grid")
            density = Density(
                self.density.grid, self.density.values + other.density.values
            )
        else:
            density = self.density if self.density is not None else other.density
        return BoundaryMeasure(atoms=self.atoms + other.atoms, density=density)

    @property
    def is_empty(self) -> bool:
        return not self.atoms and (
            self.density is None or not np.any(self.density.values > 0)
        )


def measure_mass(m: BoundaryMeasure, t):
    """nu([0, t)); an atom located exactly at t is not counted."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError(f"measure_mass requires t > 0, got {float(np.min(t))!r}")
    locations = np.array([atom.x for atom in m.atoms])
    masses = np.array([atom.mass for atom in m.atoms])
    total = (masses * (locations < t[..., None])).sum(axis=-1)
    if m.density is not None:
        total = total + m.density.cumulative(t)
    return total[()] if total.ndim == 0 else total


@frozen
class DoublingReport:
    ratio_samples: tuple[tuple[float, float], ...] = field(converter=tuple)
    sup_estimate: float
    bound: float
    passed: bool


def check_doubling(m: BoundaryMeasure, t_grid, R: float) -> DoublingReport:
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0:
        raise DomainError("doubling check needs a non-empty grid")
    small = measure_mass(m, t)
    if np.any(empty := np.atleast_1d(small) <= 0):
        t_bad = float(np.atleast_1d(t)[empty][0])
        raise ZeroMassError(f"nu([0, t)) vanishes at t={t_bad!r}", t=t_bad)
    ratios = np.atleast_1d(measure_mass(m, 2 * t) / small)
    sup = float(ratios.max())
    return DoublingReport(
        ratio_samples=tuple(zip(np.atleast_1d(t).tolist(), ratios.tolist())),
        sup_estimate=sup,
        bound=float(R),
        passed=sup <= R,
    )


def zen_weight_v(xi, m: BoundaryMeasure):
    """v(xi) = integral of e^{2 xi x} d nu(x), for xi < 0."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi >= 0):
        raise DomainError(f"zen weight requires xi < 0, got {float(np.max(xi))!r}")
    total = np.zeros(xi.shape)
    for atom in m.atoms:
        total = total + atom.mass * np.exp(2 * xi * atom.x)
    if m.density is not None:
        total = total + linear_exponential_integral(
            m.density.grid, m.density.values, 2 * xi
        ).real
    return total[()] if total.ndim == 0 else total
