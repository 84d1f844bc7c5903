"""Hypothesis strategies for the package's value types."""

from hypothesis import strategies as st

from hardybergman.measures import Atom, BoundaryMeasure, Density
from hardybergman.spectral import HalfLineFunction, SpectralFunction
from hardybergman.zerosets import PointSequence

__all__ = [
    "complex_numbers",
    "right_half_plane_points",
    "spectral_functions",
    "half_line_functions",
    "boundary_measures",
    "point_sequences",
]


def complex_numbers(bound: float = 3.0):
    parts = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
    return st.builds(complex, parts, parts)


def right_half_plane_points(
    re_min: float = 0.1, re_max: float = 5.0, im_bound: float = 5.0
):
    return st.builds(
        complex,
        st.floats(re_min, re_max, allow_nan=False),
        st.floats(-im_bound, im_bound, allow_nan=False),
    )


@st.composite
def _sorted_grid(
    draw, lo: float, hi: float, min_size: int, max_size: int, min_gap: float = 1e-3
):
    points = draw(
        st.lists(
            st.floats(lo, hi, allow_nan=False),
            min_size=min_size,
            max_size=max_size,
            unique=True,
        )
    )
    points = sorted(points)
    # Panels narrower than min_gap are merged.
    grid = [points[0]]
    for x in points[1:]:
        if x - grid[-1] > min_gap:
            grid.append(x)
    if len(grid) < 2:
        grid = [lo, hi]
    return grid


@st.composite
def spectral_functions(
    draw,
    lo: float = -3.0,
    hi: float = 1.0,
    max_size: int = 12,
    continuous: bool = False,
):
    grid = draw(_sorted_grid(lo, hi, 2, max_size, min_gap=0.1))
    samples = draw(
        st.lists(complex_numbers(1.0), min_size=len(grid), max_size=len(grid))
    )
    if continuous:
        samples[0] = samples[-1] = 0
    return SpectralFunction(grid, samples)


@st.composite
def half_line_functions(
    draw, t_min: float = 0.05, t_max: float = 3.0, max_size: int = 12
):
    grid = draw(_sorted_grid(t_min, t_max, 2, max_size))
    samples = draw(st.lists(complex_numbers(), min_size=len(grid), max_size=len(grid)))
    return HalfLineFunction(grid, samples)


@st.composite
def boundary_measures(draw, max_atoms: int = 4, x_max: float = 6.0):
    atoms = draw(
        st.lists(
            st.builds(
                Atom,
                st.floats(0, x_max, allow_nan=False),
                st.floats(0.01, 5, allow_nan=False),
            ),
            max_size=max_atoms,
        )
    )
    density = None
    if not atoms or draw(st.booleans()):
        grid = draw(_sorted_grid(0.0, x_max, 2, 8))
        values = draw(
            st.lists(
                st.floats(0, 3, allow_nan=False), min_size=len(grid), max_size=len(grid)
            )
        )
        if not any(values):
            values[0] = 1.0
        density = Density(grid, values)
    return BoundaryMeasure(atoms=atoms, density=density)


@st.composite
def point_sequences(draw, min_size: int = 1, max_size: int = 50):
    points = draw(
        st.lists(
            right_half_plane_points(0.01, 100, 100),
            min_size=min_size,
            max_size=max_size,
        )
    )
    return PointSequence(points)
