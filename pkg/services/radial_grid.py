"""
Radial mesh operations: construction, quadrature in the measure r dr, and
the difference stencils shared by every functional and solver.

All array-level helpers take plain numpy arrays of interior samples; the
public operations also accept Profile objects.
"""

from __future__ import annotations

import logging
from typing import Callable, Union

import numpy as np
from scipy.linalg import solve_banded

from models.grid import Profile, RadialGrid
from utils.errors import DimensionError, InvalidArgumentError

logger = logging.getLogger(__name__)

Sampled = Union[Profile, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def make_grid(R: float, n: int) -> RadialGrid:
    if not np.isfinite(R) or R <= 0.0:
        raise InvalidArgumentError(f"domain radius must be positive, got R={R!r}")
    if int(n) != n or n < 8:
        raise InvalidArgumentError(f"need an integer node count n >= 8, got n={n!r}")
    return RadialGrid(R=float(R), n=int(n))


def values_of(grid: RadialGrid, f: Profile | np.ndarray) -> np.ndarray:
    """Interior samples of ``f`` checked against ``grid``."""
    if isinstance(f, Profile):
        if f.grid.n != grid.n or f.grid.R != grid.R:
            raise DimensionError("profile lives on a different grid")
        return f.values
    arr = np.asarray(f, dtype=np.float64)
    if arr.shape != (grid.n,):
        raise DimensionError(f"expected {grid.n} interior samples, got shape {arr.shape}")
    return arr


def integrate(grid: RadialGrid, f: Sampled) -> float:
    """Trapezoid approximation of the integral of f(r) r dr over [0, R].

    Profiles and length-n arrays are interior samples with the Dirichlet
    zeros implied. Length-(n+2) arrays and callables include the boundary
    values; f(0) never contributes because its weight r=0 vanishes.
    """
    if callable(f) and not isinstance(f, (Profile, np.ndarray)):
        full = np.asarray(f(grid.full_nodes), dtype=np.float64)
        if full.shape == ():
            full = np.full(grid.n + 2, float(full))
        return float(grid.weights @ full[1:-1] + grid.closure_weight * full[-1])
    if not isinstance(f, Profile):
        arr = np.asarray(f, dtype=np.float64)
        if arr.shape == (grid.n + 2,):
            return float(grid.weights @ arr[1:-1] + grid.closure_weight * arr[-1])
    return float(grid.weights @ values_of(grid, f))


def sample(grid: RadialGrid, fn: Callable[[np.ndarray], np.ndarray]) -> Profile:
    return Profile(values=fn(grid.nodes), grid=grid)


def pad(a: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], a, [0.0]))


def ddr(grid: RadialGrid, A: Profile | np.ndarray) -> Profile:
    """Second-order central differences using the boundary zeros as neighbours."""
    full = pad(values_of(grid, A))
    return Profile(values=(full[2:] - full[:-2]) / (2.0 * grid.h), grid=grid)


def weighted_div_r2(grid: RadialGrid, A: Profile | np.ndarray) -> Profile:
    return Profile(values=values_of(grid, A) / grid.nodes**2, grid=grid)


def cell_slopes(grid: RadialGrid, a: np.ndarray) -> np.ndarray:
    """Forward differences on the n+1 cells, boundary zeros included."""
    return np.diff(pad(a)) / grid.h


def dirichlet_integral(grid: RadialGrid, A: Profile | np.ndarray) -> float:
    """Cellwise midpoint value of the integral of r A_r^2 dr.

    Exact for piecewise-linear A whose kinks sit on nodes.
    """
    s = cell_slopes(grid, values_of(grid, A))
    return float(grid.cell_weights @ (s * s))


def radial_laplacian(grid: RadialGrid, a: np.ndarray) -> np.ndarray:
    """Conservative stencil for A'' + A'/r; the weighted gradient of -dirichlet_integral/2."""
    lower, diag, upper = grid.laplacian_bands
    out = diag * a
    out[1:] += lower[1:] * a[:-1]
    out[:-1] += upper[:-1] * a[1:]
    return out


def solve_tridiagonal(
    grid: RadialGrid,
    laplacian_scale: float,
    shift: np.ndarray,
    rhs: np.ndarray,
) -> np.ndarray:
    """Solve (-laplacian_scale * Laplacian + diag(shift)) x = rhs."""
    lower, diag, upper = grid.laplacian_bands
    ab = np.zeros((3, grid.n))
    ab[0, 1:] = -laplacian_scale * upper[:-1]
    ab[1, :] = -laplacian_scale * diag + shift
    ab[2, :-1] = -laplacian_scale * lower[1:]
    return solve_banded((1, 1), ab, rhs)
