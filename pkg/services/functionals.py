"""
Scalar functionals of the l-vortex system and their discrete gradients.

The discrete action is assembled from the cellwise Dirichlet integral and
nodal quadrature, so its gradient in the weighted inner product
<f, g> = sum_i w_i f_i g_i uses exactly the stencil of ``residual``. At a
discrete solution of the system at (kappa, beta):

    grad_I = (-2 kappa A1, -2 (2 kappa + beta) A2),   grad_J = 0.
"""

from __future__ import annotations

import math

import numpy as np

from models.grid import Profile, RadialGrid
from models.physics import PhysicsParams, VortexPair
from models.reports import FunctionalsReport
from services.radial_grid import (
    dirichlet_integral,
    integrate,
    radial_laplacian,
    values_of,
    weighted_div_r2,
)

TWO_PI = 2.0 * math.pi


def inner(grid: RadialGrid, f: np.ndarray, g: np.ndarray) -> float:
    """Weighted L2(r dr) inner product of interior samples."""
    return float(grid.weights @ (f * g))


# -----------------------------------------------------------------------------
# Array kernels (used inside solver loops)
# -----------------------------------------------------------------------------

def action_I_arrays(grid: RadialGrid, l: int, a1: np.ndarray, a2: np.ndarray) -> float:
    l2 = float(l * l)
    inv_r2 = 1.0 / grid.nodes**2
    kinetic = dirichlet_integral(grid, a1) + 0.5 * dirichlet_integral(grid, a2)
    nodal = l2 * inv_r2 * a1 * a1 + 2.0 * l2 * inv_r2 * a2 * a2 - 2.0 * a1 * a1 * a2
    return 0.5 * (kinetic + float(grid.weights @ nodal))


def action_J_arrays(
    grid: RadialGrid, params: PhysicsParams, a1: np.ndarray, a2: np.ndarray
) -> float:
    mass = params.kappa * inner(grid, a1, a1) + params.sigma * inner(grid, a2, a2)
    return action_I_arrays(grid, params.l, a1, a2) + mass


def grad_I_arrays(
    grid: RadialGrid, l: int, a1: np.ndarray, a2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    l2 = float(l * l)
    inv_r2 = 1.0 / grid.nodes**2
    g1 = -radial_laplacian(grid, a1) + l2 * inv_r2 * a1 - 2.0 * a1 * a2
    g2 = -0.5 * radial_laplacian(grid, a2) + 2.0 * l2 * inv_r2 * a2 - a1 * a1
    return g1, g2


def grad_J_arrays(
    grid: RadialGrid, params: PhysicsParams, a1: np.ndarray, a2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    g1, g2 = grad_I_arrays(grid, params.l, a1, a2)
    return g1 + 2.0 * params.kappa * a1, g2 + 2.0 * params.sigma * a2


def residual_arrays(
    grid: RadialGrid, params: PhysicsParams, a1: np.ndarray, a2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Left minus right side of both radial equations at the interior nodes."""
    l2 = float(params.l * params.l)
    inv_r2 = 1.0 / grid.nodes**2
    f1 = radial_laplacian(grid, a1) - l2 * inv_r2 * a1 - 2.0 * (params.kappa - a2) * a1
    f2 = (
        radial_laplacian(grid, a2)
        - 4.0 * l2 * inv_r2 * a2
        - 4.0 * params.sigma * a2
        + 2.0 * a1 * a1
    )
    return f1, f2


def h_norm_sq_array(grid: RadialGrid, a: np.ndarray, l: int) -> float:
    return dirichlet_integral(grid, a) + float(l * l) * float(grid.weights @ (a * a / grid.nodes**2))


# -----------------------------------------------------------------------------
# Public operations
# -----------------------------------------------------------------------------

def flux_Q(A: Profile) -> float:
    return TWO_PI * integrate(A.grid, A.values * A.values)


def total_flux(pair: VortexPair) -> float:
    return flux_Q(pair.a1) + 2.0 * flux_Q(pair.a2)


def energy_E(pair: VortexPair) -> float:
    grid = pair.grid
    a1, a2 = pair.a1.values, pair.a2.values
    nodal = (
        weighted_div_r2(grid, a1 * a1).values
        + weighted_div_r2(grid, a2 * a2).values
        + a1 * a1 * a2
    )
    return dirichlet_integral(grid, a1) + dirichlet_integral(grid, a2) + integrate(grid, nodal)


def action_I(pair: VortexPair) -> float:
    return action_I_arrays(pair.grid, pair.params.l, pair.a1.values, pair.a2.values)


def action_J(pair: VortexPair) -> float:
    return action_J_arrays(pair.grid, pair.params, pair.a1.values, pair.a2.values)


def h_norm_sq(A: Profile, l: int) -> float:
    return h_norm_sq_array(A.grid, A.values, l)


def product_norm_sq(pair: VortexPair) -> float:
    l = pair.params.l
    return h_norm_sq(pair.a1, l) + h_norm_sq(pair.a2, l)


def grad_I(pair: VortexPair) -> tuple[Profile, Profile]:
    grid = pair.grid
    g1, g2 = grad_I_arrays(grid, pair.params.l, pair.a1.values, pair.a2.values)
    return Profile(values=g1, grid=grid), Profile(values=g2, grid=grid)


def grad_J(pair: VortexPair) -> tuple[Profile, Profile]:
    grid = pair.grid
    g1, g2 = grad_J_arrays(grid, pair.params, pair.a1.values, pair.a2.values)
    return Profile(values=g1, grid=grid), Profile(values=g2, grid=grid)


def residual(pair: VortexPair) -> tuple[Profile, Profile]:
    grid = pair.grid
    f1, f2 = residual_arrays(grid, pair.params, pair.a1.values, pair.a2.values)
    return Profile(values=f1, grid=grid), Profile(values=f2, grid=grid)


def residual_max_arrays(
    grid: RadialGrid, params: PhysicsParams, a1: np.ndarray, a2: np.ndarray
) -> float:
    f1, f2 = residual_arrays(grid, params, a1, a2)
    return float(max(np.max(np.abs(f1)), np.max(np.abs(f2))))


def evaluate_all(pair: VortexPair) -> FunctionalsReport:
    q1, q2 = flux_Q(pair.a1), flux_Q(pair.a2)
    l = pair.params.l
    return FunctionalsReport(
        Q1=q1,
        Q2=q2,
        total_flux=q1 + 2.0 * q2,
        E=energy_E(pair),
        I=action_I(pair),
        J=action_J(pair),
        h_norm_sq_1=h_norm_sq(pair.a1, l),
        h_norm_sq_2=h_norm_sq(pair.a2, l),
        residual_max=residual_max_arrays(pair.grid, pair.params, pair.a1.values, pair.a2.values),
    )


# -----------------------------------------------------------------------------
# Inequality diagnostics
# -----------------------------------------------------------------------------

def interpolation_gap(grid: RadialGrid, A: Profile | np.ndarray) -> float:
    """2 (int r A^2)(int r A_r^2)^(1/2)(int A^2/r)^(1/2) - int r A^4; nonnegative when A(0)=0."""
    a = values_of(grid, A)
    rhs = (
        2.0
        * integrate(grid, a * a)
        * math.sqrt(dirichlet_integral(grid, a))
        * math.sqrt(integrate(grid, a * a / grid.nodes**2))
    )
    return rhs - integrate(grid, a**4)


def poincare_gap(grid: RadialGrid, A: Profile | np.ndarray) -> float:
    """R^2 int A^2/r dr - int r A^2 dr, nonnegative on [0, R]."""
    a = values_of(grid, A)
    return grid.R**2 * integrate(grid, a * a / grid.nodes**2) - integrate(grid, a * a)
