import math

import numpy as np
import pytest

from models.physics import FluxTargets, PhysicsParams, VortexPair
from services.constrained_minimizer import minimize
from services.mountain_pass import mp_solve
from services.newton_refiner import refine
from services.radial_grid import make_grid


def smooth_profile(grid, rng, modes=6):
    """Random sine series on (0, R); vanishes at both ends."""
    k = np.arange(1, modes + 1)
    coeffs = rng.normal(size=modes) / k**2
    return np.sin(np.outer(grid.nodes, k) * math.pi / grid.R) @ coeffs


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_pair(rng):
    def make(grid, params):
        return VortexPair.from_arrays(grid, smooth_profile(grid, rng), smooth_profile(grid, rng), params)

    return make


@pytest.fixture(scope="session")
def minimized_solution():
    grid = make_grid(10.0, 1024)
    targets = FluxTargets(q1=math.pi, q2=2.0 * math.pi)
    pair, report = minimize(grid, 1, targets)
    return pair, report, targets


@pytest.fixture(scope="session")
def polished_minimizer(minimized_solution):
    pair, report, _ = minimized_solution
    return refine(pair)


@pytest.fixture(scope="session")
def mp_solution():
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=10.0)
    grid = make_grid(10.0, 512)
    pair, report = mp_solve(params, grid)
    refined, polish = refine(pair)
    return refined, report, polish


@pytest.fixture(scope="session")
def localized_minimizer():
    """Minimizer on a disk wide enough for kappa > max{0, -beta/2} to hold."""
    grid = make_grid(20.0, 1024)
    targets = FluxTargets(q1=1.5 * math.pi, q2=math.pi)
    pair, report = minimize(grid, 1, targets)
    refined, polish = refine(pair)
    return refined, report, polish, targets


def assert_not_semi_trivial(pair, report, tol=1e-8):
    """A root with a visible second harmonic always carries a visible first harmonic."""
    if report.residual_max <= tol and pair.a2.max_abs() > 1e3 * tol:
        assert pair.a1.max_abs() > 1e3 * tol
