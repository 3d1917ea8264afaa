import math

import numpy as np
import pytest

from models.options import MpOptions
from models.physics import PhysicsParams, TentParams, VortexPair
from models.reports import Triviality
from services.functionals import action_J, h_norm_sq, product_norm_sq
from services.mountain_pass import (
    choose_endpoint,
    shell_lower_bound,
    mp_constants,
    mountain_path,
    mp_solve,
    quadcheck,
    tent_integrals,
    tent_J_closed_form,
    tent_norm_sq_closed_form,
    tent_profile,
)
from services.radial_grid import make_grid
from services.verify import classify_triviality
from utils.errors import InvalidArgumentError, PreconditionError

from .conftest import assert_not_semi_trivial, smooth_profile

LN2 = math.log(2.0)


@pytest.fixture(scope="module")
def tent_grid():
    # odd n puts the tent peak r = a = 1 on a node
    return make_grid(2.0, 8191)


@pytest.mark.parametrize("R", [1.0, 2.5, 10.0])
def test_mp_constants(R):
    consts = mp_constants(R)
    assert consts.K == pytest.approx(1.0 / (72.0 * R**4), rel=1e-15)
    assert consts.C0 == pytest.approx(1.0 / (864.0 * R**4), rel=1e-15)
    assert shell_lower_bound(consts.K, R) == pytest.approx(consts.C0, rel=1e-12)


def test_K_maximizes_shell_bound():
    R = 1.0
    K = mp_constants(R).K
    for other in (0.5 * K, 0.9 * K, 1.1 * K, 2.0 * K):
        assert shell_lower_bound(other, R) < shell_lower_bound(K, R)


def test_mp_constants_reject_bad_radius():
    with pytest.raises(InvalidArgumentError):
        mp_constants(0.0)


def test_action_on_separating_shell_stays_above_C0():
    R = 1.0
    grid = make_grid(R, 512)
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=R)
    consts = mp_constants(R)
    rng = np.random.default_rng(7)
    lowest = math.inf
    for _ in range(1000):
        a1 = smooth_profile(grid, rng, modes=int(rng.integers(1, 12)))
        a2 = smooth_profile(grid, rng, modes=int(rng.integers(1, 12)))
        pair = VortexPair.from_arrays(grid, a1, a2, params)
        scale = math.sqrt(consts.K / product_norm_sq(pair))
        shell = VortexPair.from_arrays(grid, scale * a1, scale * a2, params)
        assert product_norm_sq(shell) == pytest.approx(consts.K, rel=1e-10)
        lowest = min(lowest, action_J(shell))
    assert lowest >= consts.C0 - 1e-9


def test_tent_closed_forms():
    values = tent_integrals(TentParams(a=1.0, b=1.0))
    assert values["int r A0^2 dr"] == pytest.approx(2.0 / 3.0)
    assert values["int r A0_r^2 dr"] == pytest.approx(2.0)
    assert values["int A0^2/r dr"] == pytest.approx(0.772589, abs=1e-6)
    assert values["int r A0^3 dr"] == pytest.approx(0.5)


def test_quadcheck_reproduces_tent_integrals():
    report = quadcheck(2.0, 8192)
    assert report.passed
    assert len(report.rows) == 4
    assert all(row.rel_error <= 1e-4 for row in report.rows)


def test_tent_requires_matching_radius():
    with pytest.raises(InvalidArgumentError):
        tent_profile(make_grid(3.0, 64), TentParams(a=1.0, b=1.0))


@pytest.mark.parametrize("b", [1.0, 5.0, 30.0])
def test_tent_pair_norm_identity(tent_grid, b):
    tent = tent_profile(tent_grid, TentParams(a=1.0, b=b))
    pair = VortexPair(a1=tent, a2=tent, params=PhysicsParams(l=1, R=2.0))
    assert product_norm_sq(pair) == pytest.approx(8.0 * b * b * LN2, rel=1e-4)
    assert tent_norm_sq_closed_form(TentParams(a=1.0, b=b), 1) == pytest.approx(8.0 * b * b * LN2, rel=1e-14)


def test_tent_norm_for_higher_vortex_number(tent_grid):
    t = TentParams(a=1.0, b=2.0)
    tent = tent_profile(tent_grid, t)
    assert 2 * h_norm_sq(tent, 3) == pytest.approx(tent_norm_sq_closed_form(t, 3), rel=1e-4)


@pytest.mark.parametrize("b", [1.0, 30.0])
def test_tent_pair_action_formula(tent_grid, b):
    t = TentParams(a=1.0, b=b)
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=2.0)
    tent = tent_profile(tent_grid, t)
    pair = VortexPair(a1=tent, a2=tent, params=params)
    assert action_J(pair) == pytest.approx(tent_J_closed_form(t, params), rel=1e-4)


def test_choose_endpoint():
    R = 10.0
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=R)
    grid = make_grid(R, 511)
    K = mp_constants(R).K
    endpoint, t = choose_endpoint(params, K, grid)
    assert t.a == pytest.approx(5.0)
    assert product_norm_sq(endpoint) > K
    assert action_J(endpoint) < 0.0
    smaller = VortexPair(
        a1=tent_profile(grid, TentParams(a=5.0, b=t.b / 2)),
        a2=tent_profile(grid, TentParams(a=5.0, b=t.b / 2)),
        params=params,
    )
    assert action_J(smaller) >= 0.0 or product_norm_sq(smaller) <= K


@pytest.mark.parametrize("kappa, beta", [(0.0, 0.0), (-1.0, 0.0), (0.5, -1.0)])
def test_mountain_pass_requires_hypothesis(kappa, beta):
    params = PhysicsParams(kappa=kappa, beta=beta, l=1, R=10.0)
    grid = make_grid(10.0, 64)
    with pytest.raises(PreconditionError):
        choose_endpoint(params, mp_constants(10.0).K, grid)
    with pytest.raises(PreconditionError):
        mp_solve(params, grid)


def test_short_mountain_pass_run_reports_history():
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=10.0)
    grid = make_grid(10.0, 127)
    pair, report = mp_solve(params, grid, MpOptions(path_points=16, max_rounds=30))
    assert report.method == "mpass"
    assert report.iters <= 30
    assert len(report.path_max_history) == len(report.path_records) == report.iters
    assert report.J_value == pytest.approx(action_J(pair), rel=1e-12)
    _assert_path_maximum_decreases(report)


def _assert_path_maximum_decreases(report):
    # re-tension rounds included
    history = report.path_max_history
    assert all(later < earlier for earlier, later in zip(history, history[1:]))
    assert [rec.max_J for rec in report.path_records] == history


@pytest.mark.slow
def test_mountain_pass_existence_route(mp_solution):
    pair, report, polish = mp_solution
    assert polish.converged
    assert not polish.trivial
    assert polish.residual_max <= 1e-9
    assert classify_triviality(pair) is Triviality.fully_nontrivial
    assert action_J(pair) >= mp_constants(10.0).C0
    assert np.all(pair.a2.values > 0)
    assert report.path_max_history[-1] >= mp_constants(10.0).C0 - 1e-9
    _assert_path_maximum_decreases(report)
    assert report.converged
    assert report.grad_norm <= MpOptions().crit_tol
    assert_not_semi_trivial(pair, polish)
    assert report.retension_rounds


def test_short_run_retensions_on_schedule():
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=10.0)
    grid = make_grid(10.0, 127)
    _, report = mp_solve(params, grid, MpOptions(path_points=16, max_rounds=25, retension_every=5))
    assert all(r % 5 == 0 for r in report.retension_rounds)
    _assert_path_maximum_decreases(report)


def test_mountain_path_endpoints_are_pinned():
    R = 10.0
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=R)
    grid = make_grid(R, 127)
    endpoint, _ = choose_endpoint(params, mp_constants(R).K, grid)
    pair, _ = mp_solve(params, grid, MpOptions(path_points=32, max_rounds=20))

    for through in (endpoint, pair):
        path = mountain_path(through, endpoint, 32)
        assert path.shape == (33, 2 * grid.n)
        assert np.all(path[0] == 0.0)
        np.testing.assert_array_equal(path[-1], endpoint.stacked())
        values = [action_J(VortexPair.from_arrays(grid, x[: grid.n], x[grid.n :], params)) for x in path]
        assert int(np.argmax(values)) == 8
        assert values[8] > 0.0
        assert all(v < 0.0 for v in values[17:])


def test_mountain_path_needs_a_ray_maximum():
    grid = make_grid(10.0, 64)
    params = PhysicsParams(kappa=1.0, beta=0.0, l=1, R=10.0)
    bump = np.sin(math.pi * grid.nodes / 10.0)
    semi = VortexPair.from_arrays(grid, np.zeros(grid.n), bump, params)
    with pytest.raises(InvalidArgumentError):
        mountain_path(semi, semi)
