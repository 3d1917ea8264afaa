import numpy as np
import pytest
from pydantic import ValidationError

from models.grid import Profile
from services.mountain_pass import tent_profile
from models.physics import TentParams
from services.radial_grid import (
    ddr,
    dirichlet_integral,
    integrate,
    make_grid,
    radial_laplacian,
    sample,
    solve_tridiagonal,
    values_of,
    weighted_div_r2,
)
from utils.errors import DimensionError, InvalidArgumentError


@pytest.mark.parametrize("R, n", [(0.0, 64), (-1.0, 64), (float("nan"), 64), (1.0, 4), (1.0, 12.5)])
def test_make_grid_rejects_bad_arguments(R, n):
    with pytest.raises(InvalidArgumentError):
        make_grid(R, n)


def test_grid_geometry():
    grid = make_grid(10.0, 99)
    assert grid.h == pytest.approx(0.1)
    assert grid.nodes.shape == (99,)
    assert grid.nodes[0] == pytest.approx(0.1)
    assert grid.nodes[-1] == pytest.approx(9.9)
    assert grid.full_nodes[0] == 0.0 and grid.full_nodes[-1] == 10.0
    assert grid.midpoints.shape == (100,)


def test_grid_arrays_are_read_only():
    grid = make_grid(1.0, 16)
    with pytest.raises(ValueError):
        grid.nodes[0] = 3.0
    p = Profile(values=np.ones(16), grid=grid)
    with pytest.raises(ValueError):
        p.values[0] = 2.0


def test_profile_length_and_finiteness():
    grid = make_grid(1.0, 16)
    with pytest.raises(ValidationError):
        Profile(values=np.ones(15), grid=grid)
    with pytest.raises(ValidationError):
        Profile(values=np.full(16, np.nan), grid=grid)


@pytest.mark.parametrize("n", [8, 63, 1000])
def test_total_weight_is_half_R_squared(n):
    grid = make_grid(3.0, n)
    assert grid.total_weight == pytest.approx(4.5, rel=1e-13)
    assert integrate(grid, lambda r: 1.0) == pytest.approx(4.5, rel=1e-13)
    assert grid.weights.sum() == pytest.approx(4.5 * n / (n + 1), rel=1e-13)
    assert integrate(grid, np.ones(n + 2)) == pytest.approx(4.5, rel=1e-13)
    # interior samples imply A(R) = 0, so the closure half cell drops out
    assert integrate(grid, np.ones(n)) == pytest.approx(4.5 - grid.closure_weight, rel=1e-13)


def test_integrate_polynomial_second_order():
    grid = make_grid(2.0, 2000)
    # int_0^2 r^2 * r dr = 4
    assert integrate(grid, lambda r: r**2) == pytest.approx(4.0, rel=1e-5)
    assert integrate(grid, grid.nodes**2) == pytest.approx(4.0 - 0.5 * 2.0 * grid.h * 4.0, rel=1e-5)


def test_integrate_dimension_mismatch():
    grid = make_grid(1.0, 32)
    with pytest.raises(DimensionError):
        integrate(grid, np.ones(31))
    with pytest.raises(DimensionError):
        values_of(grid, Profile(values=np.ones(16), grid=make_grid(1.0, 16)))


def test_dirichlet_integral_is_exact_for_tent_with_node_at_peak():
    grid = make_grid(2.0, 511)
    tent = tent_profile(grid, TentParams(a=1.0, b=3.0))
    assert dirichlet_integral(grid, tent) == pytest.approx(2.0 * 9.0, rel=1e-12)


def test_weighted_laplacian_is_symmetric():
    grid = make_grid(5.0, 40)
    lap = np.column_stack([radial_laplacian(grid, e) for e in np.eye(grid.n)])
    weighted = grid.weights[:, None] * lap
    np.testing.assert_allclose(weighted, weighted.T, atol=1e-12)


def test_laplacian_of_r_squared():
    grid = make_grid(1.0, 50)
    out = radial_laplacian(grid, grid.nodes**2)
    np.testing.assert_allclose(out[:-1], 4.0, rtol=1e-10)


def test_laplacian_is_minus_half_gradient_of_dirichlet(rng):
    grid = make_grid(4.0, 80)
    a = np.sin(np.pi * grid.nodes / grid.R) * (1 + 0.1 * rng.normal(size=grid.n))
    v = rng.normal(size=grid.n)
    eps = 1e-6
    fd = (dirichlet_integral(grid, a + eps * v) - dirichlet_integral(grid, a - eps * v)) / (2 * eps)
    exact = -2.0 * float(grid.weights @ (radial_laplacian(grid, a) * v))
    assert fd == pytest.approx(exact, rel=1e-7)


def test_solve_tridiagonal_inverts_operator(rng):
    grid = make_grid(10.0, 100)
    shift = 1.0 / grid.nodes**2 + 2.0
    rhs = rng.normal(size=grid.n)
    x = solve_tridiagonal(grid, 0.5, shift, rhs)
    np.testing.assert_allclose(-0.5 * radial_laplacian(grid, x) + shift * x, rhs, rtol=1e-9, atol=1e-9)


def test_ddr_and_div_r2():
    grid = make_grid(1.0, 200)
    p = sample(grid, lambda r: np.sin(np.pi * r))
    np.testing.assert_allclose(ddr(grid, p).values, np.pi * np.cos(np.pi * grid.nodes), atol=1e-3)
    np.testing.assert_allclose(weighted_div_r2(grid, p).values * grid.nodes**2, p.values)


def test_spec_grid_examples():
    grid = make_grid(1.0, 99)
    np.testing.assert_allclose(grid.nodes, np.arange(1, 100) / 100.0, rtol=1e-14)
    assert integrate(make_grid(2.0, 1023), lambda r: np.ones_like(r)) == pytest.approx(2.0, abs=1e-10)
    assert integrate(make_grid(10.0, 4095), lambda r: r**2) == pytest.approx(2500.0, rel=1e-6)
    assert integrate(grid, np.zeros(99)) == 0.0


@pytest.mark.parametrize("b, power, exact", [(1.0, 2, 2.0 / 3.0), (2.0, 3, 4.0)])
def test_integrate_tent_powers(b, power, exact):
    grid = make_grid(2.0, 4096)
    tent = tent_profile(grid, TentParams(a=1.0, b=b)).values
    assert integrate(grid, tent**power) == pytest.approx(exact, rel=1e-5)


def test_quadrature_is_linear_and_positive(rng):
    grid = make_grid(3.0, 500)
    f, g = rng.random(grid.n), rng.random(grid.n)
    assert integrate(grid, f) >= 0.0
    assert integrate(grid, 2.0 * f - 3.0 * g) == pytest.approx(2.0 * integrate(grid, f) - 3.0 * integrate(grid, g), rel=1e-12)


def test_ddr_exact_for_quadratic():
    grid = make_grid(1.0, 1023)
    d = ddr(grid, sample(grid, lambda r: r * (1.0 - r)))
    assert np.max(np.abs(d.values - (1.0 - 2.0 * grid.nodes))) <= 1e-8


def test_ddr_second_order():
    errors = []
    for n in (127, 255):
        grid = make_grid(2.0, n)
        d = ddr(grid, sample(grid, lambda r: np.sin(np.pi * r / 2.0)))
        errors.append(np.max(np.abs(d.values - np.pi / 2.0 * np.cos(np.pi * grid.nodes / 2.0))))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.1)


def test_div_r2_of_r_squared_is_one():
    grid = make_grid(4.0, 64)
    np.testing.assert_allclose(weighted_div_r2(grid, grid.nodes**2).values, 1.0, rtol=1e-14)
