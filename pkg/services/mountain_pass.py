"""
Mountain-pass search for saddle points of the indefinite action J.

The path runs from (0, 0) out along a ray to twice the ray maximum of J and
then back to the tent pair (A0, A0), whose action is negative, through a
connector on which J stays negative. The path maximum is therefore the ray
maximum. Each round moves the whole ray (the maximizer and its neighbours)
along the preconditioned gradient of J orthogonal to it and re-peaks on the
new ray; a move is accepted only if it lowers the ray maximum by an Armijo
amount, so the recorded path maximum decreases strictly from round to round.
Re-tensioning rebuilds the connector for the current ray and leaves the
maximum unchanged. The endpoints (0, 0) and (A0, A0) never move.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from models.grid import Profile, RadialGrid
from models.options import MpOptions
from models.physics import MpConstants, PhysicsParams, TentParams, VortexPair
from models.reports import PathRecord, QuadCheckReport, QuadCheckRow, SolveReport
from services.functionals import (
    action_J_arrays,
    flux_Q,
    grad_J_arrays,
    h_norm_sq_array,
    residual_max_arrays,
)
from services.radial_grid import integrate, make_grid, radial_laplacian, solve_tridiagonal
from utils.errors import InvalidArgumentError, PathDegenerationError, PreconditionError

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


# -----------------------------------------------------------------------------
# Separating shell
# -----------------------------------------------------------------------------

def shell_lower_bound(K: float, R: float) -> float:
    """f(K) = K/4 - sqrt(2) R^2 K^(3/2), the lower bound of J on the shell ||.||^2 = K."""
    return 0.25 * K - math.sqrt(2.0) * R * R * K**1.5


def mp_constants(R: float) -> MpConstants:
    if not R > 0:
        raise InvalidArgumentError(f"R must be positive, got {R}")
    K = 1.0 / (72.0 * R**4)
    C0 = 1.0 / (864.0 * R**4)
    assert math.isclose(shell_lower_bound(K, R), C0, rel_tol=1e-12), "K is not the maximizer of f"
    return MpConstants(K=K, C0=C0)


# -----------------------------------------------------------------------------
# Tent endpoint
# -----------------------------------------------------------------------------

def _check_tent_grid(grid: RadialGrid, t: TentParams) -> None:
    if not math.isclose(grid.R, 2.0 * t.a, rel_tol=1e-12):
        raise InvalidArgumentError(f"tent with a={t.a} needs R = 2a = {2 * t.a}, grid has R={grid.R}")


def tent_profile(grid: RadialGrid, t: TentParams) -> Profile:
    _check_tent_grid(grid, t)
    r = grid.nodes
    return Profile(values=(t.b / t.a) * np.minimum(r, 2.0 * t.a - r), grid=grid)


def tent_slope(grid: RadialGrid, t: TentParams) -> np.ndarray:
    """Exact derivative of the tent at all n+2 nodes (+b/a left of the peak, -b/a right)."""
    _check_tent_grid(grid, t)
    return np.where(grid.full_nodes <= t.a, t.b / t.a, -t.b / t.a)


def tent_integrals(t: TentParams) -> dict[str, float]:
    a, b = t.a, t.b
    return {
        "int r A0^2 dr": 2.0 / 3.0 * a * a * b * b,
        "int r A0_r^2 dr": 2.0 * b * b,
        "int A0^2/r dr": 2.0 * b * b * (2.0 * LN2 - 1.0),
        "int r A0^3 dr": 0.5 * a * a * b**3,
    }


def tent_norm_sq_closed_form(t: TentParams, l: int) -> float:
    """||(A0, A0)||_H^2 = 4 b^2 (1 + l^2 (2 ln 2 - 1)); equals 8 b^2 ln 2 for |l| = 1."""
    return 4.0 * t.b**2 * (1.0 + l * l * (2.0 * LN2 - 1.0))


def tent_J_closed_form(t: TentParams, params: PhysicsParams) -> float:
    a, b, l = t.a, t.b, params.l
    return b * b * (
        1.5
        + 3.0 * l * l * (2.0 * LN2 - 1.0)
        + 2.0 / 3.0 * (3.0 * params.kappa + params.beta) * a * a
        - 0.5 * a * a * b
    )


def quadcheck(R: float, n: int, b: float = 1.0, tolerance: float = 1e-4) -> QuadCheckReport:
    """Compare grid quadrature of the four tent integrals with their closed forms."""
    grid = make_grid(R, n)
    t = TentParams(a=R / 2.0, b=b)
    a0 = tent_profile(grid, t).values
    slope = tent_slope(grid, t)
    computed = {
        "int r A0^2 dr": integrate(grid, a0 * a0),
        "int r A0_r^2 dr": integrate(grid, slope * slope),
        "int A0^2/r dr": integrate(grid, a0 * a0 / grid.nodes**2),
        "int r A0^3 dr": integrate(grid, a0**3),
    }
    rows = []
    for name, exact in tent_integrals(t).items():
        rel = abs(computed[name] - exact) / abs(exact)
        rows.append(QuadCheckRow(name=name, computed=computed[name], closed_form=exact, rel_error=rel))
    return QuadCheckReport(
        R=R, n=n, b=b, tolerance=tolerance, rows=rows, passed=all(r.rel_error <= tolerance for r in rows)
    )


def choose_endpoint(
    params: PhysicsParams, K: float, grid: RadialGrid, b_start: float = 2.0**-6
) -> tuple[VortexPair, TentParams]:
    """Smallest b in a doubling search with ||(A0,A0)||^2 > K and J(A0,A0) < 0."""
    if not params.hypothesis_ok():
        raise PreconditionError(
            f"kappa={params.kappa}, beta={params.beta} violate kappa > max{{0, -beta/2}}"
        )
    a = params.R / 2.0
    b = b_start
    while True:
        t = TentParams(a=a, b=b)
        tent = tent_profile(grid, t).values
        norm_sq = 2.0 * h_norm_sq_array(grid, tent, params.l)
        J = action_J_arrays(grid, params, tent, tent)
        if norm_sq > K and J < 0.0:
            break
        b *= 2.0

    J_exact = tent_J_closed_form(t, params)
    if abs(J - J_exact) > 1e-2 * abs(J_exact):
        logger.warning("tent endpoint: quadrature J=%.8g vs closed form %.8g", J, J_exact)
    norm_exact = tent_norm_sq_closed_form(t, params.l)
    if abs(params.l) == 1 and abs(norm_sq - norm_exact) > 1e-2 * norm_exact:
        logger.warning("tent endpoint: quadrature norm %.8g vs 8 b^2 ln 2 = %.8g", norm_sq, norm_exact)
    elif abs(params.l) != 1:
        logger.info("tent endpoint: quadrature norm %.8g, general closed form %.8g", norm_sq, norm_exact)
    logger.info("tent endpoint: b=%g, ||.||^2=%.6g, J=%.6g", b, norm_sq, J)
    return VortexPair.from_arrays(grid, tent, tent.copy(), params), t


# -----------------------------------------------------------------------------
# Path search
# -----------------------------------------------------------------------------

MIN_STEP = 1e-12
MAX_STEP = 1.0
ARMIJO = 1e-4


class _Metric:
    """Inner product of the quadratic part of J, used to turn gradients into steps."""

    def __init__(self, grid: RadialGrid, params: PhysicsParams):
        self.grid = grid
        self.n = grid.n
        l2 = float(params.l * params.l)
        inv_r2 = 1.0 / grid.nodes**2
        self.shift1 = l2 * inv_r2 + 2.0 * params.kappa
        self.shift2 = 2.0 * l2 * inv_r2 + 2.0 * params.sigma

    def solve(self, g: np.ndarray) -> np.ndarray:
        n = self.n
        return np.concatenate(
            (
                solve_tridiagonal(self.grid, 1.0, self.shift1, g[:n]),
                solve_tridiagonal(self.grid, 0.5, self.shift2, g[n:]),
            )
        )

    def apply(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        x1, x2 = x[:n], x[n:]
        return np.concatenate(
            (
                -radial_laplacian(self.grid, x1) + self.shift1 * x1,
                -0.5 * radial_laplacian(self.grid, x2) + self.shift2 * x2,
            )
        )

    def dot(self, x: np.ndarray, y: np.ndarray) -> float:
        """<x, y>_w for stacked pairs."""
        w = self.grid.weights
        n = self.n
        return float(w @ (x[:n] * y[:n]) + w @ (x[n:] * y[n:]))

    def norm_sq(self, x: np.ndarray) -> float:
        return self.dot(self.apply(x), x)


class _Action:
    """J on stacked pairs, split along rays as J(t x) = t^2 Q(x) - t^3 C(x)."""

    def __init__(self, grid: RadialGrid, params: PhysicsParams):
        self.grid = grid
        self.params = params
        self.n = grid.n

    def __call__(self, x: np.ndarray) -> float:
        return action_J_arrays(self.grid, self.params, x[: self.n], x[self.n :])

    def grad(self, x: np.ndarray) -> np.ndarray:
        g1, g2 = grad_J_arrays(self.grid, self.params, x[: self.n], x[self.n :])
        return np.concatenate((g1, g2))

    def split(self, x: np.ndarray) -> tuple[float, float]:
        a1, a2 = x[: self.n], x[self.n :]
        cubic = float(self.grid.weights @ (a1 * a1 * a2))
        return self(x) + cubic, cubic

    def ray_peak(self, x: np.ndarray) -> Optional[tuple[np.ndarray, float]]:
        """Maximizer of J on the ray through x and its value, None if J is unbounded there."""
        quad, cubic = self.split(x)
        if not (quad > 0.0 and cubic > 0.0):
            return None
        peak = (2.0 * quad / (3.0 * cubic)) * x
        return peak, self(peak)


def _ray_intervals(path_points: int) -> int:
    return 2 * (path_points // 4)


def _ray_segment(peak: np.ndarray, path_points: int) -> np.ndarray:
    """Points 0, ..., peak, ..., 2 peak; the peak sits in the middle."""
    taus = np.linspace(0.0, 2.0, _ray_intervals(path_points) + 1)
    return taus[:, None] * peak[None, :]


def _connector(action: _Action, peak: np.ndarray, endpoint: np.ndarray, path_points: int) -> np.ndarray:
    """Path from 2 peak to the endpoint on which J stays negative.

    The connector runs out along the ray of the peak to S peak, across to
    S endpoint and back down the endpoint ray. S is large enough that every
    crossing point lies past its own ray maximum.
    """
    rest = path_points - _ray_intervals(path_points)
    out = max(1, rest // 4)
    back = max(1, rest // 4)
    across = rest - out - back

    thetas = np.arange(1, across + 1) / across
    mixes = [(1.0 - theta) * peak + theta * endpoint for theta in thetas]
    ratios = [quad / cubic for quad, cubic in map(action.split, mixes)]
    scale = max(2.0, 2.0 * max(ratios))

    legs = [tau * peak for tau in 2.0 + (scale - 2.0) * np.arange(1, out + 1) / out]
    legs += [scale * mix for mix in mixes]
    legs += [tau * endpoint for tau in scale + (1.0 - scale) * np.arange(1, back + 1) / back]
    legs[-1] = endpoint.copy()
    return np.array(legs)


def mountain_path(peak: VortexPair, endpoint: VortexPair, path_points: int = 32) -> np.ndarray:
    """Discrete path (path_points + 1 rows of stacked pairs) from (0, 0) to ``endpoint``.

    Its first half is the ray through ``peak`` sampled so that the ray maximum
    is a node; the rest is the connector back to the endpoint.
    """
    action = _Action(peak.grid, peak.params)
    found = action.ray_peak(peak.stacked())
    if found is None:
        raise InvalidArgumentError("J has no maximum on the ray through the given pair")
    crest = found[0]
    return np.vstack((_ray_segment(crest, path_points), _connector(action, crest, endpoint.stacked(), path_points)))


def _product_norm_sq(grid: RadialGrid, l: int, x: np.ndarray) -> float:
    n = grid.n
    return h_norm_sq_array(grid, x[:n], l) + h_norm_sq_array(grid, x[n:], l)


def mp_solve(
    params: PhysicsParams,
    grid: RadialGrid,
    opts: Optional[MpOptions] = None,
) -> tuple[VortexPair, SolveReport]:
    opts = opts or MpOptions()
    if not params.hypothesis_ok():
        raise PreconditionError(
            f"mountain pass needs kappa > max{{0, -beta/2}}, got kappa={params.kappa}, beta={params.beta}"
        )
    if not math.isclose(grid.R, params.R, rel_tol=1e-12):
        raise InvalidArgumentError("grid radius must equal params.R")

    n = grid.n
    m = opts.path_points
    consts = mp_constants(params.R)
    endpoint = choose_endpoint(params, consts.K, grid)[0].stacked()
    action = _Action(grid, params)
    metric = _Metric(grid, params)

    peak, level = action.ray_peak(endpoint)
    connector = _connector(action, peak, endpoint, m)
    connector_values = [action(x) for x in connector]

    step = opts.descent_step
    records: list[PathRecord] = []
    history: list[float] = []
    retensions: list[int] = []
    stall = 0
    converged = False
    message = ""
    rounds = 0
    grad_norm = math.inf

    for rounds in range(1, opts.max_rounds + 1):
        if _product_norm_sq(grid, params.l, peak) < consts.K:
            raise PathDegenerationError(
                f"path maximizer fell inside the shell ||.||^2 < K={consts.K:.3e} at round {rounds}"
            )
        values = np.concatenate(([action(x) for x in _ray_segment(peak, m)], connector_values))
        top = int(np.argmax(values))
        g = action.grad(peak)
        grad_norm = float(np.max(np.abs(g)))
        history.append(float(values[top]))
        records.append(PathRecord(round=rounds, max_J=float(values[top]), argmax_t=top / m, grad_norm=grad_norm))
        if values[top] < consts.C0 - 1e-9:
            logger.warning("mountain pass: path maximum %.3e dropped below C0=%.3e", values[top], consts.C0)
        if grad_norm <= opts.crit_tol:
            converged = True
            break

        # descend along the part of P^{-1} grad J orthogonal to the ray, then re-peak
        d = metric.solve(g)
        d -= (metric.dot(g, peak) / metric.norm_sq(peak)) * peak
        slope = metric.dot(g, d)
        accepted = None
        while step >= MIN_STEP:
            candidate = action.ray_peak(np.abs(peak - step * d))
            target = min(level - ARMIJO * step * slope, np.nextafter(level, -np.inf))
            if candidate is not None and candidate[1] <= target:
                accepted = candidate
                break
            step *= 0.5
        if accepted is None:
            message = f"descent stalled at round {rounds} with |grad J|={grad_norm:.3e}"
            logger.warning("mountain pass: %s", message)
            break

        drop = level - accepted[1]
        peak, level = accepted
        step = min(2.0 * step, MAX_STEP)
        stall = stall + 1 if drop <= 1e-14 * max(1.0, abs(level)) else 0
        if stall >= opts.deform_iters:
            message = f"path maximum stagnated for {stall} rounds"
            break

        if rounds % opts.retension_every == 0:
            rebuilt = _connector(action, peak, endpoint, m)
            rebuilt_values = [action(x) for x in rebuilt]
            if max(rebuilt_values) < level:
                connector, connector_values = rebuilt, rebuilt_values
                retensions.append(rounds)
            else:
                logger.warning("mountain pass: re-tension at round %d would raise the path maximum", rounds)
        if rounds % 100 == 0:
            logger.debug("mountain pass round %d: max J=%.10g, |grad J|=%.3e, step %.3g", rounds, level, grad_norm, step)

    pair = VortexPair.from_arrays(grid, peak[:n], peak[n:], params)
    grad_norm = float(np.max(np.abs(action.grad(peak))))
    nontrivial = pair.a1.max_abs() > 10 * opts.crit_tol and pair.a2.max_abs() > 10 * opts.crit_tol
    if converged and not nontrivial:
        converged = False
        message = "maximizer is semi-trivial"
    if converged:
        message = f"converged in {rounds} rounds"
    elif not message:
        message = f"max_rounds reached with |grad J|={grad_norm:.3e}"
    logger.info("mountain pass: %s, J=%.10g", message, level)

    report = SolveReport(
        method="mpass",
        converged=converged,
        kappa=params.kappa,
        beta=params.beta,
        iters=rounds,
        J_value=level,
        q1=flux_Q(pair.a1),
        q2=flux_Q(pair.a2),
        grad_norm=grad_norm,
        residual_max=residual_max_arrays(grid, params, peak[:n], peak[n:]),
        path_max_history=history,
        path_records=records,
        retension_rounds=retensions,
        hypothesis_ok=True,
        message=message,
    )
    return pair, report
