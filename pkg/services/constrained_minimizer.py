"""
Minimization of the action I on the two flux spheres Q(A1) = Q1, Q(A2) = Q2.

Each iteration moves along the preconditioned gradient of I restricted to
the tangent space of the flux spheres, replaces the iterate by its nodewise
absolute value (I does not increase under A -> |A| and Q is even), then
rescales each component back onto its flux sphere. The step passes an Armijo
test, grows after every accepted move and is capped at the natural step 1
of the preconditioned flow. At exit the Lagrange
multipliers kappa, beta are read off by pairing grad I with the solution.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from models.grid import Profile, RadialGrid
from models.options import MinimizeOptions
from models.physics import FluxTargets, PhysicsParams, TentParams, VortexPair
from models.reports import SolveReport
from services.functionals import (
    TWO_PI,
    action_I_arrays,
    flux_Q,
    grad_I_arrays,
    inner,
    residual_max_arrays,
)
from services.mountain_pass import tent_profile
from services.radial_grid import dirichlet_integral, integrate, solve_tridiagonal
from utils.errors import (
    DegenerateProjectionError,
    InvalidArgumentError,
    PreconditionError,
    SolverFailureError,
    UndefinedMultiplierError,
)

logger = logging.getLogger(__name__)

MIN_STEP = 1e-14
ARMIJO = 1e-4
# accepted steps may raise I by at most this relative amount (quadrature roundoff)
ROUNDOFF = 64.0 * np.finfo(np.float64).eps


def check_flux_window(targets: FluxTargets, l: int) -> tuple[bool, str]:
    """Whether 0 < q1 < 2 pi |l| and q2 > 0; the message names the failed bound."""
    limit = TWO_PI * abs(l)
    if not targets.q1 > 0:
        return False, f"Q1={targets.q1} must be positive"
    if not targets.q1 < limit:
        return False, f"Q1={targets.q1:.6g} must lie below 2*pi*|l| = {limit:.6g}"
    if not targets.q2 > 0:
        return False, f"Q2={targets.q2} must be positive"
    return True, "flux window satisfied"


def eps_window(targets: FluxTargets, l: int) -> tuple[float, float]:
    """Open interval of epsilon for which both coercivity constants are positive."""
    return targets.q1**2 / (4.0 * math.pi**2 * l * l), 1.0


def coercivity_constants(targets: FluxTargets, l: int, eps: float) -> tuple[float, float]:
    lo, hi = eps_window(targets, l)
    if not (lo < eps < hi):
        raise InvalidArgumentError(f"eps={eps} outside the admissible window ({lo:.6g}, {hi})")
    c1 = 0.5 * (1.0 - eps)
    c2 = 0.5 * (l * l - targets.q1**2 / (4.0 * math.pi**2 * eps))
    return c1, c2


def _coercive_bound_arrays(
    grid: RadialGrid, l: int, a1: np.ndarray, a2: np.ndarray, targets: FluxTargets, eps: float
) -> float:
    c1, c2 = coercivity_constants(targets, l, eps)
    inv_r2 = 1.0 / grid.nodes**2
    return (
        c1 * dirichlet_integral(grid, a1)
        + c2 * integrate(grid, a1 * a1 * inv_r2)
        + 0.25 * dirichlet_integral(grid, a2)
        + 2.0 * l * l * integrate(grid, a2 * a2 * inv_r2)
        - targets.q2 / TWO_PI
    )


def coercive_lower_bound(pair: VortexPair, targets: FluxTargets, eps: float) -> float:
    """Lower bound on I(pair) valid on the flux spheres for eps inside ``eps_window``."""
    return _coercive_bound_arrays(pair.grid, pair.params.l, pair.a1.values, pair.a2.values, targets, eps)


def _project_array(grid: RadialGrid, a: np.ndarray, q_target: float) -> np.ndarray:
    q = TWO_PI * inner(grid, a, a)
    if not q > 0.0:
        raise DegenerateProjectionError("cannot scale the zero profile onto a flux sphere")
    return a * math.sqrt(q_target / q)


def project_flux(A: Profile, q_target: float) -> Profile:
    return Profile(values=_project_array(A.grid, A.values, q_target), grid=A.grid)


def default_seed(grid: RadialGrid, l: int, targets: FluxTargets) -> VortexPair:
    tent = tent_profile(grid, TentParams(a=grid.R / 2.0, b=1.0))
    return VortexPair(
        a1=project_flux(tent, targets.q1),
        a2=project_flux(tent, targets.q2),
        params=PhysicsParams(l=l, R=grid.R),
    )


def extract_multipliers(pair: VortexPair) -> tuple[float, float]:
    """kappa, beta making grad J orthogonal to both components.

    kappa = -<grad_I_1, A1> / (2 int A1^2 r dr)
    2 kappa + beta = -<grad_I_2, A2> / (2 int A2^2 r dr)
    """
    grid = pair.grid
    a1, a2 = pair.a1.values, pair.a2.values
    m1, m2 = inner(grid, a1, a1), inner(grid, a2, a2)
    if m1 <= 0.0 or m2 <= 0.0:
        raise UndefinedMultiplierError("multipliers are undefined when a component has zero flux")
    g1, g2 = grad_I_arrays(grid, pair.params.l, a1, a2)
    kappa = -inner(grid, g1, a1) / (2.0 * m1)
    sigma = -inner(grid, g2, a2) / (2.0 * m2)
    return kappa, sigma - 2.0 * kappa


def _tangential_norm(grid: RadialGrid, g1, g2, a1, a2) -> float:
    t1 = g1 - (inner(grid, g1, a1) / inner(grid, a1, a1)) * a1
    t2 = g2 - (inner(grid, g2, a2) / inner(grid, a2, a2)) * a2
    return math.sqrt(inner(grid, t1, t1) + inner(grid, t2, t2))


def _tangent_direction(grid: RadialGrid, scale: float, shift: np.ndarray, g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """P^{-1} g corrected by a multiple of P^{-1} a so that <d, a> = 0.

    With P self-adjoint and positive this is the P-gradient of I restricted to
    the tangent space of the flux sphere through ``a``, and <g, d> >= 0.
    """
    pg = solve_tridiagonal(grid, scale, shift, g)
    pa = solve_tridiagonal(grid, scale, shift, a)
    return pg - (inner(grid, pg, a) / inner(grid, pa, a)) * pa


def minimize(
    grid: RadialGrid,
    l: int,
    targets: FluxTargets,
    opts: Optional[MinimizeOptions] = None,
    seed: Optional[VortexPair] = None,
) -> tuple[VortexPair, SolveReport]:
    """Projected gradient flow for min I on the flux spheres.

    The preconditioner is the quadratic part of J at the current multiplier
    estimates, with negative estimates floored at zero so that it stays
    positive. Every accepted iterate is checked against the coercive lower
    bound at the middle of the admissible epsilon window.
    """
    opts = opts or MinimizeOptions()
    ok, why = check_flux_window(targets, l)
    if not ok:
        raise PreconditionError(why)

    seed = seed or default_seed(grid, l, targets)
    try:
        a1 = _project_array(grid, np.abs(seed.a1.values) if opts.enforce_nonneg else seed.a1.values, targets.q1)
        a2 = _project_array(grid, np.abs(seed.a2.values) if opts.enforce_nonneg else seed.a2.values, targets.q2)
    except DegenerateProjectionError as exc:
        raise PreconditionError("seed must have two nonzero components") from exc

    l2 = float(l * l)
    base1 = l2 / grid.nodes**2
    base2 = 2.0 * l2 / grid.nodes**2
    eps = 0.5 * sum(eps_window(targets, l))
    unconstrained = PhysicsParams(l=l, R=grid.R)

    def bound_gap(x1: np.ndarray, x2: np.ndarray, value: float) -> float:
        return value - _coercive_bound_arrays(grid, l, x1, x2, targets, eps)

    value = action_I_arrays(grid, l, a1, a2)
    min_gap = bound_gap(a1, a2, value)
    violations = int(min_gap < 0.0)
    step = opts.step
    converged = False
    proj_norm = math.inf
    iters = 0
    message = ""

    for iters in range(1, opts.max_iters + 1):
        g1, g2 = grad_I_arrays(grid, l, a1, a2)
        proj_norm = _tangential_norm(grid, g1, g2, a1, a2)
        if proj_norm <= opts.grad_tol:
            converged = True
            iters -= 1
            break

        m1, m2 = inner(grid, a1, a1), inner(grid, a2, a2)
        kappa_est = -inner(grid, g1, a1) / (2.0 * m1)
        sigma_est = -inner(grid, g2, a2) / (2.0 * m2)
        d1 = _tangent_direction(grid, 1.0, base1 + 2.0 * max(kappa_est, 0.0), g1, a1)
        d2 = _tangent_direction(grid, 0.5, base2 + 2.0 * max(sigma_est, 0.0), g2, a2)
        slope = inner(grid, g1, d1) + inner(grid, g2, d2)

        while True:
            t1 = a1 - step * d1
            t2 = a2 - step * d2
            if opts.enforce_nonneg:
                t1, t2 = np.abs(t1), np.abs(t2)
            try:
                t1 = _project_array(grid, t1, targets.q1)
                t2 = _project_array(grid, t2, targets.q2)
            except DegenerateProjectionError as exc:
                raise SolverFailureError(f"component collapsed to zero at iteration {iters}") from exc
            trial = action_I_arrays(grid, l, t1, t2)
            if trial <= value - ARMIJO * step * slope + ROUNDOFF * max(1.0, abs(value)):
                break
            step *= 0.5
            if step < MIN_STEP:
                break

        if step < MIN_STEP:
            message = f"step underflow at iteration {iters}"
            logger.warning("minimize: %s (projected gradient %.3e)", message, proj_norm)
            break

        a1, a2, value = t1, t2, trial
        gap = bound_gap(a1, a2, value)
        if gap < 0.0:
            violations += 1
            logger.warning("minimize iter %d: I=%.12g below the coercive bound by %.3e", iters, value, -gap)
        min_gap = min(min_gap, gap)
        step = min(step * 1.5, opts.max_step)
        if iters % 500 == 0:
            logger.debug("minimize iter %d: I=%.12g, projected gradient %.3e, step %.3g", iters, value, proj_norm, step)

    if converged:
        message = f"converged in {iters} iterations"
    elif not message:
        message = f"max_iters reached with projected gradient {proj_norm:.3e}"

    pair = VortexPair.from_arrays(grid, a1, a2, unconstrained)
    kappa, beta = extract_multipliers(pair)
    pair = pair.with_params(kappa=kappa, beta=beta)

    suspect = converged and (np.min(a1) <= 0.0 or np.min(a2) <= 0.0)
    if suspect:
        logger.warning("minimize: converged pair is not strictly positive at interior nodes")
    if not pair.params.hypothesis_ok():
        logger.warning("minimize: extracted kappa=%.6g, beta=%.6g violate kappa > max{0, -beta/2}", kappa, beta)
    logger.info("minimize: %s, I=%.12g, kappa=%.8g, beta=%.8g", message, value, kappa, beta)

    report = SolveReport(
        method="minimize",
        converged=converged,
        kappa=kappa,
        beta=beta,
        iters=iters,
        final_I=value,
        q1=flux_Q(pair.a1),
        q2=flux_Q(pair.a2),
        proj_grad_norm=proj_norm,
        residual_max=residual_max_arrays(grid, pair.params, a1, a2),
        bound_violations=violations,
        min_bound_gap=min_gap,
        hypothesis_ok=pair.params.hypothesis_ok(),
        suspect=bool(suspect),
        message=message,
    )
    return pair, report
