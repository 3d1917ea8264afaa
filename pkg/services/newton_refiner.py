"""
Damped Newton polish of candidate pairs at fixed (kappa, beta).

The unknowns are interleaved node by node, (A1_1, A2_1, A1_2, A2_2, ...), so
the Jacobian of the difference system has two sub- and two super-diagonals
and each step is a single ``solve_banded`` call.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, solve_banded

from models.grid import RadialGrid
from models.options import NewtonOptions
from models.physics import PhysicsParams, VortexPair
from models.reports import SolveReport
from services.functionals import flux_Q, residual_arrays, residual_max_arrays
from utils.errors import SingularSystemError

logger = logging.getLogger(__name__)

BANDWIDTH = 2


def _laplacian_matrix(grid: RadialGrid) -> sp.csr_matrix:
    lower, diag, upper = grid.laplacian_bands
    return sp.diags([lower[1:], diag, upper[:-1]], [-1, 0, 1], format="csr")


def jacobian_arrays(
    grid: RadialGrid, params: PhysicsParams, a1: np.ndarray, a2: np.ndarray
) -> sp.csr_matrix:
    l2 = float(params.l * params.l)
    inv_r2 = 1.0 / grid.nodes**2
    lap = _laplacian_matrix(grid)
    j11 = lap - sp.diags(l2 * inv_r2 + 2.0 * (params.kappa - a2))
    j12 = sp.diags(2.0 * a1)
    j21 = sp.diags(4.0 * a1)
    j22 = lap - sp.diags(4.0 * l2 * inv_r2 + 4.0 * params.sigma)
    return sp.bmat([[j11, j12], [j21, j22]], format="csr")


def assemble_jacobian(pair: VortexPair) -> sp.csr_matrix:
    """Jacobian of ``residual`` in block order [A1; A2] (2n x 2n)."""
    return jacobian_arrays(pair.grid, pair.params, pair.a1.values, pair.a2.values)


def interleave_order(n: int) -> np.ndarray:
    perm = np.empty(2 * n, dtype=np.intp)
    perm[0::2] = np.arange(n)
    perm[1::2] = n + np.arange(n)
    return perm


def banded_solve(jac: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve jac x = rhs after node-major reordering into a (2, 2) band."""
    m = jac.shape[0]
    perm = interleave_order(m // 2)
    permuted = sp.csr_matrix(jac)[perm][:, perm].tocoo()
    permuted.sum_duplicates()
    offset = permuted.row - permuted.col
    if np.any(np.abs(offset) > BANDWIDTH):
        raise ValueError("matrix does not fit the interleaved band")
    ab = np.zeros((2 * BANDWIDTH + 1, m))
    ab[BANDWIDTH + offset, permuted.col] = permuted.data
    try:
        x_perm = solve_banded((BANDWIDTH, BANDWIDTH), ab, rhs[perm])
    except (LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"Newton system is singular: {exc}") from exc
    if not np.all(np.isfinite(x_perm)):
        raise SingularSystemError("Newton step is not finite")
    x = np.empty_like(x_perm)
    x[perm] = x_perm
    return x


def residual_max(pair: VortexPair, params: Optional[PhysicsParams] = None) -> float:
    params = params or pair.params
    return residual_max_arrays(pair.grid, params, pair.a1.values, pair.a2.values)


def refine(
    pair: VortexPair,
    params: Optional[PhysicsParams] = None,
    opts: Optional[NewtonOptions] = None,
    forcing: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> tuple[VortexPair, SolveReport]:
    """Newton iteration on residual(pair) - forcing = 0 with step halving."""
    params = params or pair.params
    opts = opts or NewtonOptions()
    grid = pair.grid
    n = grid.n
    f1_ext, f2_ext = forcing if forcing is not None else (0.0, 0.0)

    def defect(x: np.ndarray) -> np.ndarray:
        f1, f2 = residual_arrays(grid, params, x[:n], x[n:])
        return np.concatenate((f1 - f1_ext, f2 - f2_ext))

    x = pair.stacked().copy()
    F = defect(x)
    rmax = float(np.max(np.abs(F)))
    history = [rmax]
    converged = rmax <= opts.tol
    message = "already converged" if converged else ""
    iters = 0

    while not converged and iters < opts.max_iters:
        iters += 1
        jac = jacobian_arrays(grid, params, x[:n], x[n:])
        delta = banded_solve(jac, -F)

        t = opts.damping
        accepted = False
        while t >= opts.min_damping:
            trial = x + t * delta
            F_trial = defect(trial)
            r_trial = float(np.max(np.abs(F_trial)))
            if np.isfinite(r_trial) and r_trial < rmax:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            message = f"line search failed at iteration {iters}"
            logger.warning("refine: %s (residual %.3e)", message, rmax)
            break

        x, F, rmax = trial, F_trial, r_trial
        history.append(rmax)
        logger.debug("refine iter %d: residual %.3e (damping %.3g)", iters, rmax, t)
        converged = rmax <= opts.tol

    if converged and not message:
        message = f"converged in {iters} iterations"
    elif not converged and not message:
        message = f"residual {rmax:.3e} above tol after {iters} iterations"

    refined = VortexPair.from_arrays(grid, x[:n], x[n:], params)
    q1, q2 = flux_Q(refined.a1), flux_Q(refined.a2)
    trivial = converged and (q1 + 2.0 * q2) < 1e3 * opts.tol
    if trivial:
        logger.warning("refine converged to the trivial root (0, 0)")
    else:
        logger.info("refine: %s, residual %.3e", message, rmax)

    report = SolveReport(
        method="refine",
        converged=converged,
        kappa=params.kappa,
        beta=params.beta,
        iters=iters,
        q1=q1,
        q2=q2,
        residual_max=rmax,
        residual_history=history,
        hypothesis_ok=params.hypothesis_ok(),
        trivial=trivial,
        message=message,
    )
    return refined, report
