"""
Structural checks on a computed pair: positivity of the second harmonic,
absence of semi-trivial solutions, the max-amplitude sandwich and the
exponential tail decay.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from models.physics import FluxTargets, PhysicsParams, VortexPair
from models.reports import DecayFit, Triviality, VerifyReport
from services.functionals import flux_Q, residual_max_arrays
from utils.errors import FitUndefinedError

logger = logging.getLogger(__name__)

DECAY_SLACK = 0.2
SANDWICH_MARGIN = 1e-10
TRIVIALITY_TOL = 1e-7
FLUX_RTOL = 1e-8


def check_positivity_a2(pair: VortexPair) -> bool:
    return bool(np.all(pair.a2.values > 0.0))


def classify_triviality(pair: VortexPair, tol: float = TRIVIALITY_TOL) -> Triviality:
    a1_on = pair.a1.max_abs() > tol
    a2_on = pair.a2.max_abs() > tol
    if a1_on and a2_on:
        return Triviality.fully_nontrivial
    if a2_on:
        return Triviality.a1_zero
    if a1_on:
        return Triviality.a2_zero
    return Triviality.trivial


def sandwich_bounds(m1: float, params: PhysicsParams) -> tuple[float, float]:
    l2, R2 = float(params.l * params.l), params.R**2
    lo = l2 / (2.0 * R2) + params.kappa
    hi = m1 * m1 / (2.0 * l2 / R2 + 2.0 * params.sigma)
    return lo, hi


def check_sandwich(pair: VortexPair, params: Optional[PhysicsParams] = None) -> tuple[bool, float, float]:
    """Whether lo < M2 < hi, both strictly with margin SANDWICH_MARGIN."""
    params = params or pair.params
    m1, m2 = pair.a1.max_abs(), pair.a2.max_abs()
    lo, hi = sandwich_bounds(m1, params)
    ok = (m2 - lo > SANDWICH_MARGIN) and (hi - m2 > SANDWICH_MARGIN)
    return ok, lo, hi


def _tail_fit(r: np.ndarray, a: np.ndarray, name: str) -> tuple[float, float]:
    if not np.all(a > 0.0):
        raise FitUndefinedError(f"{name} is not strictly positive in the tail window")
    slope, intercept = np.polyfit(r, np.log(a * a), 1)
    return -float(slope), math.exp(float(intercept))


def fit_decay(
    pair: VortexPair,
    params: Optional[PhysicsParams] = None,
    window: float = 0.25,
    cutoff: float = 0.05,
) -> DecayFit:
    """Least-squares slopes of log A_m^2 over the tail window.

    The window is the last ``window`` fraction of (0, R) minus the outermost
    ``cutoff`` fraction of nodes, where the hard zero at r=R bends the tail.
    """
    params = params or pair.params
    grid = pair.grid
    if not (0.0 < cutoff < window < 1.0):
        raise ValueError("need 0 < cutoff < window < 1")
    n = grid.n
    lo = int(math.floor((1.0 - window) * n))
    hi = int(math.ceil((1.0 - cutoff) * n))
    if hi - lo < 2:
        raise FitUndefinedError("tail window holds fewer than two nodes")
    r = grid.nodes[lo:hi]
    rate1, c1 = _tail_fit(r, pair.a1.values[lo:hi], "A1")
    rate2, c2 = _tail_fit(r, pair.a2.values[lo:hi], "A2")
    return DecayFit(rate1=rate1, rate2=rate2, c1=c1, c2=c2, r_lo=float(r[0]), r_hi=float(r[-1]))


def verify_all(
    pair: VortexPair,
    params: Optional[PhysicsParams] = None,
    targets: Optional[FluxTargets] = None,
) -> VerifyReport:
    params = params or pair.params
    grid = pair.grid
    notes: list[str] = []

    hypothesis = params.hypothesis_ok()
    if not hypothesis:
        notes.append(f"kappa={params.kappa:.6g}, beta={params.beta:.6g} violate kappa > max{{0, -beta/2}}")

    residual = residual_max_arrays(grid, params, pair.a1.values, pair.a2.values)
    positive = check_positivity_a2(pair)
    triviality = classify_triviality(pair)
    m1, m2 = pair.a1.max_abs(), pair.a2.max_abs()
    sandwich_ok, lo, hi = check_sandwich(pair, params)
    consistent = hi > lo
    if not consistent:
        notes.append("M1^2 too small for any M2 to fit between the sandwich bounds")

    rate1 = rate2 = None
    bound1 = bound2 = bound2_doubled = None
    ok1 = ok2 = ok2_doubled = False
    if params.kappa > 0:
        bound1 = math.sqrt(2.0 * params.kappa)
    if params.sigma > 0:
        bound2 = math.sqrt(params.sigma)
        bound2_doubled = 2.0 * bound2
    try:
        fit = fit_decay(pair, params)
        rate1, rate2 = fit.rate1, fit.rate2
        if bound1 is not None:
            ok1 = rate1 >= (1.0 - DECAY_SLACK) * bound1
        if bound2 is not None:
            ok2 = rate2 >= (1.0 - DECAY_SLACK) * bound2
            ok2_doubled = rate2 >= (1.0 - DECAY_SLACK) * bound2_doubled
    except FitUndefinedError as exc:
        notes.append(f"decay fit undefined: {exc}")

    q1, q2 = flux_Q(pair.a1), flux_Q(pair.a2)
    flux_ok = None
    if targets is not None:
        flux_ok = math.isclose(q1, targets.q1, rel_tol=FLUX_RTOL) and math.isclose(q2, targets.q2, rel_tol=FLUX_RTOL)
        if not flux_ok:
            notes.append(f"fluxes ({q1:.10g}, {q2:.10g}) miss targets ({targets.q1:.10g}, {targets.q2:.10g})")

    all_pass = (
        hypothesis
        and positive
        and triviality is Triviality.fully_nontrivial
        and sandwich_ok
        and ok1
        and ok2
        and flux_ok is not False
    )
    if not all_pass:
        logger.info("verify: checks failed (%s)", "; ".join(notes) or "see report")

    return VerifyReport(
        hypothesis_ok=hypothesis,
        residual_max=residual,
        positive_a2=positive,
        semi_trivial=triviality,
        m1=m1,
        m2=m2,
        sandwich_lo=lo,
        sandwich_hi=hi,
        sandwich_ok=sandwich_ok,
        sandwich_consistent=consistent,
        decay_rate_a1=rate1,
        decay_rate_a2=rate2,
        decay_bound_a1=bound1,
        decay_bound_a2=bound2,
        decay_bound_a2_doubled=bound2_doubled,
        decay_ok_a1=ok1,
        decay_ok_a2=ok2,
        decay_ok_a2_doubled=ok2_doubled,
        flux_q1=q1,
        flux_q2=q2,
        flux_ok=flux_ok,
        all_pass=all_pass,
        notes=notes,
    )
