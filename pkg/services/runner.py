"""
Reproducible runs driven by a RunConfig: one solver mode per run, artifacts
written to ``config.output_dir``.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from models.config import RunConfig
from models.grid import RadialGrid
from models.physics import FluxTargets, PhysicsParams, VortexPair
from models.reports import RunReport, SolveReport, SweepRow
from services.constrained_minimizer import check_flux_window, minimize
from services.functionals import action_I, action_J, evaluate_all
from services.mountain_pass import mp_solve, quadcheck
from services.newton_refiner import refine
from services.radial_grid import make_grid
from services.verify import verify_all
from utils.errors import ConfigError, PreconditionError, SolverFailureError
from utils.io import read_pair_csv, write_json, write_pair_csv, write_rows_csv

logger = logging.getLogger(__name__)

threads = int(os.environ.get("VORTEXFORGE_THREADS", 1))

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2

PATH_HISTORY_COLUMNS = ("round", "max_J", "argmax_t", "grad_norm", "retension")


# -----------------------------------------------------------------------------
# Seeds
# -----------------------------------------------------------------------------

def _load_seed(config: RunConfig, params: PhysicsParams) -> VortexPair:
    pair = read_pair_csv(config.seed_file, params)
    if pair.grid.n != config.n:
        logger.info("seed file grid has n=%d, config says n=%d; using the file's grid", pair.grid.n, config.n)
    return pair


def random_seed(config: RunConfig, grid: RadialGrid) -> VortexPair:
    """Strictly positive random pair vanishing at r=R, reproducible from rng_seed."""
    rng = np.random.default_rng(config.rng_seed)
    envelope = np.sin(np.pi * grid.nodes / grid.R)
    a1 = envelope * rng.uniform(0.5, 1.5, grid.n)
    a2 = envelope * rng.uniform(0.5, 1.5, grid.n)
    return VortexPair.from_arrays(grid, a1, a2, PhysicsParams(l=config.l, R=grid.R))


def _minimize_seed(config: RunConfig, grid: RadialGrid) -> Optional[VortexPair]:
    if config.seed_file is not None:
        return _load_seed(config, PhysicsParams(l=config.l, R=config.R))
    if config.seed_kind == "random":
        return random_seed(config, grid)
    return None


# -----------------------------------------------------------------------------
# Single modes
# -----------------------------------------------------------------------------

def _finish(report: RunReport, pair: VortexPair, out: Path, targets: Optional[FluxTargets] = None) -> RunReport:
    report.verify = verify_all(pair, targets=targets)
    report.functionals = evaluate_all(pair)
    write_pair_csv(out / "profile.csv", pair)
    return report


def _polish(pair: VortexPair, config: RunConfig) -> tuple[VortexPair, SolveReport]:
    polished, polish = refine(pair, opts=config.newton_options())
    if polish.converged and not polish.trivial:
        return polished, polish
    logger.warning("polish did not reach a nontrivial root: %s", polish.message)
    return pair, polish


def _run_minimize(config: RunConfig, out: Path) -> RunReport:
    targets = config.flux_targets()
    ok, why = check_flux_window(targets, config.l)
    if not ok:
        raise PreconditionError(f"flux window violated: {why}")
    grid = make_grid(config.R, config.n)
    pair, solve = minimize(grid, config.l, targets, config.minimize_options(), seed=_minimize_seed(config, grid))
    report = RunReport(mode="minimize", solve=solve)
    if solve.converged:
        pair, report.polish = _polish(pair, config)
    good = solve.converged and report.polish is not None and report.polish.converged
    report = _finish(report, pair, out, targets=None if good else targets)
    report.exit_code = EXIT_OK if good else EXIT_NOT_CONVERGED
    return report


def _run_mpass(config: RunConfig, out: Path) -> RunReport:
    params = config.physics_params()
    grid = make_grid(config.R, config.n)
    pair, solve = mp_solve(params, grid, config.mp_options())
    report = RunReport(mode="mpass", solve=solve)
    pair, report.polish = _polish(pair, config)
    rows = [
        (rec.round, rec.max_J, rec.argmax_t, rec.grad_norm, rec.round in solve.retension_rounds)
        for rec in solve.path_records
    ]
    write_rows_csv(out / "path_history.csv", PATH_HISTORY_COLUMNS, rows)
    report = _finish(report, pair, out)
    good = report.polish.converged and not report.polish.trivial
    report.exit_code = EXIT_OK if good else EXIT_NOT_CONVERGED
    return report


def _run_refine(config: RunConfig, out: Path) -> RunReport:
    pair = _load_seed(config, config.physics_params())
    refined, polish = refine(pair, opts=config.newton_options())
    report = _finish(RunReport(mode="refine", polish=polish), refined, out)
    report.exit_code = EXIT_OK if polish.converged else EXIT_NOT_CONVERGED
    return report


def _run_verify(config: RunConfig, out: Path) -> RunReport:
    pair = _load_seed(config, config.physics_params())
    targets = config.flux_targets() if config.q1 is not None and config.q2 is not None else None
    return _finish(RunReport(mode="verify"), pair, out, targets=targets)


def _run_quadcheck(config: RunConfig, out: Path) -> RunReport:
    result = quadcheck(config.R, config.n, b=config.quad_b)
    for row in result.rows:
        logger.info("quadcheck %-18s computed=%.12g exact=%.12g rel=%.2e", row.name, row.computed, row.closed_form, row.rel_error)
    return RunReport(mode="quadcheck", quadcheck=result, exit_code=EXIT_OK if result.passed else EXIT_NOT_CONVERGED)


_MODES = {
    "minimize": _run_minimize,
    "mpass": _run_mpass,
    "refine": _run_refine,
    "verify": _run_verify,
    "quadcheck": _run_quadcheck,
}


def execute(config: RunConfig) -> RunReport:
    """Run one mode, write its artifacts and return the report.

    Invalid configurations and unmet preconditions raise; non-convergence is
    reported through ``exit_code``.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config.mode == "sweep":
        rows = sweep(config)
        code = EXIT_OK if all(r.status == "ok" for r in rows) else EXIT_NOT_CONVERGED
        return RunReport(mode="sweep", exit_code=code)
    report = _MODES[config.mode](config, out)
    write_json(out / "report.json", report)
    logger.info("%s run finished with exit code %d in %s", config.mode, report.exit_code, out)
    return report


def run(config: RunConfig) -> int:
    return execute(config).exit_code


# -----------------------------------------------------------------------------
# Sweep
# -----------------------------------------------------------------------------

def _step_config(config: RunConfig, value: float, out: Path) -> RunConfig:
    update = {config.sweep_param: int(value) if config.sweep_param == "l" else value}
    update.update(mode=config.sweep_solver, output_dir=str(out))
    try:
        return RunConfig(**{**config.model_dump(), **update})
    except ValueError as exc:
        raise ConfigError(f"sweep step {config.sweep_param}={value}: {exc}") from exc


def _solve_step(step: RunConfig, warm: Optional[VortexPair]) -> tuple[VortexPair, float]:
    grid = make_grid(step.R, step.n)
    if step.mode == "minimize":
        seed = warm.with_params(l=step.l) if warm is not None else None
        pair, solve = minimize(grid, step.l, step.flux_targets(), step.minimize_options(), seed=seed)
        if not solve.converged:
            raise SolverFailureError(solve.message)
        pair, _ = _polish(pair, step)
        return pair, action_I(pair)

    params = step.physics_params()
    if warm is not None:
        pair, polish = refine(warm.with_params(**params.model_dump(exclude={"R"})), opts=step.newton_options())
        if polish.converged and not polish.trivial:
            return pair, action_J(pair)
        logger.info("sweep: warm start failed at %s (%s); starting cold", params, polish.message)
    pair, _ = mp_solve(params, grid, step.mp_options())
    pair, polish = _polish(pair, step)
    if not polish.converged:
        raise SolverFailureError(polish.message)
    return pair, action_J(pair)


def _sweep_step(config: RunConfig, index: int, value: float, warm: Optional[VortexPair]) -> tuple[SweepRow, Optional[VortexPair]]:
    out = Path(config.output_dir) / f"step_{index:03d}"
    out.mkdir(parents=True, exist_ok=True)
    try:
        step = _step_config(config, value, out)
        pair, value_of_action = _solve_step(step, warm)
    except (SolverFailureError, PreconditionError, ConfigError) as exc:
        logger.warning("sweep step %d (%s=%g) failed: %s", index, config.sweep_param, value, exc)
        return SweepRow(step_value=value, status=f"failed: {exc}"), None

    report = _finish(RunReport(mode=step.mode), pair, out)
    write_json(out / "report.json", report)
    v = report.verify
    row = SweepRow(
        step_value=value,
        action=value_of_action,
        kappa=pair.params.kappa,
        beta=pair.params.beta,
        m1=v.m1,
        m2=v.m2,
        decay_rate_a1=v.decay_rate_a1,
        decay_rate_a2=v.decay_rate_a2,
        all_pass=v.all_pass,
    )
    return row, pair


def sweep(config: RunConfig) -> list[SweepRow]:
    values = config.sweep_values()
    if len(values) < 2:
        raise ConfigError("sweep range must be monotone with at least two steps")
    Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    logger.info("sweep over %s: %d steps (%s)", config.sweep_param, len(values), "cold" if config.sweep_cold else "warm")

    if config.sweep_cold:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            futures = [pool.submit(_sweep_step, config, i, v, None) for i, v in enumerate(values)]
            rows = [f.result()[0] for f in futures]
    else:
        rows = []
        warm: Optional[VortexPair] = None
        for i, v in enumerate(values):
            row, warm = _sweep_step(config, i, v, warm)
            rows.append(row)

    write_rows_csv(
        Path(config.output_dir) / "sweep_summary.csv",
        SweepRow.columns(),
        ([getattr(r, c) for c in SweepRow.columns()] for r in rows),
    )
    return rows
