from __future__ import annotations

import sys
from typing import Optional

import click
from pydantic import ValidationError

from models.reports import RunReport
from services import runner
from utils.config_file import load_config
from utils.errors import ConfigError, PreconditionError, SolverFailureError, VortexForgeError
from utils.log import configure_logging

MODES = ["minimize", "mpass", "refine", "verify", "sweep", "quadcheck"]


def _print_verify_table(report: RunReport) -> None:
    v = report.verify
    rows = [
        ("hypothesis kappa > max{0,-beta/2}", v.hypothesis_ok),
        ("A2 > 0 at interior nodes", v.positive_a2),
        ("fully nontrivial", v.semi_trivial.value == "fully_nontrivial"),
        (f"sandwich {v.sandwich_lo:.6g} < M2={v.m2:.6g} < {v.sandwich_hi:.6g}", v.sandwich_ok),
        (f"A1^2 decay {v.decay_rate_a1} vs sqrt(2k)={v.decay_bound_a1}", v.decay_ok_a1),
        (f"A2^2 decay {v.decay_rate_a2} vs sqrt(2k+b)={v.decay_bound_a2}", v.decay_ok_a2),
        (f"A2^2 decay {v.decay_rate_a2} vs 2 sqrt(2k+b)={v.decay_bound_a2_doubled} (not gating)", v.decay_ok_a2_doubled),
    ]
    if v.flux_ok is not None:
        rows.append((f"fluxes ({v.flux_q1:.10g}, {v.flux_q2:.10g})", v.flux_ok))
    for label, ok in rows:
        click.echo(f"{'PASS' if ok else 'FAIL'}  {label}")
    click.echo(f"{'PASS' if v.all_pass else 'FAIL'}  all")


def _print_quadcheck(report: RunReport) -> None:
    q = report.quadcheck
    click.echo(f"{'integral':<18} {'computed':>22} {'closed form':>22} {'rel error':>10}")
    for row in q.rows:
        click.echo(f"{row.name:<18} {row.computed:>22.15g} {row.closed_form:>22.15g} {row.rel_error:>10.2e}")
    click.echo(f"{'PASS' if q.passed else 'FAIL'} (tolerance {q.tolerance:g})")


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="key=value run configuration.")
@click.option("--mode", type=click.Choice(MODES), help="Overrides the mode in the config file.")
@click.option("--out", "output_dir", type=click.Path(file_okay=False), help="Overrides output_dir.")
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
@click.option("--set", "assignments", multiple=True, metavar="KEY=VALUE", help="Extra config entries.")
def main(
    config_path: Optional[str],
    mode: Optional[str],
    output_dir: Optional[str],
    log_level: Optional[str],
    assignments: tuple[str, ...],
) -> None:
    """Compute and check l-vortex soliton pairs in quadratic media."""
    configure_logging(log_level)
    overrides = {"mode": mode, "output_dir": output_dir}
    try:
        for item in assignments:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            overrides[key.strip()] = value.strip()
        config = load_config(config_path, overrides)
        report = runner.execute(config)
    except (ConfigError, PreconditionError, ValidationError, OSError) as exc:
        click.echo(f"error: {exc}".splitlines()[0], err=True)
        sys.exit(runner.EXIT_INVALID)
    except SolverFailureError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(runner.EXIT_NOT_CONVERGED)
    except VortexForgeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(runner.EXIT_INVALID)

    if report.verify is not None and config.mode == "verify":
        _print_verify_table(report)
    if report.quadcheck is not None:
        _print_quadcheck(report)
    sys.exit(report.exit_code)


if __name__ == "__main__":
    main()
