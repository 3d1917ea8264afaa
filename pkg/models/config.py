from __future__ import annotations

import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .options import MinimizeOptions, MpOptions, NewtonOptions
from .physics import FluxTargets, PhysicsParams

Mode = Literal["minimize", "mpass", "refine", "verify", "sweep", "quadcheck"]


class RunConfig(BaseModel):
    """One reproducible run, as read from a key=value config file."""

    mode: Mode = Field(..., json_schema_extra={"example": "minimize"})
    kappa: Optional[float] = Field(None, description="Prescribed kappa (mpass, refine, verify).")
    beta: Optional[float] = Field(None, description="Prescribed beta (mpass, refine, verify).")
    l: int = Field(1, description="Vortex number.")
    R: float = Field(10.0, gt=0, description="Domain radius.")
    n: int = Field(1024, ge=8, description="Interior node count.")
    q1: Optional[float] = Field(None, description="Target Q(A1) for minimize.")
    q2: Optional[float] = Field(None, description="Target Q(A2) for minimize.")
    output_dir: str = Field("out", description="Directory receiving profile.csv, report.json, ...")
    seed_file: Optional[str] = Field(None, description="CSV pair (r,a1,a2) used as start or subject.")
    rng_seed: int = Field(0, description="Seed of the random initial pair when seed_kind=random.")
    seed_kind: Literal["tent", "random"] = "tent"

    step: float = Field(0.5, gt=0)
    max_iters: int = Field(20000, gt=0)
    grad_tol: float = Field(1e-7, gt=0)
    enforce_nonneg: bool = True

    path_points: int = Field(32, ge=16)
    deform_iters: int = Field(200, gt=0)
    descent_step: float = Field(0.5, gt=0)
    crit_tol: float = Field(1e-3, gt=0)
    max_rounds: int = Field(5000, gt=0)
    retension_every: int = Field(10, gt=0)

    newton_tol: float = Field(1e-10, gt=0)
    newton_max_iters: int = Field(50, gt=0)
    damping: float = Field(1.0, gt=0, le=1.0)

    sweep_param: Optional[Literal["kappa", "beta", "l", "q1", "q2"]] = None
    sweep_start: Optional[float] = None
    sweep_stop: Optional[float] = None
    sweep_step: Optional[float] = None
    sweep_solver: Literal["mpass", "minimize"] = "mpass"
    sweep_cold: bool = False

    quad_b: float = Field(1.0, gt=0, description="Tent peak used by quadcheck.")

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "examples": [
                {"mode": "minimize", "l": 1, "R": 10.0, "n": 1024, "q1": math.pi, "q2": 2 * math.pi},
                {"mode": "mpass", "kappa": 1.0, "beta": 0.0, "l": 1, "R": 10.0, "n": 512},
            ]
        },
    )

    @model_validator(mode="after")
    def _mode_fields(self) -> "RunConfig":
        if self.l == 0:
            raise ValueError("l must be nonzero")
        needs = {
            "minimize": ("q1", "q2"),
            "mpass": ("kappa", "beta"),
            "refine": ("kappa", "beta", "seed_file"),
            "verify": ("kappa", "beta", "seed_file"),
            "sweep": ("sweep_param", "sweep_start", "sweep_stop", "sweep_step"),
            "quadcheck": (),
        }[self.mode]
        missing = [name for name in needs if getattr(self, name) is None]
        if missing:
            raise ValueError(f"mode={self.mode} requires {', '.join(missing)}")
        if self.mode == "sweep":
            self._check_sweep()
        return self

    def _check_sweep(self) -> None:
        solver_params = {"mpass": ("kappa", "beta", "l"), "minimize": ("l", "q1", "q2")}[self.sweep_solver]
        if self.sweep_param not in solver_params:
            raise ValueError(f"sweep_solver={self.sweep_solver} cannot sweep {self.sweep_param}")
        base = ("kappa", "beta") if self.sweep_solver == "mpass" else ("q1", "q2")
        missing = [name for name in base if name != self.sweep_param and getattr(self, name) is None]
        if missing:
            raise ValueError(f"sweep with {self.sweep_solver} requires {', '.join(missing)}")
        if len(self.sweep_values()) < 2:
            raise ValueError("sweep range must be monotone with at least two steps")

    def sweep_values(self) -> List[float]:
        start, stop, step = self.sweep_start, self.sweep_stop, self.sweep_step
        if start is None or stop is None or not step or (stop - start) * step < 0:
            return []
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
        if self.sweep_param == "l":
            values = [float(round(v)) for v in values]
        return values

    def physics_params(self, **overrides) -> PhysicsParams:
        data = {"kappa": self.kappa or 0.0, "beta": self.beta or 0.0, "l": self.l, "R": self.R}
        data.update(overrides)
        return PhysicsParams(**data)

    def flux_targets(self, **overrides) -> FluxTargets:
        data = {"q1": self.q1, "q2": self.q2}
        data.update(overrides)
        return FluxTargets(**data)

    def minimize_options(self) -> MinimizeOptions:
        return MinimizeOptions(
            step=self.step, max_iters=self.max_iters, grad_tol=self.grad_tol, enforce_nonneg=self.enforce_nonneg
        )

    def mp_options(self) -> MpOptions:
        return MpOptions(
            path_points=self.path_points,
            deform_iters=self.deform_iters,
            descent_step=self.descent_step,
            crit_tol=self.crit_tol,
            max_rounds=self.max_rounds,
            retension_every=self.retension_every,
        )

    def newton_options(self) -> NewtonOptions:
        return NewtonOptions(tol=self.newton_tol, max_iters=self.newton_max_iters, damping=self.damping)
