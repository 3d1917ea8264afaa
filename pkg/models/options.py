from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class MinimizeOptions(BaseModel):
    """Settings of the projected gradient flow."""

    step: float = Field(
        0.5,
        gt=0,
        description="Initial step of the preconditioned gradient flow.",
        json_schema_extra={"example": 0.5},
    )
    max_iters: int = Field(20000, gt=0, description="Iteration cap.")
    grad_tol: float = Field(
        1e-7,
        gt=0,
        description="Stop when the constraint-tangential gradient norm drops below this.",
        json_schema_extra={"example": 1e-7},
    )
    enforce_nonneg: bool = Field(
        True,
        description="Replace each iterate by its nodewise absolute value before projecting.",
    )
    max_step: float = Field(1.0, gt=0, description="Upper cap on the adapted step.")

    model_config = ConfigDict(frozen=True)


class MpOptions(BaseModel):
    """Settings of the mountain-pass path deformation."""

    path_points: int = Field(32, ge=16, description="Number m of path intervals (m+1 points).")
    deform_iters: int = Field(
        200,
        gt=0,
        description="Rounds without a decrease of the path maximum before giving up.",
    )
    descent_step: float = Field(0.5, gt=0, description="Initial step along the preconditioned -grad J.")
    crit_tol: float = Field(
        1e-3,
        gt=0,
        description="Max-norm of grad J at the path maximizer that ends the search.",
    )
    max_rounds: int = Field(5000, gt=0, description="Hard cap on deformation rounds.")
    retension_every: int = Field(10, gt=0, description="Re-tension the path every this many rounds.")

    model_config = ConfigDict(frozen=True)


class NewtonOptions(BaseModel):
    tol: float = Field(1e-10, gt=0, description="Target max-abs residual.")
    max_iters: int = Field(50, gt=0)
    damping: float = Field(
        1.0,
        gt=0,
        le=1.0,
        description="First trial fraction of the Newton step; halved until the residual drops.",
    )
    min_damping: float = Field(2.0**-20, gt=0)

    model_config = ConfigDict(frozen=True)
