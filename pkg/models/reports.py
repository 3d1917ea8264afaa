from __future__ import annotations

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class PathRecord(BaseModel):
    round: int
    max_J: float = Field(..., description="Largest J over the discrete path after the round.")
    argmax_t: float = Field(..., description="Path parameter of the maximizer.")
    grad_norm: float = Field(..., description="Max-norm of grad J at the maximizer.")


class SolveReport(BaseModel):
    """Diagnostics shared by the minimizer, the mountain-pass search and the Newton refiner."""

    method: str = Field(..., description="minimize, mpass or refine.", json_schema_extra={"example": "minimize"})
    converged: bool = Field(..., description="Whether the stopping test was met.")
    kappa: float = Field(..., description="Propagation constant (extracted or prescribed).")
    beta: float = Field(..., description="Phase mismatch (extracted or prescribed).")
    iters: int = Field(0, description="Iterations or deformation rounds performed.")
    final_I: Optional[float] = Field(None, description="Action I at exit.")
    J_value: Optional[float] = Field(None, description="Action J at exit.")
    q1: float = Field(..., description="Achieved Q(A1).")
    q2: float = Field(..., description="Achieved Q(A2).")
    proj_grad_norm: Optional[float] = Field(None, description="Constraint-tangential gradient norm at exit.")
    grad_norm: Optional[float] = Field(None, description="Max-norm of grad J at the returned pair.")
    residual_max: float = Field(..., description="Max-abs residual of the l-vortex system at (kappa, beta).")
    bound_violations: int = Field(0, ge=0, description="Accepted minimizer iterates with I below the coercive bound.")
    min_bound_gap: Optional[float] = Field(None, description="Smallest I minus coercive bound over accepted iterates.")
    residual_history: List[float] = Field(default_factory=list)
    path_max_history: List[float] = Field(default_factory=list)
    path_records: List[PathRecord] = Field(default_factory=list)
    retension_rounds: List[int] = Field(
        default_factory=list,
        description="Rounds after which the path was refined around its maximizer.",
    )
    hypothesis_ok: bool = Field(..., description="kappa > max{0, -beta/2}.")
    trivial: bool = Field(False, description="Converged to (0, 0) rather than a soliton.")
    suspect: bool = Field(False, description="Converged but a positivity conclusion failed.")
    message: str = Field("", description="Human-readable exit reason.")

    model_config = ConfigDict(
        json_schema_extra={
            "examples": [
                {
                    "method": "minimize",
                    "converged": True,
                    "kappa": 0.41,
                    "beta": 0.73,
                    "iters": 812,
                    "final_I": -0.27,
                    "q1": 3.14159,
                    "q2": 6.28319,
                    "proj_grad_norm": 9.1e-9,
                    "residual_max": 2.4e-6,
                    "hypothesis_ok": True,
                }
            ]
        }
    )


class Triviality(str, Enum):
    fully_nontrivial = "fully_nontrivial"
    a1_zero = "a1_zero"
    a2_zero = "a2_zero"
    trivial = "trivial"


class DecayFit(BaseModel):
    rate1: float = Field(..., description="Fitted decay rate of A1^2 (reported positive).")
    rate2: float = Field(..., description="Fitted decay rate of A2^2.")
    c1: float = Field(..., description="Fitted prefactor of A1^2.")
    c2: float = Field(..., description="Fitted prefactor of A2^2.")
    r_lo: float
    r_hi: float


class VerifyReport(BaseModel):
    hypothesis_ok: bool = Field(..., description="kappa > max{0, -beta/2}.")
    residual_max: float
    positive_a2: bool
    semi_trivial: Triviality
    m1: float = Field(..., ge=0, description="max |A1|.")
    m2: float = Field(..., ge=0, description="max |A2|.")
    sandwich_lo: float = Field(..., description="l^2/(2R^2) + kappa.")
    sandwich_hi: float = Field(..., description="M1^2/(2l^2/R^2 + 2(2kappa+beta)).")
    sandwich_ok: bool
    sandwich_consistent: bool = Field(..., description="hi > lo, the necessary condition on M1.")
    decay_rate_a1: Optional[float] = None
    decay_rate_a2: Optional[float] = None
    decay_bound_a1: Optional[float] = Field(None, description="sqrt(2 kappa).")
    decay_bound_a2: Optional[float] = Field(None, description="sqrt(2 kappa + beta).")
    decay_bound_a2_doubled: Optional[float] = Field(None, description="2 sqrt(2 kappa + beta).")
    decay_ok_a1: bool = False
    decay_ok_a2: bool = False
    decay_ok_a2_doubled: bool = False
    flux_q1: float
    flux_q2: float
    flux_ok: Optional[bool] = Field(None, description="Fluxes match targets when targets were given.")
    all_pass: bool
    notes: List[str] = Field(default_factory=list)


class FunctionalsReport(BaseModel):
    Q1: float
    Q2: float
    total_flux: float
    E: float
    I: float
    J: float
    h_norm_sq_1: float
    h_norm_sq_2: float
    residual_max: float


class QuadCheckRow(BaseModel):
    name: str = Field(..., json_schema_extra={"example": "int r A0^2 dr"})
    computed: float
    closed_form: float
    rel_error: float


class QuadCheckReport(BaseModel):
    R: float
    n: int
    b: float
    tolerance: float
    rows: List[QuadCheckRow]
    passed: bool


class RunReport(BaseModel):
    """Contents of report.json for one run."""

    mode: str
    solve: Optional[SolveReport] = None
    polish: Optional[SolveReport] = None
    verify: Optional[VerifyReport] = None
    functionals: Optional[FunctionalsReport] = None
    quadcheck: Optional[QuadCheckReport] = None
    exit_code: int = Field(0, description="0 success, 2 non-convergence.")


class SweepRow(BaseModel):
    """One line of sweep_summary.csv."""

    step_value: float
    action: Optional[float] = Field(None, description="J for mpass sweeps, I for minimize sweeps.")
    kappa: Optional[float] = None
    beta: Optional[float] = None
    m1: Optional[float] = None
    m2: Optional[float] = None
    decay_rate_a1: Optional[float] = None
    decay_rate_a2: Optional[float] = None
    all_pass: Optional[bool] = None
    status: str = Field("ok", json_schema_extra={"example": "ok"})

    @classmethod
    def columns(cls) -> List[str]:
        return list(cls.model_fields)
