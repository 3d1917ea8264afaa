from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .grid import Profile, RadialGrid


class PhysicsParams(BaseModel):
    kappa: float = Field(
        0.0,
        description="Wave propagation constant.",
        json_schema_extra={"example": 1.0},
    )
    beta: float = Field(
        0.0,
        description="Phase mismatch.",
        json_schema_extra={"example": 0.0},
    )
    l: int = Field(
        ...,
        description="Vortex number (nonzero integer).",
        json_schema_extra={"example": 1},
    )
    R: float = Field(
        ...,
        gt=0,
        description="Domain radius.",
        json_schema_extra={"example": 10.0},
    )

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"examples": [{"kappa": 1.0, "beta": 0.0, "l": 1, "R": 10.0}]},
    )

    @field_validator("l")
    @classmethod
    def _nonzero_l(cls, v: int) -> int:
        if v == 0:
            raise ValueError("vortex number l must be nonzero")
        return v

    @property
    def sigma(self) -> float:
        """2*kappa + beta, the screening coefficient of the second harmonic."""
        return 2.0 * self.kappa + self.beta

    def hypothesis_ok(self) -> bool:
        """kappa > max{0, -beta/2}."""
        return self.kappa > max(0.0, -0.5 * self.beta)


class FluxTargets(BaseModel):
    q1: float = Field(
        ...,
        gt=0,
        description="Target energy flux of the fundamental, Q(A1).",
        json_schema_extra={"example": math.pi},
    )
    q2: float = Field(
        ...,
        gt=0,
        description="Target energy flux of the second harmonic, Q(A2).",
        json_schema_extra={"example": 2 * math.pi},
    )

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"examples": [{"q1": math.pi, "q2": 2 * math.pi}]},
    )


class VortexPair(BaseModel):
    """The amplitude pair (A1, A2) together with the system parameters."""

    a1: Profile = Field(..., description="Fundamental amplitude A1.")
    a2: Profile = Field(..., description="Second-harmonic amplitude A2.")
    params: PhysicsParams

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _same_grid(self) -> "VortexPair":
        g1, g2 = self.a1.grid, self.a2.grid
        if g1.n != g2.n or g1.R != g2.R:
            raise ValueError("a1 and a2 must share one grid")
        if not math.isclose(g1.R, self.params.R, rel_tol=1e-12):
            raise ValueError(f"grid radius {g1.R} differs from params.R={self.params.R}")
        return self

    @property
    def grid(self) -> RadialGrid:
        return self.a1.grid

    @classmethod
    def from_arrays(
        cls, grid: RadialGrid, a1: np.ndarray, a2: np.ndarray, params: PhysicsParams
    ) -> "VortexPair":
        return cls(a1=Profile(values=a1, grid=grid), a2=Profile(values=a2, grid=grid), params=params)

    def with_params(self, **changes) -> "VortexPair":
        return VortexPair(a1=self.a1, a2=self.a2, params=self.params.model_copy(update=changes))

    def stacked(self) -> np.ndarray:
        return np.concatenate((self.a1.values, self.a2.values))


class TentParams(BaseModel):
    a: float = Field(
        ...,
        gt=0,
        description="Half radius; the tent lives on R = 2a.",
        json_schema_extra={"example": 1.0},
    )
    b: float = Field(
        ...,
        gt=0,
        description="Peak amplitude, reached at r = a.",
        json_schema_extra={"example": 1.0},
    )

    model_config = ConfigDict(frozen=True)


class MpConstants(BaseModel):
    K: float = Field(..., description="Norm-squared level of the separating shell, 1/(72 R^4).")
    C0: float = Field(..., description="Lower bound of J on the shell, 1/(864 R^4).")

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"examples": [{"K": 1 / 72, "C0": 1 / 864}]},
    )
