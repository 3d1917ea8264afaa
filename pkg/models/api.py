from __future__ import annotations

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from utils.errors import DimensionError

from .grid import RadialGrid
from .options import MinimizeOptions, MpOptions, NewtonOptions
from .physics import FluxTargets, PhysicsParams, VortexPair
from .reports import SolveReport


class PairPayload(BaseModel):
    """A pair as JSON: interior node values only, the grid is (params.R, len(a1))."""

    params: PhysicsParams
    a1: List[float] = Field(..., min_length=8, description="A1 at interior nodes r_1..r_n.")
    a2: List[float] = Field(..., min_length=8, description="A2 at interior nodes r_1..r_n.")

    def to_pair(self) -> VortexPair:
        if len(self.a1) != len(self.a2):
            raise DimensionError(f"a1 has {len(self.a1)} values, a2 has {len(self.a2)}")
        grid = RadialGrid(R=self.params.R, n=len(self.a1))
        return VortexPair.from_arrays(grid, np.asarray(self.a1), np.asarray(self.a2), self.params)

    @classmethod
    def from_pair(cls, pair: VortexPair) -> "PairPayload":
        return cls(params=pair.params, a1=pair.a1.values.tolist(), a2=pair.a2.values.tolist())


class SolveResponse(BaseModel):
    report: SolveReport
    pair: PairPayload


class MinimizeRequest(BaseModel):
    l: int = Field(1, json_schema_extra={"example": 1})
    R: float = Field(..., gt=0, json_schema_extra={"example": 10.0})
    n: int = Field(..., ge=8, json_schema_extra={"example": 256})
    targets: FluxTargets
    options: MinimizeOptions = Field(default_factory=MinimizeOptions)


class MpassRequest(BaseModel):
    params: PhysicsParams
    n: int = Field(..., ge=8, json_schema_extra={"example": 256})
    options: MpOptions = Field(default_factory=MpOptions)


class RefineRequest(BaseModel):
    pair: PairPayload
    options: NewtonOptions = Field(default_factory=NewtonOptions)


class VerifyRequest(BaseModel):
    pair: PairPayload
    targets: Optional[FluxTargets] = None


class QuadCheckRequest(BaseModel):
    R: float = Field(2.0, gt=0)
    n: int = Field(8191, ge=8)
    b: float = Field(1.0, gt=0)
    tolerance: float = Field(1e-4, gt=0)

    model_config = {"json_schema_extra": {"examples": [{"R": 2.0, "n": 8191, "b": 1.0, "tolerance": 1e-4}]}}
