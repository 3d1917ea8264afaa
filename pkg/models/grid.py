from __future__ import annotations

from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class RadialGrid(BaseModel):
    """Uniform radial mesh on [0, R] with interior-only unknowns.

    Nodes are r_i = i*h, i = 1..n, h = R/(n+1). The endpoints r=0 and r=R carry
    the Dirichlet zero and are never stored. ``weights`` are the trapezoid
    weights r_i*h of the measure r dr at interior nodes; ``closure_weight`` is
    the half cell R*h/2 at r=R (the r=0 half cell has weight zero).
    """

    R: float = Field(
        ...,
        gt=0,
        description="Domain radius (dimensionless length).",
        json_schema_extra={"example": 10.0},
    )
    n: int = Field(
        ...,
        ge=8,
        description="Number of interior nodes.",
        json_schema_extra={"example": 1023},
    )

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"examples": [{"R": 10.0, "n": 1023}]},
    )

    @cached_property
    def h(self) -> float:
        return self.R / (self.n + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        r = self.h * np.arange(1, self.n + 1, dtype=np.float64)
        r.flags.writeable = False
        return r

    @cached_property
    def full_nodes(self) -> np.ndarray:
        """Nodes including the two boundary points 0 and R."""
        r = self.h * np.arange(0, self.n + 2, dtype=np.float64)
        r[-1] = self.R
        r.flags.writeable = False
        return r

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid weights r_i h of the interior nodes.

        They sum to R^2/2 - closure_weight. The half cell at r = R only
        matters for integrands that do not vanish there; ``total_weight`` and
        ``integrate`` on callables or length-(n+2) arrays include it.
        """
        w = self.nodes * self.h
        w.flags.writeable = False
        return w

    @cached_property
    def closure_weight(self) -> float:
        return 0.5 * self.R * self.h

    @cached_property
    def total_weight(self) -> float:
        return float(self.weights.sum() + self.closure_weight)

    @cached_property
    def midpoints(self) -> np.ndarray:
        """Cell centres r_{j+1/2}, j = 0..n (n+1 cells)."""
        m = self.h * (np.arange(0, self.n + 1, dtype=np.float64) + 0.5)
        m.flags.writeable = False
        return m

    @cached_property
    def cell_weights(self) -> np.ndarray:
        cw = self.midpoints * self.h
        cw.flags.writeable = False
        return cw

    @cached_property
    def laplacian_bands(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(lower, diag, upper) coefficients of the conservative radial Laplacian.

        lower[i] multiplies A_{i-1}, upper[i] multiplies A_{i+1}; lower[0] and
        upper[-1] hit the Dirichlet zeros and are kept only for symmetry.
        """
        i = np.arange(1, self.n + 1, dtype=np.float64)
        h2 = self.h * self.h
        lower = (i - 0.5) / (i * h2)
        upper = (i + 0.5) / (i * h2)
        diag = -(lower + upper)
        for band in (lower, upper, diag):
            band.flags.writeable = False
        return lower, diag, upper


class Profile(BaseModel):
    """One real amplitude sampled at the interior nodes of a grid."""

    values: np.ndarray = Field(
        ...,
        description="Samples A(r_i) at the interior nodes; A(0) = A(R) = 0 implicitly.",
    )
    grid: RadialGrid = Field(..., description="Grid the samples live on.")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("values", mode="before")
    @classmethod
    def _as_float_array(cls, v):
        arr = np.array(v, dtype=np.float64, copy=True).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise ValueError("profile values must be finite")
        arr.flags.writeable = False
        return arr

    @model_validator(mode="after")
    def _check_length(self) -> "Profile":
        if self.values.shape[0] != self.grid.n:
            raise ValueError(
                f"profile has {self.values.shape[0]} samples but grid has {self.grid.n} nodes"
            )
        return self

    @property
    def padded(self) -> np.ndarray:
        """Values with the boundary zeros at r=0 and r=R attached."""
        return np.concatenate(([0.0], self.values, [0.0]))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))
