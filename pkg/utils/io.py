"""
CSV and JSON artifacts. Floats are written with 17 significant digits so a
written pair reads back bit-identical.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from models.grid import Profile, RadialGrid
from models.physics import PhysicsParams, VortexPair
from utils.errors import ConfigError

FLOAT_FMT = "%.17g"


def _write_columns(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    data = np.column_stack(columns)
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt=FLOAT_FMT)


def write_profile_csv(path: str | Path, profile: Profile) -> None:
    _write_columns(Path(path), ("r", "value"), (profile.grid.full_nodes, profile.padded))


def write_pair_csv(path: str | Path, pair: VortexPair) -> None:
    _write_columns(Path(path), ("r", "a1", "a2"), (pair.grid.full_nodes, pair.a1.padded, pair.a2.padded))


def _read_columns(path: Path, expected: Sequence[str]) -> np.ndarray:
    try:
        with path.open() as fh:
            header = fh.readline().strip().split(",")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if header != list(expected):
        raise ConfigError(f"{path}: expected header {','.join(expected)}, got {','.join(header)}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(expected) or data.shape[0] < 10:
        raise ConfigError(f"{path}: malformed table of shape {data.shape}")
    return data


def _grid_from_column(path: Path, r: np.ndarray) -> RadialGrid:
    n = r.shape[0] - 2
    grid = RadialGrid(R=float(r[-1]), n=n)
    if r[0] != 0.0 or not np.allclose(r, grid.full_nodes, rtol=1e-12, atol=1e-14):
        raise ConfigError(f"{path}: radii are not a uniform grid on [0, R]")
    return grid


def read_profile_csv(path: str | Path) -> Profile:
    path = Path(path)
    data = _read_columns(path, ("r", "value"))
    grid = _grid_from_column(path, data[:, 0])
    return Profile(values=data[1:-1, 1], grid=grid)


def read_pair_csv(path: str | Path, params: PhysicsParams) -> VortexPair:
    path = Path(path)
    data = _read_columns(path, ("r", "a1", "a2"))
    grid = _grid_from_column(path, data[:, 0])
    if not np.isclose(grid.R, params.R, rtol=1e-12):
        raise ConfigError(f"{path}: pair lives on R={grid.R}, config says R={params.R}")
    return VortexPair.from_arrays(grid, data[1:-1, 1], data[1:-1, 2], params.model_copy(update={"R": grid.R}))


def write_json(path: str | Path, model: BaseModel) -> None:
    Path(path).write_text(model.model_dump_json(indent=2) + "\n")


def write_rows_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    def fmt(v: object) -> str:
        if isinstance(v, bool) or v is None:
            return "" if v is None else str(v).lower()
        if isinstance(v, float):
            return FLOAT_FMT % v
        return str(v)

    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
