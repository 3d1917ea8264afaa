import math

import numpy as np
import pytest

from models.physics import PhysicsParams, VortexPair
from services.radial_grid import make_grid
from utils.config_file import load_config, parse_config_text
from utils.errors import ConfigError
from utils.io import read_pair_csv, read_profile_csv, write_pair_csv, write_profile_csv, write_rows_csv

from .conftest import smooth_profile


def test_parse_config_text_handles_comments_and_pi():
    entries = parse_config_text(
        """
        # existence route
        mode = minimize
        q1 = pi        # flux of the fundamental
        q2 = 2*pi
        n=1024
        """
    )
    assert entries["mode"] == "minimize"
    assert float(entries["q1"]) == math.pi
    assert float(entries["q2"]) == 2 * math.pi
    assert entries["n"] == "1024"


@pytest.mark.parametrize("text", ["mode minimize", "=3", "n=1\nn=2"])
def test_parse_config_text_rejects_malformed_lines(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_load_config_builds_run_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("mode=mpass\nkappa=1\nbeta=0\nR=10\nn=512\nenforce_nonneg=false\n")
    config = load_config(path)
    assert config.mode == "mpass"
    assert config.physics_params() == PhysicsParams(kappa=1.0, beta=0.0, l=1, R=10.0)
    assert config.enforce_nonneg is False
    assert config.mp_options().path_points == 32


def test_overrides_win_over_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("mode=mpass\nkappa=1\nbeta=0\n")
    config = load_config(path, {"mode": "quadcheck", "output_dir": None, "R": "2"})
    assert config.mode == "quadcheck"
    assert config.R == 2.0
    assert config.output_dir == "out"


@pytest.mark.parametrize(
    "text",
    [
        "mode=minimize\nq1=1\nq2=1\ncolour=blue\n",
        "mode=minimize\nq1=1\n",
        "mode=mpass\nkappa=1\n",
        "mode=refine\nkappa=1\nbeta=0\n",
        "mode=teleport\n",
        "mode=quadcheck\nl=0\n",
        "mode=sweep\nkappa=0.5\nbeta=0\nsweep_param=kappa\nsweep_start=2\nsweep_stop=1\nsweep_step=0.25\n",
        "mode=sweep\nbeta=0\nsweep_param=q1\nsweep_start=1\nsweep_stop=2\nsweep_step=0.5\n",
    ],
)
def test_invalid_configs(tmp_path, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_sweep_values(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text("mode=sweep\nbeta=0\nsweep_param=kappa\nsweep_start=0.5\nsweep_stop=2.0\nsweep_step=0.25\n")
    config = load_config(path)
    assert config.sweep_values() == pytest.approx([0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0])


def test_pair_csv_round_trip_is_exact(tmp_path, rng):
    grid = make_grid(7.3, 333)
    params = PhysicsParams(kappa=0.3, beta=0.1, l=2, R=7.3)
    pair = VortexPair.from_arrays(grid, smooth_profile(grid, rng), smooth_profile(grid, rng), params)
    path = tmp_path / "profile.csv"
    write_pair_csv(path, pair)
    back = read_pair_csv(path, params)
    assert (back.grid.R, back.grid.n) == (grid.R, grid.n)
    np.testing.assert_array_equal(back.a1.values, pair.a1.values)
    np.testing.assert_array_equal(back.a2.values, pair.a2.values)

    lines = path.read_text().splitlines()
    assert lines[0] == "r,a1,a2"
    assert len(lines) == grid.n + 3
    assert lines[1].split(",")[1:] == ["0", "0"]


def test_profile_csv_round_trip(tmp_path, rng):
    grid = make_grid(2.0, 64)
    pair = VortexPair.from_arrays(grid, smooth_profile(grid, rng), smooth_profile(grid, rng), PhysicsParams(l=1, R=2.0))
    write_profile_csv(tmp_path / "a1.csv", pair.a1)
    np.testing.assert_array_equal(read_profile_csv(tmp_path / "a1.csv").values, pair.a1.values)


def test_read_pair_rejects_bad_files(tmp_path, rng):
    grid = make_grid(5.0, 32)
    params = PhysicsParams(l=1, R=5.0)
    pair = VortexPair.from_arrays(grid, smooth_profile(grid, rng), smooth_profile(grid, rng), params)
    path = tmp_path / "p.csv"
    write_pair_csv(path, pair)
    with pytest.raises(ConfigError):
        read_pair_csv(path, PhysicsParams(l=1, R=6.0))
    with pytest.raises(ConfigError):
        read_profile_csv(path)
    with pytest.raises(ConfigError):
        read_pair_csv(tmp_path / "missing.csv", params)


def test_write_rows_csv_formats_values(tmp_path):
    path = tmp_path / "rows.csv"
    write_rows_csv(path, ["x", "ok", "note"], [(0.1, True, None), (2, False, "failed")])
    assert path.read_text().splitlines() == ["x,ok,note", "0.10000000000000001,true,", "2,false,failed"]
