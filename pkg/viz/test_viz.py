"""Figure scripts: output files exist, errors on bad input, shapes sane."""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from plot_radius import main as radius_main  # noqa: E402
from plot_radius import plot_radius  # noqa: E402
from plot_tube3d import main as tube3d_main  # noqa: E402
from plot_tube3d import plot_tube3d  # noqa: E402

from torus_lasso import Ball, EstimationPolicy, linear_system, propagate  # noqa: E402
from torus_lasso.serialize import write_summary, write_tube_csv  # noqa: E402


@pytest.fixture(scope="module")
def tube_csv(tmp_path_factory):
    d = tmp_path_factory.mktemp("tubes")
    sys3 = linear_system([[-0.5, 1.0, 0.0], [-1.0, -0.5, 0.0], [0.0, 0.0, -0.3]])
    pol = EstimationPolicy()
    tube = propagate(sys3, Ball(0.0, np.array([1.0, 0.0, 0.5]), 0.2), 0.01, 100, pol)
    p = d / "tube.csv"
    write_tube_csv(tube, p)
    return p


def test_plot_radius_writes_png(tube_csv, tmp_path):
    out = tmp_path / "r.png"
    plot_radius(tube_csv, out)
    data = out.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 1000


def test_plot_radius_marks_periods_from_summary(tube_csv, tmp_path):
    # summary alongside the tube: should be consumed without error
    write_summary({"T": 0.25}, tube_csv.with_suffix(".summary.json"))
    out = tmp_path / "r2.png"
    plot_radius(tube_csv, out)
    assert out.exists()


def test_plot_radius_empty_file_is_parse_error(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    rc = radius_main([str(empty), str(tmp_path / "x.png")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_plot_radius_usage():
    assert radius_main([]) == 1


def test_plot_tube3d_writes_png(tube_csv, tmp_path):
    out = tmp_path / "t.png"
    plot_tube3d([str(tube_csv)], (0, 1, 2), out)
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_tube3d_wrap_and_glob(tube_csv, tmp_path):
    out = tmp_path / "t2.png"
    rc = tube3d_main([str(tube_csv.parent / "*.csv"), str(out),
                      "--axes", "0,1,2", "--wrap-angles"])
    assert rc == 0 and out.exists()


def test_plot_tube3d_empty_input_is_error(tmp_path, capsys):
    rc = tube3d_main([str(tmp_path / "nothing*.csv"), str(tmp_path / "x.png")])
    assert rc == 1
    assert "no input" in capsys.readouterr().err


def test_plot_tube3d_axes_validation(tube_csv, tmp_path):
    with pytest.raises(ValueError):
        plot_tube3d([str(tube_csv)], (0, 1), tmp_path / "x.png")
    with pytest.raises(ValueError):
        plot_tube3d([str(tube_csv)], (0, 1, 1), tmp_path / "x.png")
    with pytest.raises(ValueError):
        plot_tube3d([str(tube_csv)], (0, 1, 7), tmp_path / "x.png")
