"""Smoke test of the curvlab Python module."""

import json
import math
import tempfile
from pathlib import Path

import curvlab


def main():
    grid = curvlab.SphereCellGrid(2, 8)
    assert len(grid) == 6 * 8 * 8
    assert math.isclose(grid.total_area(), 4 * math.pi, rel_tol=1e-9)
    assert math.isclose(curvlab.sphere_volume(2), 4 * math.pi)
    c = grid.locate([0.0, 0.0, 1.0])
    assert math.isclose(sum(v * v for v in grid.cell_center(c)), 1.0)

    scenario = curvlab.Scenario(json.dumps({
        "name": "smoke",
        "resolutions": [32, 64],
        "sphere_cells": 16,
        "audits": [{"kind": "cov_check", "name": "band"}],
    }))
    with tempfile.TemporaryDirectory() as out:
        (report,) = scenario.run(out)
        assert (Path(out) / "band.json").exists()
    assert report.status == "pass", report
    lhs, rhs = report.metrics["lhs"], report.metrics["rhs"]
    assert abs(lhs - 4 * math.pi * math.cos(0.3)) < 0.05
    columns, rows = report.tables["resolutions"]
    assert len(rows) == 2 and columns

    w = curvlab.whitney('{"shape": "disk", "center": [0, 0], "radius": 1}', 8)
    assert w["passed"] and w["violations"] == 0
    assert abs(w["volume"] + w["unresolved_volume"] - math.pi) < 0.05

    summary, reports = curvlab.run_command("boxdim", '{"resolution": 512}', seed=3)
    assert summary["status"] == "pass", summary
    assert reports[0].metrics["fraction_within"] >= 0.9

    try:
        curvlab.Scenario('{"resolutions": "x"}')
    except ValueError:
        pass
    else:
        raise AssertionError("bad config accepted")

    print(f"ok: band {lhs:.4f} vs {rhs:.4f}, disk cubes {w['cubes']}, boxdim {summary['status']}")


if __name__ == "__main__":
    main()
