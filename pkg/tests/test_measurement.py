import math
from types import SimpleNamespace

import numpy as np
import pytest

from lvspread.errors import InsufficientDataError, ValidationError
from lvspread.geometry import DirectionSet, spreading_sets
from lvspread.measurement import (
    CSV_COLUMNS,
    compare_report,
    directional_speed,
    empirical_spreading_check,
    fit_speed,
    level_radius,
    sample_field,
)
from lvspread.simulator import Field, Grid, SnapshotSeries, write_snapshot

PI = math.pi
GRID = Grid.centered(40.0, 0.5)


def radial(grid, fn):
    c = grid.centers()
    return fn(np.hypot(c[..., 0], c[..., 1]), np.arctan2(c[..., 1], c[..., 0]))


def disk(grid, R):
    return radial(grid, lambda r, th: (r <= R).astype(float))


def make_series(tmp_path, times, u_of_t, v_of_t=None, grid=GRID):
    files = []
    for i, t in enumerate(times):
        u = u_of_t(t)
        v = np.zeros(grid.shape) if v_of_t is None else v_of_t(t)
        name = f"snap_{i:04d}.bin"
        write_snapshot(tmp_path / name, Field(u, v, t), grid)
        files.append(name)
    return SnapshotSeries(tmp_path, grid, list(times), files)


@pytest.mark.parametrize("theta", [0.0, 0.7, PI / 2, 2.0, PI, 4.0, 5.5])
def test_level_radius_of_disk(theta):
    assert level_radius(disk(GRID, 10.0), GRID, theta) == pytest.approx(10.0, abs=GRID.h)


def test_level_radius_none_for_zero_field():
    assert level_radius(np.zeros(GRID.shape), GRID, 1.0) is None


def test_level_radius_is_outermost_crossing():
    arr = radial(GRID, lambda r, th: ((r <= 5) | ((r >= 8) & (r <= 10))).astype(float))
    assert level_radius(arr, GRID, 0.3) == pytest.approx(10.0, abs=GRID.h)


def test_level_radius_none_when_front_leaves_grid():
    assert level_radius(np.ones(GRID.shape), GRID, 0.0) is None


@pytest.mark.parametrize("level", [0.0, 1.0, -0.5])
def test_level_must_be_fraction(level):
    with pytest.raises(ValidationError):
        level_radius(disk(GRID, 3.0), GRID, 0.0, level)


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("theta", [0.0, 1.1, 3.9])
def test_level_radius_scales_with_dilation(lam, theta):
    g = Grid.centered(40.0, 0.25)
    smooth = lambda R, w: radial(g, lambda r, th: 1.0 / (1.0 + np.exp((r - R * (1 + 0.1 * np.cos(3 * th))) / w)))
    base = level_radius(smooth(12.0, 1.0), g, theta)
    scaled = level_radius(smooth(12.0 * lam, lam), g, theta)
    assert scaled == pytest.approx(lam * base, rel=2e-3)


def test_sample_field_is_bilinear_and_nan_outside():
    g = Grid(16, 16, 1.0)
    arr = g.centers()[..., 0] * 2.0 + g.centers()[..., 1]
    vals = sample_field(arr, g, [(2.5, 3.25), (-1.0, 0.0), (20.0, 1.0)])
    assert vals[0] == pytest.approx(8.25)
    assert np.isnan(vals[1]) and np.isnan(vals[2])


@pytest.mark.parametrize("slope, intercept", [(2.0, 10.0), (0.0, 7.0), (-1.0, 50.0), (0.37, -3.0)])
def test_fit_is_exact_on_linear_data(slope, intercept):
    t = np.linspace(5.0, 20.0, 9)
    est = fit_speed(t, intercept + slope * t, 0.5)
    assert est.value == pytest.approx(slope, abs=1e-12)
    assert est.r2 == 1.0 or est.r2 > 1 - 1e-12
    assert est.samples == 9 and est.direction == 0.5


def test_fit_needs_four_points():
    with pytest.raises(InsufficientDataError):
        fit_speed([1, 2, 3], [1, 2, 3])


@pytest.mark.parametrize("fn, expected", [
    (lambda t: 10 + 2 * t, 2.0),
    (lambda t: 12.0, 0.0),
    (lambda t: 30 - t, -1.0),
])
def test_directional_speed_synthetic(tmp_path, fn, expected):
    times = np.arange(0.0, 10.5, 1.0)
    series = make_series(tmp_path, times, lambda t: disk(GRID, fn(t)))
    est = directional_speed(series, 0.4)
    assert est.value == pytest.approx(expected, abs=0.1)
    if expected > 0:
        assert est.r2 > 0.999


def test_directional_speed_insufficient(tmp_path):
    series = make_series(tmp_path, [0.0, 1.0, 2.0, 3.0], lambda t: disk(GRID, 5 + t))
    with pytest.raises(InsufficientDataError):
        directional_speed(series, 0.0, window=0.5)


def test_spreading_check_inside_and_outside(tmp_path):
    times = np.arange(1.0, 9.0, 1.0)
    series = make_series(tmp_path, times, lambda t: disk(GRID, 3.0 * t))
    inside = empirical_spreading_check(series, [(1.0, 0.0), (0.0, -2.0), (1.5, 1.5)], "u", 1.0, 0.1)
    assert inside.passed and inside.max_deviation == 0.0
    outside = empirical_spreading_check(series, [(3.5, 0.0), (0.0, 4.0)], "u", 0.0, 0.1)
    assert outside.passed
    wrong = empirical_spreading_check(series, [(3.5, 0.0)], "u", 1.0, 0.1)
    assert not wrong.passed


def test_spreading_check_flags_unobservable_points(tmp_path):
    times = np.arange(1.0, 9.0, 1.0)
    series = make_series(tmp_path, times, lambda t: disk(GRID, 3.0 * t))
    chk = empirical_spreading_check(series, [(1.0, 0.0), (10.0, 0.0)], "u", 1.0, 0.1)
    assert chk.unobservable == [(10.0, 0.0)]
    assert chk.passed
    only_far = empirical_spreading_check(series, [(10.0, 0.0)], "u", 1.0, 0.1)
    assert not only_far.observable and "unobservable" in only_far.summary()


def compact_sets(c_u, c_v, c_uv):
    return spreading_sets(SimpleNamespace(c_u=c_u, c_v=c_v), DirectionSet.empty(), DirectionSet.empty(), c_uv)


def test_report_compact_dominance(tmp_path):
    times = np.arange(0.0, 8.5, 0.5)
    series = make_series(tmp_path, times, lambda t: disk(GRID, 3.0 + 4.0 * t))
    rep = compare_report(compact_sets(4.0, 2.0, 1.0), series, directions=16)
    assert len([r for r in rep.rows if r.species == "u"]) == 16
    assert len([r for r in rep.rows if r.species == "v"]) == 16
    assert rep.passed
    assert all(r.predicted == "extinct" for r in rep.rows if r.species == "v")
    for ang, pred, meas in rep.triples("u"):
        assert pred == pytest.approx(4.0) and meas == pytest.approx(4.0, rel=0.05)


def test_report_invasion_annulus(tmp_path):
    times = np.arange(0.0, 8.5, 0.5)
    series = make_series(tmp_path, times, lambda t: disk(GRID, 3.0 + 0.5 * t),
                         lambda t: disk(GRID, 6.0 + 2.0 * t) - disk(GRID, 3.0 + 0.5 * t))
    rep = compare_report(compact_sets(1.8, 2.0, 0.5), series, directions=8)
    assert rep.passed, rep.to_csv()
    assert all(r.predicted == pytest.approx(2.0) for r in rep.rows if r.species == "v")


def test_report_detects_wrong_speed(tmp_path):
    times = np.arange(0.0, 8.5, 0.5)
    series = make_series(tmp_path, times, lambda t: disk(GRID, 3.0 + 3.0 * t))
    rep = compare_report(compact_sets(4.0, 2.0, 1.0), series, directions=4)
    assert not rep.passed
    assert "overall: FAIL" in rep.summary()


def test_report_infinite_prediction_uses_empirical_check(tmp_path):
    U = DirectionSet.arc(-0.3, 0.3)
    sets = spreading_sets(SimpleNamespace(c_u=2.0, c_v=2.0), U, DirectionSet.empty(), 0.5)
    times = np.arange(1.0, 9.0, 1.0)
    wedge = lambda t: radial(GRID, lambda r, th: ((np.abs(th) <= 0.5) | (r <= 2.0 * t)).astype(float))
    series = make_series(tmp_path, times, wedge)
    rep = compare_report(sets, series, directions=8)
    row = rep.rows[0]
    assert row.species == "u" and math.isinf(row.predicted) and row.measured == "n/a"
    assert row.verdict == "pass"
    assert any("prediction infinite" in a for a in rep.audits)


def test_rows_near_crossings_are_flagged_critical(tmp_path):
    sets = spreading_sets(SimpleNamespace(c_u=2.0, c_v=2.0), DirectionSet.point(1.5 * PI),
                          DirectionSet.point(0.5 * PI), 0.25)
    times = np.arange(0.0, 8.5, 0.5)
    series = make_series(tmp_path, times, lambda t: disk(GRID, 3.0 + t))
    rep = compare_report(sets, series, directions=4)
    flags = {(r.species, round(r.angle, 6)): r.flag for r in rep.rows}
    assert flags[("u", 0.0)] == "critical" and flags[("u", round(PI, 6))] == "critical"
    assert flags[("u", round(PI / 2, 6))] == ""


def test_report_csv_layout(tmp_path):
    times = np.arange(0.0, 8.5, 0.5)
    series = make_series(tmp_path, times, lambda t: disk(GRID, 3.0 + 4.0 * t))
    rep = compare_report(compact_sets(4.0, 2.0, 1.0), series, directions=4, provenance={"scenario": "x"})
    lines = rep.to_csv().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert len(lines) == 1 + 8
    assert "scenario: x" in rep.summary()
