from pathlib import Path

import pytest
import yaml

from lvspread.errors import ScenarioError
from lvspread.scenario import (
    SIZING_MARGIN,
    load_yaml,
    parse_scenario,
    required_half_width,
    scenario_from_dict,
)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def base(**over):
    data = {
        "params": {"d": 1, "r": 1, "a": 2, "b": 3},
        "U": {"type": "ball", "center": [0, 0], "radius": 2},
        "V": {"type": "ball", "center": [8, 0], "radius": 2},
        "grid": {"h": 0.5},
        "horizon": 4,
    }
    data.update(over)
    return data


def errors_of(data):
    with pytest.raises(ScenarioError) as exc:
        scenario_from_dict(data, "t.yaml")
    return exc.value.errors


@pytest.mark.parametrize("name", sorted(p.name for p in SCENARIOS.glob("*.yaml")))
def test_bundled_scenarios_parse(name):
    sc = parse_scenario(SCENARIOS / name)
    assert sc.snapshot_times[0] == 0.0 and sc.snapshot_times[-1] == sc.horizon
    assert sc.grid.half_width >= required_half_width(sc.params, sc.horizon) - sc.grid.h


def test_defaults_and_sizing():
    sc = scenario_from_dict(base())
    assert sc.grid.half_width == pytest.approx(2.0 * 4 + SIZING_MARGIN)
    assert sc.rho == 1.0 and sc.measurement.directions == 16
    assert sc.c_uv is None and sc.seed == 0


def test_all_errors_reported_with_paths():
    errs = errors_of(base(params={"d": -1, "r": "x", "a": 2, "b": 3, "q": 1}, horizon=-3, bogus=1))
    text = "\n".join(errs)
    for path in ("params.d", "params.r", "params.q", "horizon", "bogus"):
        assert f"t.yaml: {path}:" in text
    assert all(e.startswith("t.yaml: ") for e in errs)


@pytest.mark.parametrize("key", ["a", "b"])
def test_weak_competition_cites_assumption(key):
    params = {"d": 1, "r": 1, "a": 2, "b": 3}
    params[key] = 0.8
    (err,) = errors_of(base(params=params))
    assert f"params.{key}" in err and "(A1) strong competition requires" in err


def test_sizing_rule_violation():
    (err,) = errors_of(base(grid={"h": 0.5, "half_width": 10}))
    assert "grid.half_width" in err and "sizing rule" in err


def test_overlapping_supports_rejected():
    (err,) = errors_of(base(V={"type": "ball", "center": [1, 0], "radius": 2}))
    assert "U∩V=∅" in err


@pytest.mark.parametrize("field", ["U", "V", "params"])
def test_missing_required(field):
    data = base()
    del data[field]
    assert any(e.endswith(f"{field}: required") for e in errors_of(data))


def test_yaml_error_has_position():
    with pytest.raises(ScenarioError, match=r"line 2, column \d+"):
        load_yaml("params: {d: 1\nU: [", "bad.yaml")


def test_top_level_must_be_mapping():
    with pytest.raises(ScenarioError, match="mapping"):
        load_yaml("- 1\n- 2\n")


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="not found"):
        parse_scenario(tmp_path / "nope.yaml")


@pytest.mark.parametrize("spec, expected", [
    ({"every": 1.5}, (0.0, 1.5, 3.0, 4.0)),
    ({"every": 2}, (0.0, 2.0, 4.0)),
    ([0, 1, 4], (0.0, 1.0, 4.0)),
])
def test_snapshot_times(spec, expected):
    assert scenario_from_dict(base(snapshot_times=spec)).snapshot_times == expected


@pytest.mark.parametrize("spec", [[0, 2, 1], [0, 5], "soon"])
def test_bad_snapshot_times(spec):
    assert any("snapshot_times" in e for e in errors_of(base(snapshot_times=spec)))


@pytest.mark.parametrize("raw, value, ci", [(0.25, 0.25, 0.0), ({"value": 0.3, "ci": 0.01}, 0.3, 0.01)])
def test_cuv_forms(raw, value, ci):
    c = scenario_from_dict(base(c_uv=raw)).c_uv
    assert (c.value, c.ci_halfwidth) == (value, ci)


def test_hash_is_stable_and_sensitive():
    a = scenario_from_dict(base())
    b = scenario_from_dict(yaml.safe_load(yaml.safe_dump(base())))
    assert a.hash == b.hash and len(a.hash) == 64
    # explicit defaults normalize to the same scenario
    assert scenario_from_dict(base(rho=1.0, seed=0)).hash == a.hash
    assert scenario_from_dict(base(horizon=5)).hash != a.hash
    assert a.with_seed(3).hash != a.hash
