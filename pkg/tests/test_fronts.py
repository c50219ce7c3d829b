import math

import pytest

from lvspread.errors import InconclusiveError, PreconditionError, ValidationError
from lvspread.fronts import (
    FrontSpeedEstimate,
    Numerics1D,
    Numerics2D,
    Params,
    calibrate_rho,
    check_assumptions,
    estimate_cuv,
    invasion_trial,
    kpp_speed,
)
from lvspread.geometry import Verdict


@pytest.mark.parametrize("d, r, expected", [(1, 1, 2.0), (2, 2, 4.0), (1, 0.25, 1.0)])
def test_kpp_speed(d, r, expected):
    assert kpp_speed(d, r) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("d, r", [(0, 1), (1, -1), (-2, 3)])
def test_kpp_speed_rejects_nonpositive(d, r):
    with pytest.raises(ValidationError):
        kpp_speed(d, r)


@pytest.mark.parametrize("kwargs", [dict(d=0), dict(r=-1), dict(a=-0.1), dict(b=math.nan), dict(d=math.inf)])
def test_params_validation(kwargs):
    with pytest.raises(ValidationError):
        Params(**kwargs)


def test_params_derived_speeds():
    p = Params(d=2, r=2, a=3, b=1.5)
    assert (p.c_u, p.c_v) == (4.0, 2.0)
    assert p.strong_competition
    assert p.swapped() == Params(2, 2, 1.5, 3)
    assert not Params(a=0.5).strong_competition


def est(a, b, d=1.0, r=1.0):
    return estimate_cuv(Params(d, r, a, b), Numerics1D(dx=0.25, horizon=60))


@pytest.mark.parametrize("a", [1.5, 2.0, 3.0])
def test_symmetric_competition_gives_standing_front(a):
    assert abs(est(a, a).value) < 0.02


def test_exchange_antisymmetry():
    fwd, back = est(2.0, 3.0), est(3.0, 2.0)
    assert abs(fwd.value + back.value) <= 2 * max(fwd.ci_halfwidth, back.ci_halfwidth) + 1e-12
    assert fwd.value > 0


@pytest.mark.parametrize("d, r, a, b", [
    (1, 1, 2, 3),
    (1, 1, 3, 2),
    (1, 0.81, 1.1, 10),
    (0.5, 1, 2, 2),
    (2, 1, 1.5, 4),
])
def test_estimate_inside_bracket_and_converged(d, r, a, b):
    p = Params(d, r, a, b)
    e = est(a, b, d, r)
    assert -2.0 < e.value < p.c_u
    assert e.ci_halfwidth >= 0
    assert abs(e.fine - e.coarse) / max(abs(e.value), 0.1) < 0.01


def test_estimate_frozen_value():
    # frozen from a dx=0.25/0.125, horizon 60 run
    assert est(2.0, 3.0).value == pytest.approx(0.2524, abs=0.005)


def test_estimate_requires_strong_competition():
    with pytest.raises(PreconditionError):
        estimate_cuv(Params(a=0.5, b=2))


def test_estimate_reports_short_domain():
    with pytest.raises(InconclusiveError, match="longer domain"):
        estimate_cuv(Params(1, 1, 1.1, 10), Numerics1D(dx=0.25, horizon=60, length=15))


def test_estimate_rejects_unstable_dt():
    with pytest.raises(PreconditionError):
        estimate_cuv(Params(1, 1, 2, 3), Numerics1D(dt=1.0))


def test_csv_row():
    e = FrontSpeedEstimate(0.25, 0.001, 0.25, 0.01, 140.0, 60.0)
    assert e.csv_row(Params(1, 1, 2, 3)) == "1,1,2,3,0.25,0.001,0.25,60"
    assert (e.lower, e.upper) == pytest.approx((0.249, 0.251))
    with pytest.raises(ValueError):
        FrontSpeedEstimate(0.1, -1.0, 0.25, 0.01, 1.0, 1.0)


def cuv(value, ci):
    return FrontSpeedEstimate(value, ci, 0.25, 0.01, 100.0, 60.0)


@pytest.mark.parametrize("params, c, verdict, cond", [
    (Params(1, 1, 2, 3), cuv(0.3, 0.01), Verdict.HOLDS, "A2"),
    (Params(1, 1, 2, 2), cuv(0.0, 0.01), Verdict.UNDECIDABLE, "A2"),
    (Params(1, 1, 3, 2), cuv(-0.3, 0.01), Verdict.FAILS, "A2"),
    (Params(1, 1, 0.5, 2), None, Verdict.FAILS, "A1"),
    (Params(1, 1, 2, 2), None, Verdict.HOLDS, "A1"),
])
def test_check_assumptions(params, c, verdict, cond):
    rep = check_assumptions(params, c)
    assert rep.verdict is verdict
    assert rep.condition == cond


def test_a1_witness_names_the_coefficient():
    assert check_assumptions(Params(a=0.5, b=0.9)).witnesses == ("a=0.5", "b=0.9")


def test_zero_spread_is_widened_to_floor():
    assert check_assumptions(Params(1, 1, 2, 3), cuv(0.003, 0.0)).verdict is Verdict.UNDECIDABLE


def test_large_ball_invades():
    ok, info = invasion_trial(Params(1, 1, 2, 3), 20.0, h=0.5, horizon=40)
    assert ok and info["outcome"] in ("invaded", "growing")


def test_tiny_ball_dies_out():
    ok, info = invasion_trial(Params(1, 1, 2, 3), 0.5, h=0.5, horizon=40)
    assert not ok and info["outcome"] == "extinct"


def test_calibrate_rejects_empty_bracket():
    with pytest.raises(InconclusiveError, match="widen"):
        calibrate_rho(Params(1, 1, 2, 3), Numerics2D(rho_lo=0.25, rho_hi=1.0, horizon=30))


def test_calibrate_requires_strong_competition():
    with pytest.raises(PreconditionError):
        calibrate_rho(Params(a=0.5))
