import math

import numpy as np
import pytest

from lvspread.geometry import (
    DirectionSet,
    Verdict,
    check_path_condition,
    check_star_shaped,
    check_strict_dominance_closure,
    region_where_greater,
    speed_profile,
)
from lvspread.geometry.conditions import ConditionReport

PI = math.pi
EMPTY = DirectionSet.empty()


def const(c):
    return speed_profile(EMPTY, c)


def half_strip_profiles(c=2.0):
    return speed_profile(DirectionSet.point(1.5 * PI), c), speed_profile(DirectionSet.point(0.5 * PI), c)


@pytest.mark.parametrize("theta", [0.0, 1.0, 2.5, 4.0, 6.0])
def test_path_holds_for_compact_dominance(theta):
    assert check_path_condition(theta, EMPTY, const(4.0), const(2.0)).holds


def test_path_fails_with_witness_at_e():
    rep = check_path_condition(1.0, EMPTY, const(2.0), const(4.0))
    assert rep.verdict is Verdict.FAILS
    assert rep.witnesses[0] == pytest.approx(1.0)


@pytest.mark.parametrize("theta", [1.2 * PI, 1.4 * PI, 1.6 * PI, 1.9 * PI])
def test_path_holds_below_axis_for_half_strips(theta):
    wu, wv = half_strip_profiles()
    rep = check_path_condition(theta, DirectionSet.point(1.5 * PI), wu, wv, samples=200)
    assert rep.holds


def test_path_needs_two_samples():
    with pytest.raises(ValueError):
        check_path_condition(0.0, EMPTY, const(4.0), const(2.0), samples=1)


def test_star_shape_examples():
    assert check_star_shaped(EMPTY, DirectionSet.point(0.0)).holds
    assert check_star_shaped(DirectionSet.full(), DirectionSet.arc(0.2, 1.0)).holds
    rep = check_star_shaped(DirectionSet.arc(PI / 3, 2 * PI / 3, closed_lo=False, closed_hi=False),
                            DirectionSet.point(0.0))
    assert rep.verdict is Verdict.FAILS
    # a witness leaves the sector on its way to the x-axis
    w = rep.witnesses[0]
    assert math.atan2(w[1], w[0]) < PI / 2


def test_star_shape_holds_for_sector_containing_target():
    region = DirectionSet.arc(-0.5, 1.0, closed_lo=False, closed_hi=False)
    assert check_star_shaped(region, DirectionSet.point(0.0)).holds


@pytest.mark.parametrize("pu, pv, verdict", [
    (const(4.0), const(2.0), Verdict.HOLDS),
    (const(2.0), const(2.0), Verdict.FAILS),
    (*half_strip_profiles(), Verdict.HOLDS),
    (const(2.0), const(2.0 * (1 + 1e-11)), Verdict.UNDECIDABLE),
])
def test_strict_dominance_closure(pu, pv, verdict):
    assert check_strict_dominance_closure(pu, pv).verdict is verdict


def test_strict_dominance_needs_enough_samples():
    with pytest.raises(ValueError):
        check_strict_dominance_closure(const(4.0), const(2.0), samples=10)


def test_region_where_greater_is_open():
    wu, wv = half_strip_profiles()
    r = region_where_greater(wu, wv)
    assert r.contains(1.5 * PI)
    assert not r.contains(PI) and not r.contains(0.0)
    assert not r.contains(0.5 * PI)


def test_failing_report_requires_witness():
    with pytest.raises(ValueError):
        ConditionReport("BUS", Verdict.FAILS)
    with pytest.raises(ValueError):
        ConditionReport("NOPE", Verdict.HOLDS)


def test_summary_mentions_witnesses():
    rep = ConditionReport("BUS", "fails", (0.0,))
    assert rep.summary() == "BUS: fails witnesses: 0 rad"
