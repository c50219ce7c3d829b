import math

import numpy as np
import pytest

from lvspread.geometry import Ball, DirectionSet, Union, s_u_profile, speed_profile
from lvspread.oracle import (
    SENTINEL,
    OracleConfig,
    brute_force_dist,
    brute_force_membership,
    brute_force_speed,
    brute_force_su,
    brute_force_su_balls,
    nested_sample,
    random_scenario,
)

PI = math.pi
QUARTER = DirectionSet.arc(-PI / 4, PI / 4)
FAST = OracleConfig(20000, 400)


def test_config_rejects_small_counts():
    with pytest.raises(ValueError):
        OracleConfig(n_dirs=50)
    with pytest.raises(ValueError):
        OracleConfig(n_c=99)


@pytest.mark.parametrize("dirset, e, expected", [
    (DirectionSet.empty(), 1.0, 2.0),
    (QUARTER, PI / 2, 2 * math.sqrt(2)),
    (QUARTER, 0.1, SENTINEL),
    (QUARTER, PI, 2.0),
])
def test_brute_force_speed_examples(dirset, e, expected):
    assert brute_force_speed(dirset, 2.0, e) == pytest.approx(expected, abs=1e-4)


def test_brute_force_su_examples():
    empty = DirectionSet.empty()
    wu, wv = speed_profile(empty, 4.0), speed_profile(empty, 2.0)
    assert brute_force_su(wu, wv, 1.0, 0.7, FAST) == pytest.approx(4.0, abs=1e-3)
    # no dominance direction at all
    assert brute_force_su(wv, wu, 1.0, 0.7, FAST) == 1.0
    up, down = DirectionSet.point(PI / 2), DirectionSet.point(1.5 * PI)
    hu, hv = speed_profile(down, 2.0), speed_profile(up, 2.0)
    assert brute_force_su(hu, hv, 0.25, PI / 2, FAST) == pytest.approx(0.25, abs=1e-3)


@pytest.mark.parametrize("theta", [0.2, 1.3, 2.2])
def test_two_su_oracles_agree(theta):
    hu = speed_profile(DirectionSet.point(1.5 * PI), 2.0)
    hv = speed_profile(DirectionSet.point(PI / 2), 2.0)
    a = brute_force_su(hu, hv, 0.25, theta, FAST)
    b = brute_force_su_balls(hu, hv, 0.25, theta, FAST)
    assert a == pytest.approx(b, rel=2e-3)


@pytest.mark.parametrize("point, member, dist", [
    ((0.5, 0.0), True, 0.0),
    ((3.0, 0.0), False, 2.0),
])
def test_membership_and_distance(point, member, dist):
    ball = Ball((0, 0), 1)
    assert bool(brute_force_membership(ball, np.array([point]))[0]) is member
    assert brute_force_dist(ball, np.array([point]))[0] == pytest.approx(dist)


def test_union_distance_is_min_of_members():
    a, b = Ball((0, 0), 1), Ball((5, 0), 2)
    pts = np.random.default_rng(0).uniform(-6, 10, (200, 2))
    expect = np.minimum(brute_force_dist(a, pts), brute_force_dist(b, pts))
    assert np.array_equal(brute_force_dist(Union((a, b)), pts), expect)


def test_nested_sample_refines():
    ds = DirectionSet.point(1.0) | DirectionSet.arc(2.0, 3.5)
    coarse, fine = set(nested_sample(ds, 500)), set(nested_sample(ds, 1000))
    assert coarse <= fine
    assert {1.0, 2.0, 3.5} <= coarse


def scenario_profiles(sc):
    return speed_profile(sc["U"], sc["c_u"]), speed_profile(sc["V"], sc["c_v"])


def test_speed_agreement_on_random_scenarios():
    rng = np.random.default_rng(11)
    for _ in range(500):
        sc = random_scenario(rng)
        for ds, base in ((sc["U"], sc["c_u"]), (sc["V"], sc["c_v"]), (sc["U"], sc["c_uv"])):
            exact = speed_profile(ds, base)(sc["e"])
            if math.isinf(exact):
                assert brute_force_speed(ds, base, sc["e"]) == SENTINEL
                continue
            assert abs(brute_force_speed(ds, base, sc["e"]) - exact) <= max(1e-4 * exact, 1e-4)


@pytest.mark.slow
def test_su_agreement_on_random_scenarios():
    rng = np.random.default_rng(12)
    cfg = OracleConfig(100000, 200)
    for _ in range(200):
        sc = random_scenario(rng)
        wu, wv = scenario_profiles(sc)
        exact = s_u_profile(wu, wv, sc["c_uv"])(sc["e"])
        ref = brute_force_su(wu, wv, sc["c_uv"], sc["e"], cfg)
        if math.isinf(exact):
            assert ref == SENTINEL
        else:
            assert abs(ref - exact) <= 2e-3 * exact


@pytest.mark.parametrize("seed", range(6))
def test_refinement_never_turns_agreement_into_disagreement(seed):
    rng = np.random.default_rng(100 + seed)
    sc = random_scenario(rng)
    wu, wv = scenario_profiles(sc)
    exact_w = wu(sc["e"])
    exact_s = s_u_profile(wu, wv, sc["c_uv"])(sc["e"])
    prev_w = prev_s = -math.inf
    held_w = held_s = False
    for n in (200, 400, 800, 1600, 3200):
        cfg = OracleConfig(n, 200)
        w = brute_force_speed(sc["U"], sc["c_u"], sc["e"], cfg)
        s = brute_force_su(wu, wv, sc["c_uv"], sc["e"], cfg)
        # nested grids: the sampled supremum can only grow
        assert w >= prev_w and s >= prev_s
        prev_w, prev_s = w, s
        ok_w = math.isinf(exact_w) or abs(w - exact_w) <= 1e-4 * exact_w
        ok_s = math.isinf(exact_s) or abs(s - exact_s) <= 2e-3 * exact_s
        assert ok_w or not held_w
        assert ok_s or not held_s
        held_w, held_s = ok_w, ok_s
