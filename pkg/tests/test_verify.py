import json
import math

import numpy as np
import pytest

from schur2.sets import complement, cube, p_ball, pq_ball
from schur2.solvers import critical_value
from schur2.verify import (CounterexampleConfig, EmpiricalDesign,
                           check_rotation_monotonicity,
                           check_schur2_monotonicity, empirical_power,
                           run_counterexample)


def arc_pairs(r, k=2):
    # shifts on a radius-r arc: nearer the axis majorizes nearer the diagonal
    def at(t):
        return np.array([r * math.cos(t), r * math.sin(t)])
    return [(at(math.pi / 4), at(math.pi / 8)), (at(math.pi / 8), at(0.0))]


def test_spherical_set_gives_equal_measures():
    rep = check_schur2_monotonicity(p_ball(2, 2.0, 1.0), arc_pairs(1.5))
    assert rep["passed"]
    for pair in rep["pairs"]:
        assert abs(pair["measure_low"] - pair["measure_high"]) <= 1e-6


def test_complement_ball_direction():
    # measure of the complement of a convex ball grows toward the axis
    rep = check_schur2_monotonicity(complement(p_ball(2, 3.0, 1.0)),
                                    arc_pairs(2.0))
    assert rep["passed"] and rep["strict_gap_found"]
    for pair in rep["pairs"]:
        assert pair["measure_high"] >= pair["measure_low"]


def test_figure_arm_set_direction():
    # reference behaviour: at radius 11 the shift nearer the axis carries
    # more mass for the unbounded concave set
    S = pq_ball(2, 2.0, -0.4, 1.0)
    a = 11 * np.array([math.cos(math.pi / 20), math.sin(math.pi / 20)])
    b = 11 * np.array([math.cos(math.pi / 5), math.sin(math.pi / 5)])
    rep = check_schur2_monotonicity(S, [(b, a)], target_rel_error=0.05)
    assert rep["passed"]
    (pair,) = rep["pairs"]
    assert pair["measure_high"] > pair["measure_low"]


def test_incomparable_pairs_are_skipped():
    rep = check_schur2_monotonicity(
        cube(3, 1.0), [(np.array([1.0, 1.0, 0.0]), np.array([1.2, 0.5, 0.5]))])
    assert "skipped" in rep["pairs"][0]


def test_rotation_monotonicity_directions():
    grid = np.linspace(0.0, math.pi / 4.0, 5)
    up = check_rotation_monotonicity(cube(2, 1.0), 2.0, grid)
    down = check_rotation_monotonicity(p_ball(2, 1.0, 1.0), 2.0, grid)
    assert up["passed"] and down["passed"]
    assert up["measures"][-1] > up["measures"][0]
    assert down["measures"][-1] < down["measures"][0]


def test_rotation_requires_k2():
    with pytest.raises(ValueError):
        check_rotation_monotonicity(cube(3, 1.0), 1.0, [0.0, 0.5])


def test_counterexample_config_invariants():
    cfg = CounterexampleConfig(2, 0.15)
    assert cfg.R == pytest.approx((0.15 ** 2 + 1) / 0.3)
    assert cfg.R == pytest.approx(1 + cfg.r + 0.15)
    with pytest.raises(ValueError):
        CounterexampleConfig(2, 0.5)  # epsilon >= sqrt(2) - 1
    with pytest.raises(ValueError):
        CounterexampleConfig(1, 0.1)


def test_counterexample_k2():
    rep = run_counterexample(CounterexampleConfig(2, 0.15))
    assert rep["passed"]
    assert rep["R"] == pytest.approx(3.41, abs=0.01)
    assert rep["r"] == pytest.approx(2.26, abs=0.01)
    assert rep["p_x0"] == pytest.approx(4 / (math.pi * rep["R"] ** 2),
                                        abs=1e-14)
    assert rep["p_x1"] < rep["p_x0"]
    assert rep["containment_residual"] == 0.0
    json.dumps(rep)  # must serialize


def test_counterexample_k3_sampled():
    rep = run_counterexample(CounterexampleConfig(3, 0.3), seed=1)
    assert rep["passed"]
    assert rep["p_x1"] < rep["p_x0"]


def test_counterexample_deterministic():
    a = run_counterexample(CounterexampleConfig(3, 0.3), seed=5)
    b = run_counterexample(CounterexampleConfig(3, 0.3), seed=5)
    assert a == b


def test_empirical_size_gaussian():
    c = critical_value(2, 2.0, 0.05)
    rate, se = empirical_power(EmpiricalDesign(n=400, k=2, p=2.0, c=c,
                                               replications=4000, seed=0))
    assert abs(rate - 0.05) <= 3 * se


def test_empirical_size_uniform_population():
    c = critical_value(2, 2.0, 0.05)
    rate, se = empirical_power(EmpiricalDesign(n=400, k=2, p=2.0, c=c,
                                               population="uniform",
                                               replications=4000, seed=1))
    assert abs(rate - 0.05) <= 4 * se


def test_empirical_power_converges_with_replications():
    c = critical_value(2, 1.0, 0.05)
    base = EmpiricalDesign(n=200, k=2, p=1.0, c=c, replications=2000, seed=2)
    more = EmpiricalDesign(n=200, k=2, p=1.0, c=c, replications=8000, seed=2)
    r1, s1 = empirical_power(base)
    r2, s2 = empirical_power(more)
    assert s2 < s1
    assert abs(r1 - 0.05) <= 4 * s1 and abs(r2 - 0.05) <= 4 * s2
