import math

import numpy as np
import pytest

from schur2.means import (MeanKind, MeanSpec, Schur2Value, Tail,
                          classify_mean, p_mean, pq_mean,
                          schur_ostrowski_sign, truncated_mean)


def naive_p_mean(x, p):
    """Direct textbook formula, safe only away from the limit cases."""
    x = np.abs(np.asarray(x, float))
    return (np.mean(x ** p)) ** (1.0 / p)


def test_p_mean_matches_naive_formula():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.random(4) + 0.1
        for p in (-3.0, -1.0, 0.5, 1.0, 2.0, 3.0, 7.5):
            assert p_mean(x, p) == pytest.approx(naive_p_mean(x, p), rel=1e-12)


def test_p_mean_limit_cases():
    x = np.array([0.5, 2.0, 1.0])
    assert p_mean(x, math.inf) == 2.0
    assert p_mean(x, -math.inf) == 0.5
    assert p_mean(x, 0.0) == pytest.approx(np.exp(np.mean(np.log(x))), rel=1e-14)
    # any zero coordinate kills every p <= 0 mean
    assert p_mean([0.0, 1.0], -1.0) == 0.0
    assert p_mean([0.0, 1.0], 0.0) == 0.0
    assert p_mean([0.0, 1.0], -math.inf) == 0.0


def test_p_mean_extreme_p_is_stable():
    # large |p| must not overflow: factor out the max/min coordinate
    x = np.array([3.0, 4.0])
    assert p_mean(x, 400.0) == pytest.approx(4.0 * (0.5 * (1 + (3 / 4) ** 400)) ** (1 / 400.0), rel=1e-12)
    assert np.isfinite(p_mean(x, 1e4))
    assert p_mean(x, 1e4) == pytest.approx(4.0, rel=1e-3)
    assert p_mean(x, -1e4) == pytest.approx(3.0, rel=1e-3)


def test_p_mean_monotone_in_p():
    rng = np.random.default_rng(1)
    ps = [-math.inf, -5, -1, 0, 0.5, 1, 2, 5, math.inf]
    for _ in range(20):
        x = rng.random(5) + 0.01
        vals = [p_mean(x, p) for p in ps]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_truncated_mean():
    x = np.array([1.0, 5.0, 2.0, 4.0])
    # mean of the two largest / two smallest absolute values, p = 1
    assert truncated_mean(x, 2, Tail.LARGEST, 1.0) == pytest.approx(4.5)
    assert truncated_mean(x, 2, Tail.SMALLEST, 1.0) == pytest.approx(1.5)
    assert truncated_mean(x, 2, Tail.LARGEST, math.inf) == 5.0


def test_pq_mean_reduces_to_p_mean():
    rng = np.random.default_rng(2)
    for _ in range(50):
        x = rng.random(4) + 0.1
        for p in (0.5, 1.0, 2.0, 5.0):
            assert pq_mean(x, p, 0.0) == pytest.approx(p_mean(x, p), rel=1e-12)


def test_pq_mean_direct_formula():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = np.abs(rng.standard_normal(4)) + 0.1
        for p, q in [(2.0, -0.4), (5.0, -1.0), (2.0, 1.0), (0.7, 0.3)]:
            direct = (np.sum(x ** p) / np.sum(x ** q)) ** (1.0 / (p - q))
            assert pq_mean(x, p, q) == pytest.approx(direct, rel=1e-11)


def test_pq_mean_equal_parameters():
    # p = q: weighted geometric mean with self-normalized weights
    x = np.array([1.0, 2.0, 4.0])
    p = 0.7
    w = x ** p / np.sum(x ** p)
    assert pq_mean(x, p, p) == pytest.approx(np.prod(x ** w), rel=1e-12)


def test_pq_mean_zero_coordinate_with_negative_q():
    # the axes belong to the sublevel sets when q < 0
    assert pq_mean([0.0, 3.0], 2.0, -0.4) == 0.0
    assert pq_mean([0.0, 0.0, 1.0], 5.0, -1.0) == 0.0


def test_pq_mean_infinite_parameters():
    x = np.array([0.5, 2.0, 1.0])
    assert pq_mean(x, math.inf, 1.0) == 2.0
    assert pq_mean(x, 2.0, -math.inf) == 0.5


def test_pq_mean_is_continuous_at_q_zero():
    x = np.array([0.4, 1.3, 2.2])
    lim = pq_mean(x, 2.0, 1e-11)
    assert lim == pytest.approx(p_mean(x, 2.0), rel=1e-6)


def test_classify_mean():
    assert classify_mean(MeanSpec(MeanKind.P_MEAN, p=1.0)).value == Schur2Value.SCHUR2_CONCAVE
    assert classify_mean(MeanSpec(MeanKind.P_MEAN, p=3.0)).value == Schur2Value.SCHUR2_CONVEX
    c2 = classify_mean(MeanSpec(MeanKind.P_MEAN, p=2.0))
    assert c2.value == Schur2Value.SCHUR2_CONVEX and c2.spherical
    assert classify_mean(MeanSpec(MeanKind.PQ_MEAN, p=2.0, q=-0.4)).value == Schur2Value.SCHUR2_CONCAVE
    assert classify_mean(MeanSpec(MeanKind.PQ_MEAN, p=5.0, q=1.0)).value == Schur2Value.SCHUR2_CONVEX
    assert classify_mean(MeanSpec(MeanKind.PQ_MEAN, p=5.0, q=-1.0)).value == Schur2Value.NEITHER_KNOWN
    assert classify_mean(MeanSpec(MeanKind.PQ_MEAN, p=0.7, q=0.7)).value == Schur2Value.NEITHER_KNOWN


def _sign_at(p, q, u):
    # evaluate the comparator with i the larger and j the smaller coordinate
    i, j = int(np.argmax(u)), int(np.argmin(u))
    return schur_ostrowski_sign(p, q, u, i, j)


def test_schur_ostrowski_sign_agrees_with_classification():
    # differential comparator on squared coordinates: a concave-classified
    # mean must never show a positive sign at u_i > u_j, and vice versa
    rng = np.random.default_rng(4)
    for p, q, expected in [(2.0, -0.4, -1), (5.0, 1.0, 1)]:
        signs = set()
        for _ in range(200):
            u = rng.random(3) + 1e-3
            signs.add(_sign_at(p, q, u))
        assert expected in signs
        assert -expected not in signs


def test_schur_ostrowski_sign_mixed_for_unordered_pairs():
    rng = np.random.default_rng(5)
    signs = set()
    for _ in range(500):
        u = rng.random(3) * 3 + 1e-3
        signs.add(_sign_at(5.0, -1.0, u))
    assert 1 in signs and -1 in signs


def test_equal_parameter_mean_is_neither_monotone():
    # p = q sits outside the comparator's domain; check directly that moving
    # mass toward the top squared coordinate can move the mean either way
    rng = np.random.default_rng(6)
    signs = set()
    for _ in range(500):
        sq = np.sort(rng.random(3) * 4 + 1e-3)[::-1]
        shifted = sq.copy()
        d = rng.random() * shifted[1]
        shifted[0] += d
        shifted[1] -= d  # squares now majorize the originals
        diff = (pq_mean(np.sqrt(shifted), 0.7, 0.7)
                - pq_mean(np.sqrt(sq), 0.7, 0.7))
        if abs(diff) > 1e-12:
            signs.add(1 if diff > 0 else -1)
    assert signs == {1, -1}
