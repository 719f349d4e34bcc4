"""Critical values and power-matching shifts for p-mean tests.

The test rejects when the p-mean of |Z + shift| exceeds a critical value c.
critical_value calibrates c so the size at shift 0 equals alpha; shift_solution
finds the scalar t with power beta along a fixed direction u, relying on the
strict monotonicity of the power curve in t.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.stats import chi2, ncx2, norm

from .gauss_measure import GaussianShiftQuery, measure
from .means import p_mean
from .sets import p_ball

T_MAX = 1e3
BRACKET_RTOL = 1e-7
_QUAD_TARGET = 1e-7


def normalize_direction(u):
    """Scale u so its quadratic mean is 1 (not the Euclidean norm)."""
    u = np.asarray(u, dtype=float)
    m = p_mean(u, 2.0)
    if m <= 0.0:
        raise ValueError("direction must be nonzero")
    return u / m


@dataclass(frozen=True)
class TestDesign:
    __test__ = False  # not a test fixture, despite the name

    k: int
    p: float
    alpha: float
    beta: float
    u: tuple

    def __post_init__(self):
        if not 0.0 < self.alpha < self.beta < 1.0:
            raise ValueError("need 0 < alpha < beta < 1")
        u = np.asarray(self.u, dtype=float)
        if u.shape != (self.k,):
            raise ValueError("direction length must equal k")
        if abs(p_mean(u, 2.0) - 1.0) > 1e-12:
            raise ValueError("direction must have quadratic mean 1")
        object.__setattr__(self, "u", tuple(float(x) for x in u))


@dataclass(frozen=True)
class ShiftSolution:
    exists: bool
    t: float
    norm: float
    achieved_power: float
    solver_error: float


def _tail_closed(k, p, c, shift):
    """P(<Z + shift>_p > c) on the closed-form paths, else None."""
    s = np.asarray(shift, dtype=float)
    if k == 1:
        return 1.0 - (norm.cdf(c - s[0]) - norm.cdf(-c - s[0]))
    if p == 2.0:
        return float(ncx2.sf(k * c * c, k, float(s @ s)))
    if p == math.inf:
        return 1.0 - float(np.prod(norm.cdf(c - s) - norm.cdf(-c - s)))
    if p == -math.inf:
        return float(np.prod(norm.sf(c - s) + norm.cdf(-c - s)))
    return None


def has_closed_power(k, p):
    return k == 1 or p in (2.0, math.inf, -math.inf)


def tail_probability(k, p, c, shift, *, seed=0, workers=1,
                     target_rel_error=None):
    """P(<Z + shift>_p > c) with a propagated absolute error estimate."""
    closed = _tail_closed(k, p, c, shift)
    if closed is not None:
        return min(max(closed, 0.0), 1.0), 0.0
    q = GaussianShiftQuery(set=p_ball(k, p, c),
                           shift=-np.asarray(shift, dtype=float),
                           seed=seed, workers=workers,
                           target_rel_error=target_rel_error)
    est = measure(q)
    return min(max(1.0 - est.value, 0.0), 1.0), est.abs_error


def _quad_path(k, p):
    # SLICE_QUAD covers finite p > 0, POLAR2D covers every k = 2 set; the
    # rest (p <= 0 at k >= 3) falls through to Monte Carlo.
    return k <= 2 or (math.isfinite(p) and p > 0.0)


def critical_value(k, p, alpha, *, seed=0, workers=1):
    """The root c of P(<Z>_p > c) = alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if k == 1:
        return float(norm.ppf(1.0 - alpha / 2.0))
    if p == 2.0:
        return math.sqrt(chi2.ppf(1.0 - alpha, k) / k)
    if p == math.inf:
        return float(norm.ppf(0.5 * (1.0 + (1.0 - alpha) ** (1.0 / k))))
    if p == -math.inf:
        return float(norm.ppf(1.0 - alpha ** (1.0 / k) / 2.0))

    quad = _quad_path(k, p)
    target = _QUAD_TARGET if quad else None
    zero = np.zeros(k)

    def tail(c):
        return tail_probability(k, p, c, zero, seed=seed, workers=workers,
                                target_rel_error=target)[0]

    # tail(c) is strictly decreasing in c; bracket around the chi-square guess
    lo = hi = math.sqrt(chi2.ppf(1.0 - alpha, k) / k)
    for _ in range(60):
        if tail(lo) > alpha:
            break
        lo *= 0.5
    for _ in range(60):
        if tail(hi) < alpha:
            break
        hi *= 2.0
    if quad:
        return float(brentq(lambda c: tail(c) - alpha, lo, hi,
                            xtol=1e-10, rtol=1e-12))
    for _ in range(40):  # bisection is robust to correlated MC noise
        mid = 0.5 * (lo + hi)
        if tail(mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def shift_solution(d: TestDesign, *, seed=0, workers=1, c=None):
    """Find t with P(<Z + t u>_p > c_{p,alpha}) = beta, or report that the
    power curve stays below beta (possible for p < 0)."""
    if c is None:
        c = critical_value(d.k, d.p, d.alpha, seed=seed, workers=workers)
    u = np.asarray(d.u, dtype=float)
    target = _QUAD_TARGET if (_quad_path(d.k, d.p) or
                              has_closed_power(d.k, d.p)) else None

    def pw(t):
        # fixed seed across all t: common random numbers on MC paths
        return tail_probability(d.k, d.p, c, t * u, seed=seed,
                                workers=workers, target_rel_error=target)

    lo, p_lo = 0.0, d.alpha
    hi = 1.0
    p_hi, e_hi = pw(hi)
    while p_hi < d.beta and hi < T_MAX:
        lo, p_lo = hi, p_hi
        hi = min(2.0 * hi, T_MAX)
        p_hi, e_hi = pw(hi)
    if p_hi < d.beta:
        slope = (p_hi - p_lo) / max(hi - lo, 1e-30)
        if slope < 1e-12 or hi >= T_MAX:
            return ShiftSolution(False, math.nan, math.nan, p_hi,
                                 max(e_hi, 1e-12))
    while hi - lo > BRACKET_RTOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        pm, _ = pw(mid)
        if pm < d.beta:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    achieved, err = pw(t)
    solver_error = max(err, abs(achieved - d.beta), 0.5 * (hi - lo))
    s_norm = t * float(np.linalg.norm(u))
    return ShiftSolution(True, float(t), s_norm, achieved, solver_error)
