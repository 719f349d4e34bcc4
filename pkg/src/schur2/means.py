"""Power means of absolute coordinates, truncated variants, the two-parameter
ratio-power (p,q)-mean, and their squared-coordinate convexity classification.

All means use the 1/k normalization, so the all-ones vector has every mean
equal to 1.  Limit conventions for p in {-inf, 0, +inf} and for vanishing
coordinates follow continuity: in particular a p-mean with p < 0 is 0 as soon
as one coordinate is 0, and the (p,q)-mean with q < 0 < p vanishes on the
coordinate axes.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "MeanKind",
    "Tail",
    "MeanSpec",
    "Schur2Value",
    "SchurCharacter",
    "p_mean",
    "p_mean_rows",
    "truncated_mean",
    "pq_mean",
    "pq_mean_rows",
    "classify_mean",
    "schur_ostrowski_sign",
]


class MeanKind(Enum):
    P_MEAN = "p_mean"
    PQ_MEAN = "pq_mean"
    TRUNCATED = "truncated"


class Tail(Enum):
    SMALLEST = "smallest"
    LARGEST = "largest"


class Schur2Value(Enum):
    SCHUR2_CONCAVE = "schur2_concave"
    SCHUR2_CONVEX = "schur2_convex"
    NEITHER_KNOWN = "neither_known"


@dataclass(frozen=True)
class SchurCharacter:
    value: Schur2Value
    spherical: bool = False  # True for the Euclidean case: both at once


@dataclass(frozen=True)
class MeanSpec:
    kind: MeanKind
    p: float
    q: float = None
    ell: int = None
    tail: Tail = None

    def __post_init__(self):
        if self.kind is MeanKind.PQ_MEAN and self.q is not None and self.p < self.q:
            # the (p,q)-mean is symmetric in (p,q); normalize to p >= q
            object.__setattr__(self, "p", self.q)
            object.__setattr__(self, "q", self.p)


def p_mean_rows(X, p):
    """p-mean of |row| for each row of X, shape (n, k) -> (n,).

    Max/min-factoring keeps every finite-p evaluation in a bounded range, so
    no separate overflow branch is needed for large |p|.
    """
    A = np.abs(np.atleast_2d(np.asarray(X, dtype=float)))
    n, k = A.shape
    out = np.zeros(n)
    if p == math.inf:
        return A.max(axis=1)
    if p == -math.inf:
        return A.min(axis=1)
    has_zero = (A == 0.0).any(axis=1)
    if p == 0.0:
        ok = ~has_zero
        if ok.any():
            out[ok] = np.exp(np.mean(np.log(A[ok]), axis=1))
        return out
    if p < 0.0:
        ok = ~has_zero
        if ok.any():
            m = A[ok].min(axis=1)
            r = A[ok] / m[:, None]  # r >= 1, r**p <= 1
            out[ok] = m * np.mean(r**p, axis=1) ** (1.0 / p)
        return out
    # p > 0
    m = A.max(axis=1)
    ok = m > 0.0
    if ok.any():
        r = A[ok] / m[ok][:, None]  # r in [0, 1]
        out[ok] = m[ok] * np.mean(r**p, axis=1) ** (1.0 / p)
    return out


def p_mean(x, p):
    """p-mean of the absolute coordinates of a single vector."""
    return float(p_mean_rows(np.asarray(x, dtype=float)[None, :], p)[0])


def truncated_mean(x, ell, tail, p):
    """p-mean of the ell smallest or largest absolute coordinate values."""
    a = np.sort(np.abs(np.asarray(x, dtype=float)))
    k = a.size
    if not 1 <= ell <= k:
        raise ValueError(f"ell must be in 1..{k}, got {ell}")
    part = a[:ell] if tail is Tail.SMALLEST else a[k - ell:]
    return p_mean(part, p)


def _log_power_sum(logr, expnt):
    """log sum_j r_j**expnt for rows of scaled magnitudes r = A/m.

    logr is (n, k) with -inf marking zero coordinates; the convention
    0**0 = 1 makes zeros contribute a unit term when expnt == 0.
    """
    if expnt == 0.0:
        return np.full(logr.shape[0], math.log(logr.shape[1]))
    terms = expnt * logr  # zeros: expnt>0 -> -inf (drop), expnt<0 handled upstream
    return logsumexp(terms, axis=1)


def pq_mean_rows(X, p, q):
    """(p,q)-mean of |row| for each row of X, shape (n, k) -> (n,)."""
    if p < q:
        p, q = q, p
    A = np.abs(np.atleast_2d(np.asarray(X, dtype=float)))
    n, k = A.shape
    if p == math.inf:
        return A.max(axis=1)
    if q == -math.inf:
        return A.min(axis=1)
    out = np.zeros(n)
    has_zero = (A == 0.0).any(axis=1)
    all_zero = (A == 0.0).all(axis=1)
    if p == q:
        # weighted geometric mean with self-weights |x_j|^p / sum |x_i|^p
        ok = ~all_zero
        if q <= 0.0:
            # weight mass concentrates on zero coordinates (q < 0), or the
            # plain geometric mean vanishes at a zero coordinate (q == 0)
            ok &= ~has_zero
        if ok.any():
            B = A[ok]
            m = B.max(axis=1)
            with np.errstate(divide="ignore"):
                logr = np.log(B / m[:, None])
            if p == 0.0:
                w = np.full_like(B, 1.0 / k)
            else:
                t = np.exp(p * (logr - logr.min(axis=1, keepdims=True))) if p < 0.0 \
                    else np.exp(p * logr)
                w = t / t.sum(axis=1, keepdims=True)
            logs = np.where(np.isneginf(logr), 0.0, logr)  # 0^0 = 1 at zero weight
            out[ok] = m * np.exp(np.sum(w * logs, axis=1))
        return out
    # p > q, both finite
    ok = ~all_zero
    if q < 0.0:
        ok &= ~has_zero  # sum |x|^q diverges -> mean 0
    if ok.any():
        B = A[ok]
        if q < 0.0:
            m = np.exp(np.mean(np.log(B), axis=1))  # geometric center scale
        else:
            m = B.max(axis=1)
        with np.errstate(divide="ignore"):
            logr = np.log(B / m[:, None])
        ls_p = _log_power_sum(logr, p)
        ls_q = _log_power_sum(logr, q)
        out[ok] = m * np.exp((ls_p - ls_q) / (p - q))
    return out


def pq_mean(x, p, q):
    """(p,q)-mean of a single vector."""
    return float(pq_mean_rows(np.asarray(x, dtype=float)[None, :], p, q)[0])


def classify_mean(spec):
    """Squared-coordinate convexity character of a mean functional."""
    if spec.kind is MeanKind.P_MEAN:
        if spec.p == 2.0:
            return SchurCharacter(Schur2Value.SCHUR2_CONVEX, spherical=True)
        if spec.p < 2.0:
            return SchurCharacter(Schur2Value.SCHUR2_CONCAVE)
        return SchurCharacter(Schur2Value.SCHUR2_CONVEX)
    if spec.kind is MeanKind.PQ_MEAN:
        p, q = (spec.p, spec.q) if spec.p >= spec.q else (spec.q, spec.p)
        if (p, q) == (2.0, 0.0):
            return SchurCharacter(Schur2Value.SCHUR2_CONVEX, spherical=True)
        if q <= 0.0 <= p <= 2.0:
            return SchurCharacter(Schur2Value.SCHUR2_CONCAVE)
        if 0.0 <= q <= 2.0 <= p:
            return SchurCharacter(Schur2Value.SCHUR2_CONVEX)
        return SchurCharacter(Schur2Value.NEITHER_KNOWN)
    if spec.kind is MeanKind.TRUNCATED:
        if spec.tail is Tail.SMALLEST and spec.p <= 2.0:
            return SchurCharacter(Schur2Value.SCHUR2_CONCAVE)
        if spec.tail is Tail.LARGEST and spec.p >= 2.0:
            return SchurCharacter(Schur2Value.SCHUR2_CONVEX)
        return SchurCharacter(Schur2Value.NEITHER_KNOWN)
    raise ValueError(f"unknown mean kind {spec.kind}")


def schur_ostrowski_sign(p, q, u, i, j, rtol=1e-12):
    """Sign of (d/du_i - d/du_j) of the (p,q)-mean composed with sqrt.

    Uses the derivative expression p*u_i^(p/2-1)*sum(u^(q/2))
    - q*u_i^(q/2-1)*sum(u^(p/2)), which equals the partial derivative up to
    an i-independent positive factor (valid for p > q, u > 0).
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0):
        raise ValueError("coordinates must be strictly positive")
    if not p > q:
        raise ValueError("requires p > q")
    sp = np.sum(u ** (p / 2.0))
    sq = np.sum(u ** (q / 2.0))

    def expr(idx):
        return p * u[idx] ** (p / 2.0 - 1.0) * sq - q * u[idx] ** (q / 2.0 - 1.0) * sp

    d = expr(i) - expr(j)
    scale = abs(expr(i)) + abs(expr(j)) + 1.0
    if abs(d) <= rtol * scale:
        return 0
    return 1 if d > 0 else -1
