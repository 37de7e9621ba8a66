"""Line/set intersection times for convex primitives.

Every set in the package is a finite union of convex pieces, and a line
``x + t v`` meets a closed convex piece in one closed interval of ``t``. The
functions here return that interval for a batch of base points as two arrays
``(lo, hi)``; an empty intersection is encoded as ``lo > hi``.
"""

import math

import numpy as np

PARALLEL_TOL = 1e-12
TANGENCY_TOL = 1e-12

_EMPTY = (np.inf, -np.inf)
# intervals that touch the line in one point may come out with lo a few ulps
# above hi; they are kept
DEGENERATE_TOL = 1e-11


def rows_interval(A, b, X, v):
    """Times with ``A (x + t v) <= b`` for every row (unit-normalized rows)."""
    X = np.atleast_2d(X)
    n = X.shape[0]
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    if A.shape[0] == 0:
        return lo, hi
    slack = b[None, :] - X @ A.T
    av = A @ v
    for j, a in enumerate(av):
        if a > PARALLEL_TOL:
            hi = np.minimum(hi, slack[:, j] / a)
        elif a < -PARALLEL_TOL:
            lo = np.maximum(lo, slack[:, j] / a)
        else:
            bad = slack[:, j] < -PARALLEL_TOL
            lo = np.where(bad, np.inf, lo)
            hi = np.where(bad, -np.inf, hi)
    return lo, hi


def quadratic_interval(qa, qb, qc):
    """Times with ``qa t^2 + qb t + qc <= 0`` where ``qa >= 0`` (convex in t).

    Roots use the cancellation-free pairing ``q = -(b + sign(b) sqrt(D)) / 2``,
    ``t1 = q / a``, ``t2 = c / q``.
    """
    qa, qb, qc = np.broadcast_arrays(
        np.asarray(qa, float), np.asarray(qb, float), np.asarray(qc, float)
    )
    n = qb.shape[0]
    if n == 1:
        lo, hi = _quadratic_scalar(float(qa[0]), float(qb[0]), float(qc[0]))
        return np.array([lo]), np.array([hi])
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    lin = qa <= 0.0
    # linear case: qb t + qc <= 0
    if np.any(lin):
        b_, c_ = qb[lin], qc[lin]
        l_ = np.full(b_.shape, -np.inf)
        h_ = np.full(b_.shape, np.inf)
        pos, neg, flat = b_ > PARALLEL_TOL, b_ < -PARALLEL_TOL, np.abs(b_) <= PARALLEL_TOL
        h_[pos] = -c_[pos] / b_[pos]
        l_[neg] = -c_[neg] / b_[neg]
        bad = flat & (c_ > PARALLEL_TOL)
        l_[bad], h_[bad] = _EMPTY
        lo[lin], hi[lin] = l_, h_
    quad = ~lin
    if np.any(quad):
        a_, b_, c_ = qa[quad], qb[quad], qc[quad]
        disc = b_ * b_ - 4.0 * a_ * c_
        l_ = np.full(a_.shape, np.inf)
        h_ = np.full(a_.shape, -np.inf)
        tangent = np.abs(disc) <= TANGENCY_TOL
        l_[tangent] = h_[tangent] = -b_[tangent] / (2.0 * a_[tangent])
        two = disc > TANGENCY_TOL
        if np.any(two):
            a2, b2, c2 = a_[two], b_[two], c_[two]
            sq = np.sqrt(disc[two])
            q = -0.5 * (b2 + np.where(b2 >= 0, sq, -sq))
            r1 = q / a2
            with np.errstate(divide="ignore", invalid="ignore"):
                r2 = np.where(q != 0, c2 / q, -r1)
            l_[two] = np.minimum(r1, r2)
            h_[two] = np.maximum(r1, r2)
        lo[quad], hi[quad] = l_, h_
    return lo, hi


def _quadratic_scalar(a, b, c):
    # same rules as the vectorized path, without array overhead
    if a <= 0.0:
        if b > PARALLEL_TOL:
            return -math.inf, -c / b
        if b < -PARALLEL_TOL:
            return -c / b, math.inf
        return _EMPTY if c > PARALLEL_TOL else (-math.inf, math.inf)
    disc = b * b - 4.0 * a * c
    if abs(disc) <= TANGENCY_TOL:
        r = -b / (2.0 * a)
        return r, r
    if disc < 0:
        return _EMPTY
    sq = math.sqrt(disc)
    q = -0.5 * (b + (sq if b >= 0 else -sq))
    r1 = q / a
    r2 = c / q if q != 0 else -r1
    return min(r1, r2), max(r1, r2)


def ball_interval(c, r, X, v):
    X = np.atleast_2d(X)
    w = X - c[None, :]
    qa = np.full(X.shape[0], float(v @ v))
    qb = 2.0 * (w @ v)
    qc = np.einsum("ij,ij->i", w, w) - r * r
    lo, hi = quadratic_interval(qa, qb, qc)
    # points already inside keep t = 0 admissible despite rounding in the roots
    inside = qc <= 0.0
    lo = np.where(inside, np.minimum(lo, 0.0), lo)
    hi = np.where(inside, np.maximum(hi, 0.0), hi)
    return lo, hi


def first_nonnegative(pieces):
    """Least ``t >= 0`` in the union of the piece intervals (``inf`` if none)."""
    best = None
    for lo, hi in pieces:
        t = np.maximum(lo, 0.0)
        with np.errstate(invalid="ignore"):
            t = np.where(t <= hi + DEGENERATE_TOL * (1.0 + np.abs(t)), t, np.inf)
        best = t if best is None else np.minimum(best, t)
    return best


def infimum(pieces):
    """Infimum of the union of the piece intervals (``inf`` if empty)."""
    best = None
    for lo, hi in pieces:
        with np.errstate(invalid="ignore"):
            t = np.where(lo <= hi + DEGENERATE_TOL * (1.0 + np.abs(lo)), lo, np.inf)
        best = t if best is None else np.minimum(best, t)
    return best


def merge(pieces_at_point):
    """Sorted disjoint closed intervals from ``[(lo, hi), ...]`` scalars."""
    ivs = sorted((lo, hi) for lo, hi in pieces_at_point if lo <= hi)
    out = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out
