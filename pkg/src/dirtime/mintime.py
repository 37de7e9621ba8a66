"""Directional minimal time ``T_v``, its scalarization ``phi_v`` and relatives.

Every supported set is a finite union of convex pieces, and a line meets a
closed convex piece in a closed interval of times. ``T`` is the least
nonnegative time in the union of those intervals and ``phi`` its infimum, so
both are exact and vectorize over batches of base points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cones
from . import geometry as geo
from .errors import InvalidDirection, NotInDomain
from .intervals import first_nonnegative, infimum, merge, rows_interval

CONTINUITY_GAMMAS = (1e-3, 1e-2, 1e-1)


def check_direction(s, v) -> np.ndarray:
    v = geo.as_point(v, s.dim, "direction")
    if not np.any(v):
        raise InvalidDirection("direction must be nonzero")
    return v


def min_time_many(s, v, X) -> np.ndarray:
    """``T_v(x; s)`` for each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, float))
    t = first_nonnegative(s.pieces(X, v))
    # membership up to the set tolerance counts as t = 0
    return np.where(s.contains_many(X), 0.0, t)


def scalarization_many(s, v, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, float))
    return infimum(s.pieces(X, v))


def min_time(s, v, x) -> float:
    """``T_v(x; s) = inf{t >= 0 : x + t v in s}``."""
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    return float(min_time_many(s, v, x[None, :])[0])


def scalarization(s, v, x) -> float:
    """``phi_v(x; s) = inf{t in R : x + t v in s}``."""
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    return float(scalarization_many(s, v, x[None, :])[0])


def in_domain(s, v, x) -> bool:
    return math.isfinite(min_time(s, v, x))


@dataclass(frozen=True)
class ProjectionResult:
    t: float
    point: np.ndarray

    def to_dict(self):
        return {"t": self.t, "point": self.point.tolist()}


def projection_pi(s, v, x) -> ProjectionResult:
    """Attained point ``x + T(x) v``."""
    t = min_time(s, v, x)
    if not math.isfinite(t):
        raise NotInDomain("minimal time is infinite; no projection exists")
    x = np.asarray(x, float)
    return ProjectionResult(t, x + t * np.asarray(v, float))


def line_intervals(s, v, x) -> list:
    """Disjoint sorted closed intervals ``{t : x + t v in s}``."""
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    raw = [(float(lo[0]), float(hi[0])) for lo, hi in s.pieces(x[None, :], v)]
    return merge(raw)


# -- directional derivative ---------------------------------------------------


def cone_pieces(family, X, v):
    """Line intervals against every part of a cone family."""
    out = []
    for cone in family.parts:
        H, M = cone.inequalities, cone.equalities
        A = np.vstack([H, M, -M]) if M.shape[0] else H
        out.append(rows_interval(A, np.zeros(A.shape[0]), X, v))
    return out


@dataclass(frozen=True)
class DirectionalDerivative:
    value: float
    valid: bool
    base: str  # "in-set" or "projected"

    def to_dict(self):
        return {"value": self.value, "valid": self.valid, "base": self.base}


def directional_derivative(s, v, x, u) -> DirectionalDerivative:
    """Dini-Hadamard derivative of ``T`` at ``x`` along ``u`` via tangent cones.

    For ``x`` in the set this is ``T_v(u; K(x))``; outside it is
    ``phi_v(u; K(x~))`` at the projected point ``x~``, which equals the
    derivative when ``T`` is lower calm at ``x``. ``valid`` reports whether the
    local Lipschitz certificate (which implies lower calmness) holds.
    """
    from .lipschitz import _local_certificate

    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    u = geo.as_point(u, s.dim, "u")
    t = min_time(s, v, x)
    if not math.isfinite(t):
        raise NotInDomain("x is outside the domain of T")
    U = u[None, :]
    if geo.contains(s, x):
        K = cones.contingent_cone(s, x)
        val = float(first_nonnegative(cone_pieces(K, U, v))[0])
        base = "in-set"
    else:
        K = cones.contingent_cone(s, x + t * v)
        val = float(infimum(cone_pieces(K, U, v))[0])
        base = "projected"
    cert = _local_certificate(s, v, x)
    return DirectionalDerivative(val, cert.verdict == "lipschitz", base)


# -- continuity ---------------------------------------------------------------


@dataclass(frozen=True)
class ContinuityVerdict:
    verdict: str  # continuous | discontinuous | inconclusive
    evidence: str

    def __str__(self):
        return self.verdict


def _gap_pattern(s, v, x):
    """Detect a point of the set followed along ``v`` by a gap."""
    ivs = line_intervals(s, v, x)
    for k, (lo, hi) in enumerate(ivs):
        if lo <= 1e-12 and hi >= -1e-12:
            if hi <= 1e-12:
                if k + 1 < len(ivs):
                    return "gap-then-reentry"
                return "leaves-domain"
            return None
    return None


def _segment_interior(s, v, x, t, gamma, rng, n_ball=32):
    vn = np.linalg.norm(v)
    for tau in np.linspace(gamma / 16, gamma, 16):
        p = x + (t + tau) * v
        delta = 1e-3 * tau * vn
        g = rng.normal(size=(n_ball, s.dim))
        g /= np.linalg.norm(g, axis=1)[:, None]
        if not np.all(s.contains_many(p[None, :] + delta * g, 0.0)):
            return False
    return True


def continuity_probe(s, v, x, seed: int = 0, n: int = 256) -> ContinuityVerdict:
    """Three-valued continuity check of ``T`` at ``x``."""
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    t = min_time(s, v, x)
    if not math.isfinite(t):
        raise NotInDomain("x is outside the domain of T")
    rng = np.random.default_rng(seed)
    if t == 0.0:
        pat = _gap_pattern(s, v, x)
        if pat is not None:
            return ContinuityVerdict("discontinuous", pat)
    for gamma in CONTINUITY_GAMMAS:
        if _segment_interior(s, v, x, t, gamma, rng):
            return ContinuityVerdict("continuous", f"interior-segment gamma={gamma:g}")
    # empirical route: T varies at most linearly over shrinking neighborhoods
    ok = True
    for rho in (1e-3, 1e-4, 1e-5):
        Y = x[None, :] + rho * rng.uniform(-1.0, 1.0, size=(n, s.dim))
        dev = np.abs(min_time_many(s, v, Y) - t)
        if not np.all(dev <= 10.0 * rho * max(1.0, np.linalg.norm(v))):
            ok = False
            break
    if ok:
        return ContinuityVerdict("continuous", "sampled-modulus")
    return ContinuityVerdict("inconclusive", "no test applied")
