"""Brute-force references that use nothing but membership tests.

These are deliberately slow and simple: minimal time by scanning the ray,
location problems by exhaustive grids, derivatives by difference quotients,
normal cones by rejection sampling of dual directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from . import geometry as geo
from .mintime import check_direction, min_time_many

CHUNK = 200_000
REFINE = 100
FD_STEPS = (1e-3, 1e-4, 1e-5, 1e-6)
STRICT_STEPS = 100_000
STRICT_CHUNK = 1000
STRICT_WINDOW = 1000


# -- minimal time by ray scanning ---------------------------------------------


def _scan(s, x, v, lo, hi, h, tol, vn):
    """First time in ``[lo, hi]`` where the ray meets ``s``, or None."""
    eps = max(geo.EPS, h * vn)
    n_total = int(math.ceil((hi - lo) / h)) + 1
    start = 0
    while start < n_total:
        k = np.arange(start, min(start + CHUNK, n_total))
        t = np.minimum(lo + k * h, hi)
        hits = np.flatnonzero(s.contains_many(x[None, :] + t[:, None] * v[None, :], eps))
        for idx in hits:
            tk = t[idx]
            if h <= 10 * tol * (1 + 1e-9) and h * vn <= geo.EPS * (1 + 1e-9):
                return _finish(s, x, v, max(lo, tk - h), tk, tol, eps)
            found = _scan(s, x, v, max(lo, tk - h), min(hi, tk + h), h / REFINE, tol, vn)
            if found is not None:
                return found
        start += CHUNK
    return None


def _first_hit(s, x, v, a, h, steps, e):
    for k0 in range(0, steps, STRICT_CHUNK):
        t = a + h * np.arange(k0 + 1, min(k0 + STRICT_CHUNK, steps) + 1)
        hits = np.flatnonzero(s.contains_many(x[None, :] + t[:, None] * v[None, :], e))
        if hits.size:
            return float(t[hits[0]])
    return None


def _finish(s, x, v, a, b, tol, eps):
    """Bisection on exact membership, falling back to looser tests for thin sets.

    A membership tolerance ``e`` shifts the entry time by ``e / |<a, v>|`` on a
    face with normal ``a``, which is large when the ray nearly grazes the face.
    The bracket from the inflated scan is pushed forward to the first point
    inside with tolerance ``EPS`` and then to the first point strictly inside,
    provided the latter follows within ``STRICT_WINDOW`` steps of ``10 * tol``; otherwise the
    line only touches the set there and the ``EPS`` bracket is kept.
    """

    def inside(t, e):
        return bool(s.contains_many((x + t * v)[None, :], e)[0])

    h = b - a
    e = eps
    t1 = _first_hit(s, x, v, a, h, STRICT_STEPS, geo.EPS)
    if t1 is not None:
        b, e = t1, geo.EPS
        a = max(a, b - h)
        hs = max(h, 10 * tol)
        t0 = _first_hit(s, x, v, a, hs, STRICT_WINDOW, 0.0)
        if t0 is not None:
            b, e = t0, 0.0
            a = max(a, b - hs)
    if inside(a, e):
        return a
    while b - a > tol:
        m = 0.5 * (a + b)
        if inside(m, e):
            b = m
        else:
            a = m
    return b


def oracle_min_time(s, v, x, t_max: float = 1e3, tol: float = 1e-8, step: float = 1e-3) -> float:
    """Minimal time by scanning ``[0, t_max]`` and bisecting the first entry.

    The scan uses membership inflated by the step length, so features thinner
    than a step are still bracketed; brackets are refined by factors of 100
    until the step is at most ``10 * tol`` and the inflation at most ``EPS``.
    """
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    if t_max <= 0 or tol <= 0:
        raise ValueError("t_max and tol must be positive")
    if geo.contains(s, x):
        return 0.0
    vn = float(np.linalg.norm(v))
    found = _scan(s, x, v, 0.0, t_max, step, tol, vn)
    return math.inf if found is None else float(found)


# -- grid minimization --------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    lo: np.ndarray
    hi: np.ndarray
    cells_per_axis: int

    def __post_init__(self):
        lo = np.asarray(self.lo, float).reshape(-1)
        hi = np.asarray(self.hi, float).reshape(-1)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("grid needs lo < hi componentwise")
        if self.cells_per_axis < 2:
            raise ValueError("cells_per_axis must be at least 2")
        if (self.cells_per_axis + 1) ** lo.size > 1e7:
            raise ValueError("grid exceeds 10^7 nodes")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def nodes(self) -> np.ndarray:
        axes = [np.linspace(a, b, self.cells_per_axis + 1) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])

    def to_dict(self):
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist(), "cells_per_axis": self.cells_per_axis}


def objective_many(problem, X) -> np.ndarray:
    vals = np.array([min_time_many(t.set, t.direction, X) for t in problem.targets])
    if problem.objective == "sum":
        return vals.sum(axis=0)
    return vals.max(axis=0)


def oracle_grid_min(problem, grid: GridSpec):
    """Best feasible grid node and its objective value, or None if none is feasible."""
    X = grid.nodes()
    X = X[problem.constraint.contains_many(X)]
    if X.shape[0] == 0:
        return None
    vals = objective_many(problem, X)
    if not np.any(np.isfinite(vals)):
        return None
    i = int(np.argmin(vals))
    return X[i], float(vals[i])


# -- finite differences ------------------------------------------------------


def _perturbations(d: int, seed: int, k: int = 8) -> np.ndarray:
    if d == 2:
        ang = np.arange(k) * 2 * np.pi / k
        return np.column_stack([np.cos(ang), np.sin(ang)])
    w = np.random.default_rng(seed).normal(size=(k, d))
    return w / np.linalg.norm(w, axis=1)[:, None]


def fd_directional(s, v, x, u, seed: int = 0) -> float:
    """Finite-net approximation of the lower Dini-Hadamard derivative.

    At each step ``t`` the quotient is minimized over ``u`` and eight
    directions at distance ``t**2`` from it. The radius shrinks faster than
    ``t`` so that on Lipschitz pieces the perturbation adds at most
    ``L * t**2`` to the quotient.
    """
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    u = geo.as_point(u, s.dim, "u")
    t0 = float(min_time_many(s, v, x[None, :])[0])
    if not math.isfinite(t0):
        return math.inf
    W = _perturbations(s.dim, seed)
    best = math.inf
    for t in FD_STEPS:
        U = np.vstack([u, u[None, :] + t * t * W])
        vals = min_time_many(s, v, x[None, :] + t * U)
        if not np.all(np.isfinite(vals)):
            return math.inf
        best = min(best, float(np.min((vals - t0) / t)))
    return best


# -- sampled normal cone -------------------------------------------------------


def sampled_normal_cone(
    s, x, n: int = 4000, seed: int = 0, m: int = 2000, radii=(1e-2, 1e-3), accept: float = 1e-2
) -> np.ndarray:
    """Unit directions ``w`` with ``<w, y - x> <= accept * |y - x|`` on nearby set points."""
    x = geo.check_dim(s, x)
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(n, s.dim))
    W /= np.linalg.norm(W, axis=1)[:, None]
    worst = []
    for rho in radii:
        Y = geo.sample_near(s, x, rho, m, rng) - x[None, :]
        dist = np.linalg.norm(Y, axis=1)
        Y = Y[dist > 1e-3 * rho] / dist[dist > 1e-3 * rho, None]
        if Y.shape[0] == 0:
            raise ValueError("no set points found near x")
        worst.append(np.max(W @ Y.T, axis=1))
    worst = np.array(worst)
    ok = np.all(worst <= accept, axis=0) & np.all(np.diff(worst, axis=0) <= 1e-3, axis=0)
    return W[ok]


def cone_angle(cone, w) -> float:
    """Angle in radians between unit ``w`` and a generated cone."""
    w = np.asarray(w, float)
    cols = [cone.generators, cone.lineality, -cone.lineality]
    M = np.vstack([c for c in cols if c.shape[0]]) if any(c.shape[0] for c in cols) else None
    if M is None:
        return math.pi / 2
    _, res = nnls(M.T, w)
    return float(np.arcsin(min(1.0, res / np.linalg.norm(w))))
