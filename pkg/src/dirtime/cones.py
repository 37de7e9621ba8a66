"""Tangent and normal cones at a point of a supported set.

Convex variants get exact closed forms from their active constraints. Catalog
sets carry their own formulas (see :mod:`dirtime.catalog`). For user unions the
contingent and Fréchet cones follow from the members containing the point; the
limiting cone is estimated from sampled nearby boundary points and flagged as
an inner approximation.
"""

from __future__ import annotations

import numpy as np

from . import geometry as geo
from .geometry import Ball, Implicit2D, Union
from .polyhedral import ConeFamily, GeneratedCone

LIMIT_RADII = (1e-3, 1e-5)
LIMIT_SAMPLES = 400


def normal_cone_convex(s, x, eps: float = geo.EPS) -> GeneratedCone:
    """Normal cone of convex analysis."""
    geo.require_convex(s, "normal_cone_convex")
    x = geo.require_member(s, x, eps)
    return _convex_normal(s, x, eps)


def _convex_normal(s, x, eps=geo.EPS) -> GeneratedCone:
    d = s.dim
    if isinstance(s, Ball):
        w = x - s.c
        if np.linalg.norm(w) >= s.r - eps:
            return GeneratedCone.ray(w)
        return GeneratedCone.zero(d)
    act = s.active(x, eps)
    return GeneratedCone(act, np.zeros((0, d)), d)


def contingent_cone(s, x, eps: float = geo.EPS) -> ConeFamily:
    """Bouligand contingent cone ``K(x; s)``."""
    x = geo.require_member(s, x, eps)
    if isinstance(s, geo.CONVEX_TYPES):
        return ConeFamily.single(_convex_normal(s, x, eps).polar())
    if isinstance(s, Implicit2D):
        return s.entry.contingent(s.local(x))
    parts = [
        _convex_normal(m, x, eps).polar()
        for m in s.members
        if m.contains_many(x[None, :], eps)[0]
    ]
    return ConeFamily(tuple(parts))


def dini_normal_cone(s, x, eps: float = geo.EPS) -> GeneratedCone:
    """Polar of the contingent cone."""
    if isinstance(s, geo.CONVEX_TYPES):
        return normal_cone_convex(s, x, eps)
    return contingent_cone(s, x, eps).polar()


def frechet_normal_cone(s, x, eps: float = geo.EPS) -> GeneratedCone:
    """Fréchet normal cone.

    For unions this is the intersection of the member normal cones over the
    members that contain ``x``.
    """
    x = geo.require_member(s, x, eps)
    if isinstance(s, geo.CONVEX_TYPES):
        return _convex_normal(s, x, eps)
    if isinstance(s, Implicit2D):
        return s.entry.frechet(s.local(x))
    return _union_frechet(s, x, eps)


def _union_frechet(s: Union, x, eps=geo.EPS) -> GeneratedCone:
    out = None
    for m in s.members:
        if m.contains_many(x[None, :], eps)[0]:
            n = _convex_normal(m, x, eps)
            out = n if out is None else out.intersect(n)
    return out


def limiting_normal_cone(s, x, eps: float = geo.EPS, seed: int = 0) -> ConeFamily:
    """Limiting (Mordukhovich) normal cone as a finite union of cones."""
    x = geo.require_member(s, x, eps)
    if isinstance(s, geo.CONVEX_TYPES):
        return ConeFamily.single(_convex_normal(s, x, eps))
    if isinstance(s, Implicit2D):
        return s.entry.limiting(s.local(x))
    return _union_limiting(s, x, eps, seed)


def _active_pattern(s: Union, y, eps):
    """Which members contain ``y`` and which of their constraints are tight."""
    pattern = []
    for i, m in enumerate(s.members):
        if not m.contains_many(y[None, :], eps)[0]:
            continue
        if isinstance(m, Ball):
            tight = (0,) if np.linalg.norm(y - m.c) >= m.r - eps else ()
        else:
            tight = tuple(np.flatnonzero(np.abs(m.A @ y - m.rhs) <= eps))
        pattern.append((i, tight))
    return tuple(pattern)


def _pattern_cone(s: Union, x, pattern) -> GeneratedCone:
    """Fréchet cone of the stratum with ``pattern``, transported to ``x``."""
    d = s.dim
    out = None
    for i, tight in pattern:
        m = s.members[i]
        if not tight:
            n = GeneratedCone.zero(d)
        elif isinstance(m, Ball):
            n = GeneratedCone.ray(x - m.c)
        else:
            n = GeneratedCone(m.A[list(tight)], np.zeros((0, d)), d)
        out = n if out is None else out.intersect(n)
    return out


def _union_limiting(s: Union, x, eps, seed) -> ConeFamily:
    rng = np.random.default_rng(seed)
    parts = [_union_frechet(s, x, eps)]
    seen = set()
    for rho in LIMIT_RADII:
        for y in geo.boundary_near(s, x, rho, LIMIT_SAMPLES, rng):
            pat = _active_pattern(s, y, 1e-12)
            if not pat or pat in seen:
                continue
            seen.add(pat)
            # strata must reach x: every tight constraint is also tight at x
            if _pattern_reaches(s, x, pat, eps):
                parts.append(_pattern_cone(s, x, pat))
    return ConeFamily(tuple(GeneratedCone(p.generators, p.lineality, p.dim, False) for p in parts), exact=False)


def _pattern_reaches(s: Union, x, pattern, eps) -> bool:
    for i, tight in pattern:
        m = s.members[i]
        if not m.contains_many(x[None, :], eps)[0]:
            return False
        if isinstance(m, Ball):
            if tight and np.linalg.norm(x - m.c) < m.r - eps:
                return False
        elif tight and np.any(np.abs(m.A[list(tight)] @ x - m.rhs[list(tight)]) > eps):
            return False
    return True
