"""Lipschitz certificates for ``T_v``.

Verdicts are three-valued. A cone test only turns into ``lipschitz`` when the
cone it inspects is exact, and into ``not_lipschitz`` only when the cone
condition is also necessary under hypotheses we can verify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cones
from . import geometry as geo
from .errors import NotInDomain
from .mintime import check_direction, min_time, min_time_many
from .polyhedral import ConeFamily, GeneratedCone

MARGIN = 1e-12
PAIR_RADII = (1e-1, 1e-2, 1e-3)


@dataclass(frozen=True)
class LipschitzReport:
    verdict: str  # lipschitz | not_lipschitz | inconclusive
    constant: float | None
    evidence: str
    empirical_ratio: float
    excluded_pairs: int = 0
    seed: int = 0

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "constant": self.constant,
            "evidence": self.evidence,
            "empirical_ratio": self.empirical_ratio,
            "excluded_pairs": self.excluded_pairs,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class _Certificate:
    verdict: str
    evidence: str
    cone: ConeFamily = field(repr=False)
    base: np.ndarray = field(repr=False)


def v_in_recession(s, v) -> tuple[bool, bool]:
    """``(v in Omega_inf, the answer is exact)``.

    For inner-approximated cones a positive answer is still sound.
    """
    cone = geo.recession_cone(s)
    inside = cone.contains(v)
    return inside, cone.exact or inside


def plus_trivial(family: ConeFamily, v) -> bool:
    """``{v}^+ cap C = {0}``: pointed parts whose generators all point against v."""
    for part in family.parts:
        c = part.canonical()
        if c.lineality.shape[0]:
            return False
        if c.generators.shape[0] and np.any(c.generators @ v >= -MARGIN):
            return False
    return True


def _local_certificate(s, v, x) -> _Certificate:
    t = min_time(s, v, x)
    if not math.isfinite(t):
        raise NotInDomain("x is outside the domain of T")
    inside = t == 0.0
    base = x + t * v
    C = cones.limiting_normal_cone(s, base)
    where = "x" if inside else "projection"
    if plus_trivial(C, v):
        if C.exact:
            return _Certificate("lipschitz", f"normal-cone test at {where}: {{v}}^+ cap N = {{0}}", C, base)
        return _Certificate("inconclusive", "test passed on an inner approximation only", C, base)
    if inside:
        return _Certificate("not_lipschitz", "normal-cone test at x: {v}^+ cap N contains a nonzero vector", C, base)
    in_rec, exact = v_in_recession(s, v)
    if in_rec and exact:
        return _Certificate(
            "not_lipschitz", "normal-cone test at projection fails and v lies in the recession cone", C, base
        )
    return _Certificate(
        "inconclusive", "normal-cone test at projection fails but v is not in the recession cone", C, base
    )


def _pair_ratios(s, v, X, Y):
    tx = min_time_many(s, v, X)
    ty = min_time_many(s, v, Y)
    finite = np.isfinite(tx) & np.isfinite(ty)
    dist = np.linalg.norm(X - Y, axis=1)
    ok = finite & (dist > 0)
    ratios = np.abs(tx[ok] - ty[ok]) / dist[ok]
    return (float(ratios.max()) if ratios.size else 0.0), int(np.sum(~finite))


def empirical_ratio_local(s, v, x, n_pairs=10_000, seed=0):
    rng = np.random.default_rng(seed)
    per = max(n_pairs // len(PAIR_RADII), 1)
    best, excluded = 0.0, 0
    for rho in PAIR_RADII:
        X = x[None, :] + rho * rng.uniform(-1, 1, size=(per, s.dim))
        Y = x[None, :] + rho * rng.uniform(-1, 1, size=(per, s.dim))
        r, e = _pair_ratios(s, v, X, Y)
        best, excluded = max(best, r), excluded + e
    return best, excluded


def empirical_ratio_global(s, v, n_pairs=10_000, seed=0, radius=10.0, center=None):
    """Max difference quotient over short random pairs in a box around ``center``."""
    rng = np.random.default_rng(seed)
    c = np.zeros(s.dim) if center is None else np.asarray(center, float)
    X = c[None, :] + radius * rng.uniform(-1, 1, size=(n_pairs, s.dim))
    w = rng.normal(size=(n_pairs, s.dim))
    w /= np.linalg.norm(w, axis=1)[:, None]
    h = 10.0 ** rng.uniform(-4, 0, size=n_pairs)
    return _pair_ratios(s, v, X, X + h[:, None] * w)


def global_lipschitz(s, v, n_pairs: int = 10_000, seed: int = 0) -> LipschitzReport:
    """Global Lipschitz verdict with constant ``1 / dist(v, bd Omega_inf)``."""
    v = check_direction(s, v)
    K = geo.recession_cone(s).canonical()
    ratio, excl = empirical_ratio_global(s, v, n_pairs, seed)
    d = s.dim
    if K.lineality.shape[0] == d:
        return LipschitzReport("lipschitz", 0.0, "recession cone is the whole space", ratio, excl, seed)
    H, M = K.inequalities, K.equalities
    if M.shape[0] == 0 and H.shape[0]:
        margin = float(np.min(-(H @ v)))
        if margin > MARGIN:
            return LipschitzReport(
                "lipschitz", 1.0 / margin, "v interior to the recession cone", ratio, excl, seed
            )
    if K.exact:
        return LipschitzReport(
            "not_lipschitz", math.inf, "v not interior to the recession cone", ratio, excl, seed
        )
    return LipschitzReport(
        "inconclusive", math.inf, "interior test failed on an inner approximation", ratio, excl, seed
    )


def local_lipschitz(s, v, x, n_pairs: int = 10_000, seed: int = 0) -> LipschitzReport:
    """Local Lipschitz verdict near ``x`` from the limiting normal cone."""
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    cert = _local_certificate(s, v, x)
    ratio, excl = empirical_ratio_local(s, v, x, n_pairs, seed)
    return LipschitzReport(cert.verdict, None, cert.evidence, ratio, excl, seed)


# -- hypotheses ---------------------------------------------------------------


def epi_lipschitz(s, x, v, seed: int = 0, n: int = 400) -> str:
    """Epi-Lipschitz test at ``x`` in direction ``v``: ``"true"``, ``"false"`` or ``"inconclusive"``."""
    v = check_direction(s, v)
    x = geo.require_member(s, x)
    if isinstance(s, (geo.Halfspace, geo.Box, geo.Polytope)):
        act = s.active(x)
        return "true" if np.all(act @ v < -MARGIN) else "false"
    if isinstance(s, geo.Ball):
        w = x - s.c
        if np.linalg.norm(w) < s.r - geo.EPS or w @ v < 0:
            return "true"
        return "false"
    rng = np.random.default_rng(seed)
    fails = 0
    deltas = (1e-2, 1e-3, 1e-4)
    for delta in deltas:
        W = geo.sample_near(s, x, delta, n, rng)
        if W.shape[0] == 0:
            return "inconclusive"
        k = W.shape[0]
        U = v[None, :] + delta * rng.uniform(-1, 1, size=(k, s.dim))
        lam = delta * rng.uniform(0, 1, size=k)
        if np.all(s.contains_many(W + lam[:, None] * U, 1e-12)):
            return "true"
        fails += 1
    return "false" if fails == len(deltas) else "inconclusive"


def property_p_check(s, v, xt, r: float, seed: int = 0, n: int = 400, radius: float = 1e-2) -> str:
    """Sampled check of: ``x - t v`` leaves the set for ``t in (0, r]`` near ``xt``."""
    v = check_direction(s, v)
    xt = geo.check_dim(s, xt, "xt")
    if r <= 0:
        raise ValueError("r must be positive")
    rng = np.random.default_rng(seed)
    B = geo.boundary_near(s, xt, radius, n, rng)
    if B.shape[0] == 0:
        return "inconclusive"
    ts = r * np.logspace(-6, 0, 40)
    for t in ts:
        if np.any(s.contains_many(B - t * v[None, :], 1e-12)):
            return "fails"
    return "holds"
