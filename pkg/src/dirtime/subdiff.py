"""Subdifferentials of ``T_v`` as cones cut by one linear condition on ``<x*, v>``.

Every result is a :class:`DualSlice` carrying an exactness tag:

``exact``
    the represented set is the subdifferential;
``upper_estimate``
    the set contains the subdifferential (an inclusion whose reverse needs a
    hypothesis that could not be verified);
``lower_estimate``
    the set is contained in it (the cone itself is an inner approximation);
``heuristic``
    both of the above apply, so neither direction is guaranteed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import cones
from . import geometry as geo
from .errors import NotComputable, NotInDomain, PreconditionError, UnsupportedVariant
from .lipschitz import _local_certificate, property_p_check, v_in_recession
from .mintime import check_direction, min_time, scalarization
from .polyhedral import ConeFamily, GeneratedCone, Polyhedron, min_norm_point, polyhedron_from_inequalities

CONSTRAINTS = ("ge-1", "eq-1", "vplus", "vperp", "band")


def _tag(theorem_exact: bool, cone_exact: bool) -> str:
    if cone_exact:
        return "exact" if theorem_exact else "upper_estimate"
    return "lower_estimate" if theorem_exact else "heuristic"


@dataclass(frozen=True, eq=False)
class DualSlice:
    """``{x* in cone : constraint on <x*, v>}``."""

    cone: ConeFamily
    v: np.ndarray
    constraint: str
    exactness: str = "exact"

    def __post_init__(self):
        if self.constraint not in CONSTRAINTS:
            raise ValueError(f"unknown constraint {self.constraint!r}")
        object.__setattr__(self, "v", np.asarray(self.v, float))

    @property
    def dim(self) -> int:
        return self.v.size

    @property
    def exact(self) -> bool:
        return self.exactness == "exact"

    def _constraint_rows(self, homogeneous: bool = False):
        v, d = self.v, self.dim
        c = 0.0 if homogeneous else 1.0
        k = self.constraint
        if k == "ge-1":
            return -v[None, :], np.array([c]), np.zeros((0, d)), np.zeros(0)
        if k == "eq-1":
            return np.zeros((0, d)), np.zeros(0), v[None, :], np.array([-c])
        if k == "vplus":
            return -v[None, :], np.zeros(1), np.zeros((0, d)), np.zeros(0)
        if k == "vperp":
            return np.zeros((0, d)), np.zeros(0), v[None, :], np.zeros(1)
        return np.vstack([-v, v]), np.array([c, 0.0]), np.zeros((0, d)), np.zeros(0)

    def _part_rows(self, part: GeneratedCone, homogeneous=False):
        A0, b0, E0, f0 = self._constraint_rows(homogeneous)
        H, M = part.inequalities, part.equalities
        A = np.vstack([H, A0])
        b = np.concatenate([np.zeros(H.shape[0]), b0])
        E = np.vstack([M, E0])
        f = np.concatenate([np.zeros(M.shape[0]), f0])
        return A, b, E, f

    @cached_property
    def polyhedra(self) -> tuple:
        """V-form of each nonempty part, dominated parts removed."""
        polys = []
        for part in self.cone.parts:
            A, b, E, f = self._part_rows(part)
            P = polyhedron_from_inequalities(A, b, E, f, dim=self.dim)
            if P is not None:
                polys.append((part, P))
        kept = []
        for i, (part_i, P) in enumerate(polys):
            dominated = False
            for j, (part_j, Q) in enumerate(polys):
                if i == j:
                    continue
                if self._poly_in_part(P, part_j) and (
                    not self._poly_in_part(Q, part_i) or j < i
                ):
                    dominated = True
                    break
            if not dominated:
                kept.append(P)
        return tuple(kept)

    def _in_part(self, part, Y, homogeneous=False, tol=1e-9):
        Y = np.atleast_2d(Y)
        if Y.shape[0] == 0:
            return True
        A, b, E, f = self._part_rows(part, homogeneous)
        scale = np.maximum(1.0, np.linalg.norm(Y, axis=1))[:, None]
        ok = np.all(Y @ A.T <= b[None, :] + tol * scale) if A.shape[0] else True
        if E.shape[0]:
            ok = ok and np.all(np.abs(Y @ E.T - f[None, :]) <= tol * scale)
        return bool(ok)

    def _poly_in_part(self, P: Polyhedron, part) -> bool:
        return (
            self._in_part(part, P.vertices)
            and self._in_part(part, P.rays, True)
            and self._in_part(part, P.lineality, True)
            and self._in_part(part, -P.lineality, True)
        )

    def is_empty(self) -> bool:
        return len(self.polyhedra) == 0

    def contains(self, y, tol: float = 1e-9) -> bool:
        y = np.asarray(y, float)
        return any(self._in_part(p, y[None, :], tol=tol) for p in self.cone.parts)

    def sample(self, rng, n: int) -> np.ndarray:
        polys = self.polyhedra
        if not polys:
            return np.zeros((0, self.dim))
        which = rng.integers(len(polys), size=n)
        out = np.zeros((n, self.dim))
        for i, P in enumerate(polys):
            idx = np.flatnonzero(which == i)
            if idx.size:
                out[idx] = P.sample(rng, idx.size)
        return out

    def same_set(self, other: "DualSlice", tol: float = 1e-9) -> bool:
        """Equality of represented sets, comparing canonical V-forms."""
        a, b = self.polyhedra, other.polyhedra
        return all(any(p.same_as(q, tol) for q in b) for p in a) and all(
            any(q.same_as(p, tol) for p in a) for q in b
        )

    def to_dict(self) -> dict:
        return {
            "cone": self.cone.to_list(),
            "constraint": self.constraint,
            "exact": self.exact,
            "exactness": self.exactness,
            "pieces": [P.to_dict() for P in self.polyhedra],
        }

    def __repr__(self):
        return f"DualSlice({self.constraint}, {self.exactness}, pieces={[P.to_dict() for P in self.polyhedra]})"


# -- helpers ------------------------------------------------------------------


def _base(s, v, x):
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    t = min_time(s, v, x)
    if not math.isfinite(t):
        raise NotInDomain("x is outside the domain of T")
    return v, x, t, x + t * v, t == 0.0


def _lower_calm(s, v, x) -> bool:
    return _local_certificate(s, v, x).verdict == "lipschitz"


# -- operations ---------------------------------------------------------------


def conjugate(s, v, xstar) -> float:
    """Fenchel conjugate ``T*(x*)``: ``sigma_s(x*)`` if ``<x*, -v> <= 1``, else ``+inf``."""
    geo.require_convex(s, "conjugate")
    v = check_direction(s, v)
    y = geo.check_dim(s, xstar, "dual vector")
    if -(y @ v) <= 1.0 + 1e-12:
        return geo.support(s, y)
    return math.inf


def convex_subdifferential(s, v, x) -> DualSlice:
    if not geo.is_convex(s):
        raise UnsupportedVariant(f"convex_subdifferential needs a convex set, got {s.kind}")
    v, x, t, xt, inside = _base(s, v, x)
    N = ConeFamily.single(cones.frechet_normal_cone(s, xt))
    if inside:
        in_rec, exact = v_in_recession(s, v)
        return DualSlice(N, v, "band" if (in_rec and exact) else "ge-1")
    return DualSlice(N, v, "eq-1")


def frechet_subdifferential(s, v, x) -> DualSlice:
    v, x, t, xt, inside = _base(s, v, x)
    N = ConeFamily.single(cones.frechet_normal_cone(s, xt))
    if inside:
        return DualSlice(N, v, "ge-1")
    exact = geo.is_convex(s) or _lower_calm(s, v, x)
    return DualSlice(N, v, "eq-1", _tag(exact, True))


def _holder_supported(s) -> bool:
    if isinstance(s, geo.CONVEX_TYPES):
        return True
    if isinstance(s, geo.Union):
        return s.polyhedral
    return bool(s.polyhedral)


def holder_subdifferential(s, v, x, sexp: float) -> DualSlice:
    """s-Hölder subdifferential; computed only where it equals the Fréchet one."""
    if not sexp > 0:
        raise PreconditionError("Hölder exponent must be positive")
    if not _holder_supported(s):
        raise NotComputable(
            f"Hölder normal cones are not available for {getattr(s, 'catalog_id', s.kind)}"
        )
    return frechet_subdifferential(s, v, x)


def limiting_subdifferential(s, v, x, seed: int = 0) -> DualSlice:
    v, x, t, xt, inside = _base(s, v, x)
    N = cones.limiting_normal_cone(s, xt, seed=seed)
    if inside:
        return DualSlice(N, v, "ge-1", _tag(True, N.exact))
    if geo.is_convex(s):
        return DualSlice(N, v, "eq-1")
    exact = _lower_calm(s, v, x) and property_p_check(s, v, xt, t, seed=seed) == "holds"
    return DualSlice(N, v, "eq-1", _tag(exact, N.exact))


def singular_subdifferential(s, v, x, seed: int = 0) -> DualSlice:
    v, x, t, xt, inside = _base(s, v, x)
    N = cones.limiting_normal_cone(s, xt, seed=seed)
    if inside:
        in_rec, exact = v_in_recession(s, v)
        kind = "vperp" if (in_rec and exact) else "vplus"
        return DualSlice(N, v, kind, _tag(True, N.exact))
    exact = geo.is_convex(s) and not convex_subdifferential(s, v, x).is_empty()
    return DualSlice(N, v, "vperp", _tag(exact, N.exact))


def dini_subdifferential(s, v, x) -> DualSlice:
    v, x, t, xt, inside = _base(s, v, x)
    N = ConeFamily.single(cones.dini_normal_cone(s, xt))
    if inside:
        return DualSlice(N, v, "ge-1")
    exact = geo.is_convex(s) or _lower_calm(s, v, x)
    return DualSlice(N, v, "eq-1", _tag(exact, True))


def scalarization_subdiff(s, v, x, singular: bool = False) -> DualSlice:
    """Subdifferential (or singular subdifferential) of ``phi_v``."""
    geo.require_convex(s, "scalarization_subdiff")
    v = check_direction(s, v)
    x = geo.check_dim(s, x)
    in_rec, exact = v_in_recession(s, v)
    if not (in_rec and exact):
        raise PreconditionError("v must lie in the recession cone")
    phi = scalarization(s, v, x)
    if not math.isfinite(phi):
        raise NotInDomain("scalarization is not finite at x")
    N = ConeFamily.single(cones._convex_normal(s, x + phi * v))
    return DualSlice(N, v, "vperp" if singular else "eq-1")


def select_subgradient(d: DualSlice):
    """Minimum-norm element of the slice, or None when it is empty."""
    if d.constraint != "eq-1":
        return np.zeros(d.dim)
    if len(d.cone.parts) == 1:
        part = d.cone.parts[0]
        if part.lineality.shape[0] == 0 and part.generators.shape[0] <= 2:
            return _small_eq_slice(part.generators, d.v)
    best = None
    for P in d.polyhedra:
        y = min_norm_point(P)
        if best is None or np.linalg.norm(y) < np.linalg.norm(best) - 1e-15:
            best = y
    return best


def _small_eq_slice(G, v):
    """Closed form for ``cone(G) cap {<y, v> = -1}`` with at most two generators."""
    a = G @ v
    if G.shape[0] == 0:
        return None
    if G.shape[0] == 1:
        return G[0] / -a[0] if a[0] < -1e-12 else None
    pts = [G[i] / -a[i] for i in range(2) if a[i] < -1e-12]
    if len(pts) == 2:
        # segment between the two scaled generators
        p, q = pts
        w = q - p
        lam = np.clip(-(p @ w) / max(w @ w, 1e-300), 0.0, 1.0)
        return p + lam * w
    if len(pts) == 1:
        # a vertex plus the ray along the generator combination with <., v> = 0
        p = pts[0]
        i = 0 if a[0] < -1e-12 else 1
        j = 1 - i
        ray = a[j] * G[i] - a[i] * G[j]
        lam = max(0.0, -(p @ ray) / max(ray @ ray, 1e-300))
        return p + lam * ray
    return None
