"""Curated planar sets given by membership predicates.

Each entry knows its membership test, how a line crosses it (as a union of
convex pieces), its recession cone, and closed forms for the tangent and
normal cones at any of its points. Nonconvex entries also carry their boundary
stratification: a list of smooth arcs or segments and the junction points
where they meet. The limiting normal cone at a point is assembled from the
limits of the Fréchet normal cones along every stratum whose closure contains
the point.

Coordinates passed to entries are local (any ``offset`` parameter has already
been subtracted by the caller).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .intervals import quadratic_interval, rows_interval
from .polyhedral import ConeFamily, GeneratedCone

EPS = 1e-9
_S2 = np.sqrt(0.5)


@dataclass(frozen=True)
class Stratum:
    """A boundary piece with the limit of its normal cones at points of its closure."""

    name: str
    in_closure: Callable[[np.ndarray], bool]
    normal_limit: Callable[[np.ndarray], GeneratedCone]


class CatalogEntry:
    catalog_id: str = ""
    convex: bool = False
    polyhedral: bool = False
    thin: bool = False  # empty interior
    strata: tuple = ()

    def contains(self, P: np.ndarray, eps: float = EPS) -> np.ndarray:
        raise NotImplementedError

    def pieces(self, X: np.ndarray, v: np.ndarray) -> list:
        raise NotImplementedError

    def recession(self) -> GeneratedCone:
        raise NotImplementedError

    def on_boundary(self, p: np.ndarray, eps: float = EPS) -> bool:
        raise NotImplementedError

    def contingent(self, p: np.ndarray) -> ConeFamily:
        raise NotImplementedError

    def frechet(self, p: np.ndarray) -> GeneratedCone:
        raise NotImplementedError

    def limiting(self, p: np.ndarray) -> ConeFamily:
        parts = [self.frechet(p)]
        if self.on_boundary(p):
            parts += [s.normal_limit(p) for s in self.strata if s.in_closure(p)]
        return ConeFamily(tuple(parts), exact=True)

    def boundary_near(self, p, rho, n, rng) -> np.ndarray:
        raise NotImplementedError

    def sample_near(self, p, rho, n, rng) -> np.ndarray | None:
        """Points of the set near ``p`` for thin entries; None means use rejection."""
        return None


def _halfplane(a) -> GeneratedCone:
    return GeneratedCone.from_inequalities(np.atleast_2d(a), dim=2)


def _within(P, p, rho):
    return P[np.linalg.norm(P - p[None, :], axis=1) <= rho]


class AbsCone(CatalogEntry):
    """``{(x, y) : y >= -|x|}``, the union of two closed half-planes."""

    catalog_id = "abs-cone"
    polyhedral = True
    # x - y <= 0 and -x - y <= 0
    _left = np.array([[_S2, -_S2]])
    _right = np.array([[-_S2, -_S2]])

    def __init__(self):
        self.strata = (
            Stratum(
                "right edge y = -x, x > 0",
                lambda p: self.on_boundary(p) and p[0] >= -EPS,
                lambda p: GeneratedCone.ray([-1.0, -1.0]),
            ),
            Stratum(
                "left edge y = x, x < 0",
                lambda p: self.on_boundary(p) and p[0] <= EPS,
                lambda p: GeneratedCone.ray([1.0, -1.0]),
            ),
        )

    def contains(self, P, eps=EPS):
        P = np.atleast_2d(P)
        return P[:, 1] >= -np.abs(P[:, 0]) - eps

    def pieces(self, X, v):
        z = np.zeros(1)
        return [rows_interval(self._left, z, X, v), rows_interval(self._right, z, X, v)]

    def recession(self):
        return GeneratedCone(np.array([[1.0, 1.0], [-1.0, 1.0]]), np.zeros((0, 2)), 2)

    def on_boundary(self, p, eps=EPS):
        return abs(p[1] + abs(p[0])) <= eps

    def _where(self, p):
        if not self.on_boundary(p):
            return "interior"
        if abs(p[0]) <= EPS:
            return "junction"
        return "right" if p[0] > 0 else "left"

    def contingent(self, p):
        where = self._where(p)
        if where == "interior":
            return ConeFamily.single(GeneratedCone.whole(2))
        if where == "right":
            return ConeFamily.single(_halfplane(self._right))
        if where == "left":
            return ConeFamily.single(_halfplane(self._left))
        return ConeFamily((_halfplane(self._left), _halfplane(self._right)))

    def frechet(self, p):
        where = self._where(p)
        if where == "right":
            return GeneratedCone.ray([-1.0, -1.0])
        if where == "left":
            return GeneratedCone.ray([1.0, -1.0])
        return GeneratedCone.zero(2)

    def boundary_near(self, p, rho, n, rng):
        a = rng.uniform(p[0] - rho, p[0] + rho, size=n)
        return _within(np.column_stack([a, -np.abs(a)]), p, rho)


class SqrtCusp(CatalogEntry):
    """``{(x, y) : y >= -sqrt|x|}``.

    Written as ``{y >= 0} u {y^2 <= x} u {y^2 <= -x}`` for line crossings; the
    two parabolic pieces are convex.
    """

    catalog_id = "sqrt-cusp"

    def __init__(self):
        self.strata = (
            Stratum(
                "right arc x > 0",
                lambda p: self.on_boundary(p) and p[0] >= -EPS,
                lambda p: GeneratedCone.ray([-1.0, -2.0 * np.sqrt(max(p[0], 0.0))]),
            ),
            Stratum(
                "left arc x < 0",
                lambda p: self.on_boundary(p) and p[0] <= EPS,
                lambda p: GeneratedCone.ray([1.0, -2.0 * np.sqrt(max(-p[0], 0.0))]),
            ),
        )

    def contains(self, P, eps=EPS):
        P = np.atleast_2d(P)
        return P[:, 1] >= -np.sqrt(np.abs(P[:, 0])) - eps

    def pieces(self, X, v):
        X = np.atleast_2d(X)
        x0, y0 = X[:, 0], X[:, 1]
        upper = rows_interval(np.array([[0.0, -1.0]]), np.zeros(1), X, v)
        qa = np.full(x0.shape, v[1] * v[1])
        right = quadratic_interval(qa, 2 * y0 * v[1] - v[0], y0 * y0 - x0)
        left = quadratic_interval(qa, 2 * y0 * v[1] + v[0], y0 * y0 + x0)
        return [upper, right, left]

    def recession(self):
        return GeneratedCone.ray([0.0, 1.0])

    def on_boundary(self, p, eps=EPS):
        return p[1] <= eps and abs(p[1] + np.sqrt(abs(p[0]))) <= eps

    def _where(self, p):
        if not self.on_boundary(p):
            return "interior"
        if abs(p[0]) <= EPS * EPS or np.hypot(*p) <= EPS:
            return "junction"
        return "right" if p[0] > 0 else "left"

    def _arc_normal(self, p):
        return np.array([-np.sign(p[0]), -2.0 * np.sqrt(abs(p[0]))])

    def contingent(self, p):
        where = self._where(p)
        if where in ("interior", "junction"):
            return ConeFamily.single(GeneratedCone.whole(2))
        return ConeFamily.single(_halfplane(self._arc_normal(p)))

    def frechet(self, p):
        if self._where(p) in ("interior", "junction"):
            return GeneratedCone.zero(2)
        return GeneratedCone.ray(self._arc_normal(p))

    def boundary_near(self, p, rho, n, rng):
        s_p = np.sign(p[0]) * np.sqrt(abs(p[0]))
        half = 2.0 * max(rho, np.sqrt(rho))
        s = rng.uniform(s_p - half, s_p + half, size=n)
        return _within(np.column_stack([s * np.abs(s), -np.abs(s)]), p, rho)


class AxisCross(CatalogEntry):
    """``{y = 0} u {x = 0, y >= 0}``; every point is a boundary point."""

    catalog_id = "axis-cross"
    polyhedral = True
    thin = True

    _line = (np.array([[0.0, 1.0], [0.0, -1.0]]), np.zeros(2))
    _ray = (np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, -1.0]]), np.zeros(3))

    def __init__(self):
        self.strata = (
            Stratum(
                "x-axis without the origin",
                lambda p: abs(p[1]) <= EPS,
                lambda p: GeneratedCone.span([0.0, 1.0]),
            ),
            Stratum(
                "open positive y-axis",
                lambda p: abs(p[0]) <= EPS and p[1] >= -EPS,
                lambda p: GeneratedCone.span([1.0, 0.0]),
            ),
        )

    def contains(self, P, eps=EPS):
        P = np.atleast_2d(P)
        return (np.abs(P[:, 1]) <= eps) | ((np.abs(P[:, 0]) <= eps) & (P[:, 1] >= -eps))

    def pieces(self, X, v):
        return [rows_interval(*self._line, X, v), rows_interval(*self._ray, X, v)]

    def recession(self):
        return GeneratedCone.zero(2)

    def on_boundary(self, p, eps=EPS):
        return bool(self.contains(p, eps)[0])

    def _where(self, p):
        if abs(p[0]) <= EPS and abs(p[1]) <= EPS:
            return "junction"
        return "x-axis" if abs(p[1]) <= EPS else "y-axis"

    def contingent(self, p):
        where = self._where(p)
        if where == "x-axis":
            return ConeFamily.single(GeneratedCone.span([1.0, 0.0]))
        if where == "y-axis":
            return ConeFamily.single(GeneratedCone.span([0.0, 1.0]))
        return ConeFamily((GeneratedCone.span([1.0, 0.0]), GeneratedCone.ray([0.0, 1.0])))

    def frechet(self, p):
        where = self._where(p)
        if where == "x-axis":
            return GeneratedCone.span([0.0, 1.0])
        if where == "y-axis":
            return GeneratedCone.span([1.0, 0.0])
        return GeneratedCone.ray([0.0, -1.0])

    def sample_near(self, p, rho, n, rng):
        k = n // 2
        a = rng.uniform(p[0] - rho, p[0] + rho, size=k)
        b = rng.uniform(max(p[1] - rho, 0.0), max(p[1] + rho, 0.0), size=n - k)
        P = np.vstack([np.column_stack([a, np.zeros(k)]), np.column_stack([np.zeros(n - k), b])])
        return _within(P, p, rho)

    def boundary_near(self, p, rho, n, rng):
        return self.sample_near(p, rho, n, rng)


class ConvexPolygonEntry(CatalogEntry):
    """Convex polyhedral entry defined by unit rows ``A p <= b``."""

    convex = True
    polyhedral = True

    def __init__(self, catalog_id, A, b, thin=False):
        A = np.asarray(A, float)
        norms = np.linalg.norm(A, axis=1)
        self.catalog_id = catalog_id
        self.A = A / norms[:, None]
        self.b = np.asarray(b, float) / norms
        self.thin = thin

    def contains(self, P, eps=EPS):
        P = np.atleast_2d(P)
        return np.all(P @ self.A.T <= self.b[None, :] + eps, axis=1)

    def pieces(self, X, v):
        return [rows_interval(self.A, self.b, X, v)]

    def recession(self):
        return GeneratedCone.from_inequalities(self.A, dim=2)

    def active(self, p, eps=EPS):
        return self.A[np.abs(self.A @ p - self.b) <= eps]

    def on_boundary(self, p, eps=EPS):
        return self.active(p, eps).shape[0] > 0

    def contingent(self, p):
        act = self.active(p)
        if act.shape[0] == 0:
            return ConeFamily.single(GeneratedCone.whole(2))
        return ConeFamily.single(GeneratedCone.from_inequalities(act, dim=2))

    def frechet(self, p):
        act = self.active(p)
        return GeneratedCone(act, np.zeros((0, 2)), 2)

    def limiting(self, p):
        return ConeFamily.single(self.frechet(p))

    def sample_near(self, p, rho, n, rng):
        if not self.thin:
            return None
        # the only thin entry is a line through the origin along (1, 0)
        a = rng.uniform(p[0] - rho, p[0] + rho, size=n)
        return _within(np.column_stack([a, np.zeros(n)]), p, rho)

    def boundary_near(self, p, rho, n, rng):
        if self.thin:
            return self.sample_near(p, rho, n, rng)
        out = []
        for a, b in zip(self.A, self.b):
            Y = p[None, :] + rng.uniform(-rho, rho, size=(n, 2))
            Y = Y - ((Y @ a) - b)[:, None] * a[None, :]
            out.append(Y[self.contains(Y)])
        return _within(np.vstack(out), p, rho)


CATALOG = {
    "abs-cone": AbsCone(),
    "sqrt-cusp": SqrtCusp(),
    "axis-cross": AxisCross(),
    "cone": ConvexPolygonEntry("cone", [[1.0, -1.0], [-1.0, -1.0]], [0.0, 0.0]),
    "x-axis": ConvexPolygonEntry("x-axis", [[0.0, 1.0], [0.0, -1.0]], [0.0, 0.0], thin=True),
}
