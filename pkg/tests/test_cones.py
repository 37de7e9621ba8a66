import numpy as np
import pytest

from dirtime import cones
from dirtime import geometry as geo
from dirtime.errors import PointNotInSet
from dirtime.oracle import cone_angle, sampled_normal_cone
from dirtime.polyhedral import ConeFamily, GeneratedCone
from instances import SQRT8, boundary_point, random_convex

Z = np.zeros((0, 2))


def cone(*gens, lin=()):
    g = np.array(gens, float).reshape(-1, 2)
    return GeneratedCone(g, np.array(lin, float).reshape(-1, 2), 2)


def test_normal_cone_examples():
    assert cones.normal_cone_convex(geo.Ball([0, 0], SQRT8), [-2, -2]).same_as(cone([-1, -1]))
    assert cones.normal_cone_convex(geo.Box([-1, -1], [1, 1]), [1, 1]).same_as(cone([1, 0], [0, 1]))
    assert cones.normal_cone_convex(geo.Box([-1, -1], [1, 1]), [0.2, 0]).is_zero


def test_normal_cone_outside_point():
    with pytest.raises(PointNotInSet):
        cones.normal_cone_convex(geo.Ball([0, 0], 1), [2, 0])


def test_contingent_examples():
    K = cones.contingent_cone(geo.Ball([0, 0], SQRT8), [-2, -2])
    assert K.parts[0].same_as(GeneratedCone.from_inequalities(np.array([[-1.0, -1.0]]), dim=2))
    K = cones.contingent_cone(geo.Implicit2D("abs-cone"), [0, 0])
    for d in ([1, 1], [-1, 1], [1, -0.5], [-1, -0.5], [0, 1]):
        assert K.contains(d)
    assert not K.contains([0, -1])
    assert cones.contingent_cone(geo.Box([-1, -1], [1, 1]), [0, 0]).parts[0].same_as(GeneratedCone.whole(2))


def test_dini_examples():
    assert cones.dini_normal_cone(geo.Ball([0, 0], SQRT8), [-2, -2]).same_as(cone([-1, -1]))
    assert cones.dini_normal_cone(geo.Implicit2D("abs-cone"), [0, 0]).is_zero


def test_frechet_examples():
    assert cones.frechet_normal_cone(geo.Implicit2D("axis-cross"), [0, 0]).same_as(cone([0, -1]))
    assert cones.frechet_normal_cone(geo.Halfspace([1, 2], 1), [1, 0]).same_as(cone([1, 2]))
    assert cones.frechet_normal_cone(geo.Implicit2D("abs-cone"), [0, 0]).is_zero


def test_limiting_examples():
    L = cones.limiting_normal_cone(geo.Implicit2D("abs-cone"), [0, 0])
    assert L.exact
    assert L.same_as(ConeFamily((cone([-1, -1]), cone([1, -1]))))
    L = cones.limiting_normal_cone(geo.Implicit2D("axis-cross"), [0, 0])
    assert L.same_as(ConeFamily((cone(lin=[[0, 1]]), cone(lin=[[1, 0]]))))
    L = cones.limiting_normal_cone(geo.Ball([1, 1], 2), [3, 1])
    assert len(L.parts) == 1 and L.parts[0].same_as(cone([1, 0]))


def test_union_limiting_is_flagged_inner():
    u = geo.Union((geo.Box([-1, -1], [0, 1]), geo.Box([0, -1], [1, 0])))
    L = cones.limiting_normal_cone(u, [0, 0.5])
    assert not L.exact
    assert L.contains([1, 0])


def test_union_frechet_is_intersection():
    u = geo.Union((geo.Halfspace([0, 1], 0), geo.Halfspace([1, 0], 0)))
    # union is the complement of the open positive quadrant
    N = cones.frechet_normal_cone(u, [0, 0])
    assert N.is_zero


def test_convex_coincidence():
    rng = np.random.default_rng(0)
    for _ in range(100):
        s = random_convex(rng)
        x = boundary_point(rng, s)
        n = cones.normal_cone_convex(s, x)
        assert n.same_as(cones.dini_normal_cone(s, x))
        assert n.same_as(cones.frechet_normal_cone(s, x))
        L = cones.limiting_normal_cone(s, x)
        assert len(L.parts) == 1 and n.same_as(L.parts[0])


def test_polarity_of_contingent_and_dini():
    rng = np.random.default_rng(1)
    pts = [(geo.Implicit2D(k), p) for k, p in (("abs-cone", [0, 0]), ("cone", [0, 0]), ("axis-cross", [0, 0]),
                                                  ("sqrt-cusp", [0, 0]), ("abs-cone", [1, -1]))]
    for _ in range(20):
        s = random_convex(rng)
        pts.append((s, boundary_point(rng, s)))
    for s, x in pts:
        K = cones.contingent_cone(s, x)
        N = cones.dini_normal_cone(s, x)
        D, Y = K.sample(rng, 500), N.sample(rng, 500)
        assert np.max(Y @ D.T, initial=0.0) <= 1e-9


def test_frechet_inside_limiting_on_catalog():
    for name in ("abs-cone", "cone", "axis-cross", "sqrt-cusp", "x-axis"):
        s = geo.Implicit2D(name)
        for x in ([0, 0], [1, s.entry.boundary_y(1.0)] if hasattr(s.entry, "boundary_y") else [0, 0]):
            if not geo.contains(s, x):
                continue
            F = cones.frechet_normal_cone(s, x)
            L = cones.limiting_normal_cone(s, x)
            for g in np.vstack([F.generators, F.lineality, -F.lineality]):
                assert L.contains(g)


@pytest.mark.parametrize("name", ["abs-cone", "cone", "axis-cross"])
def test_sampled_normals_inside_exact_cone(name):
    s = geo.Implicit2D(name)
    F = cones.frechet_normal_cone(s, [0, 0])
    W = sampled_normal_cone(s, [0, 0], seed=3)
    for w in W:
        assert cone_angle(F, w) <= np.deg2rad(2.0)
