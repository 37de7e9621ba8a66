import math

import numpy as np
import pytest

from dirtime import geometry as geo
from dirtime import mintime, oracle
from dirtime.oracle import GridSpec
from dirtime.solver import ProblemSpec, Target
from instances import SQRT8, random_convex, random_direction

DISK = geo.Ball([0, 0], SQRT8)
V11 = np.array([1.0, 1.0])


def test_oracle_min_time_examples():
    assert oracle.oracle_min_time(DISK, V11, [-3, -3], t_max=100, tol=1e-8) == pytest.approx(1.0, abs=1e-8)
    assert oracle.oracle_min_time(DISK, V11, [0, 0]) == 0.0
    t = oracle.oracle_min_time(geo.Implicit2D("sqrt-cusp"), [0, 1], [0.25, -1], tol=1e-8)
    assert t == pytest.approx(0.5, abs=1e-8)
    assert oracle.oracle_min_time(DISK, V11, [3, 3], t_max=10) == math.inf


def test_oracle_rejects_bad_parameters():
    with pytest.raises(ValueError):
        oracle.oracle_min_time(DISK, V11, [0, 0], t_max=0)


def test_oracle_agrees_with_exact_on_random_convex():
    rng = np.random.default_rng(7)
    for _ in range(100):
        s = random_convex(rng)
        v = random_direction(rng, s.dim)
        x = 3 * rng.normal(size=s.dim)
        T = mintime.min_time(s, v, x)
        To = oracle.oracle_min_time(s, v, x, t_max=1e3)
        if math.isinf(T):
            # past t_max the oracle cannot see anything
            assert math.isinf(To) or To > 1e3 - 1
        else:
            assert abs(T - To) <= 1e-6


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec([0, 0], [0, 1], 10)
    with pytest.raises(ValueError):
        GridSpec([0, 0], [1, 1], 1)
    with pytest.raises(ValueError):
        GridSpec([0, 0, 0], [1, 1, 1], 300)


def test_grid_min_examples():
    p = ProblemSpec(2, geo.Box([-5, -5], [5, 5]),
                    (Target(geo.Ball([4, 0], 1), [1, 0]), Target(geo.Ball([0, 4], 1), [0, 1])))
    node, val = oracle.oracle_grid_min(p, GridSpec([-2, -2], [2, 2], 400))
    assert abs(val - (8 - 2 * math.sqrt(2))) <= 2e-3
    flat = ProblemSpec(2, geo.Box([-1, -1], [1, 1]), (Target(geo.Ball([0, 0], 3), [1, 0]),))
    node, val = oracle.oracle_grid_min(flat, GridSpec([-1, -1], [1, 1], 4))
    assert val == 0.0 and np.allclose(node, [-1, -1])
    assert oracle.oracle_grid_min(p, GridSpec([6, 6], [7, 7], 4)) is None


def test_grid_min_is_deterministic():
    p = ProblemSpec(2, geo.Box([-5, -5], [5, 5]), (Target(geo.Ball([4, 0], 1), [1, 0]),))
    a = oracle.oracle_grid_min(p, GridSpec([-2, -2], [2, 2], 50))
    b = oracle.oracle_grid_min(p, GridSpec([-2, -2], [2, 2], 50))
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]


def test_fd_examples():
    assert oracle.fd_directional(DISK, V11, [-3, -3], [1, 0]) == pytest.approx(-0.5, abs=1e-3)
    assert oracle.fd_directional(DISK, V11, [-3, -3], V11) == pytest.approx(-1.0, abs=1e-3)
    assert oracle.fd_directional(DISK, V11, [0, 0], [0.3, -0.7]) == 0.0
    # probes leaving the domain report +inf
    assert oracle.fd_directional(DISK, V11, [-4, 0], [-1, 1]) == math.inf


def test_fd_is_one_sided_against_exact():
    # the net minimum never falls far below the exact derivative on a smooth piece
    rng = np.random.default_rng(3)
    for _ in range(50):
        u = rng.normal(size=2)
        x = np.array([-3.0, -3.0]) + 0.2 * rng.normal(size=2)
        dd = mintime.directional_derivative(DISK, V11, x, u).value
        assert oracle.fd_directional(DISK, V11, x, u) >= dd - 1e-3


def test_sampled_normal_cone_examples():
    W = oracle.sampled_normal_cone(geo.Halfspace([1, 2], 0), [0, 0], seed=1)
    a = np.array([1, 2]) / math.sqrt(5)
    assert W.shape[0] > 0
    assert np.all(np.arccos(np.clip(W @ a, -1, 1)) <= np.deg2rad(2))
    W = oracle.sampled_normal_cone(geo.Box([-1, -1], [1, 1]), [1, 1], seed=2)
    ang = np.arctan2(W[:, 1], W[:, 0])
    assert np.all((ang >= -np.deg2rad(2)) & (ang <= np.pi / 2 + np.deg2rad(2)))
    assert ang.min() < np.deg2rad(10) and ang.max() > np.deg2rad(80)
    W = oracle.sampled_normal_cone(geo.Ball([1, 0], 2), [1, 2], seed=3)
    assert np.all(np.arccos(np.clip(W @ [0, 1], -1, 1)) <= np.deg2rad(2))


def test_oracle_on_grazing_ray():
    # the ray crosses the face y = 0 at a shallow angle; a membership tolerance
    # of 1e-9 alone would shift the entry time by about 1e-6
    box = geo.Box([0, -1], [10, 0])
    v = np.array([1.0, -1e-3])
    x = np.array([-1.0, 3e-3])
    assert oracle.oracle_min_time(box, v, x, tol=1e-8) == pytest.approx(mintime.min_time(box, v, x), abs=1e-7)
