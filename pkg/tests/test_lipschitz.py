import math

import numpy as np
import pytest

from dirtime import geometry as geo
from dirtime import lipschitz, mintime
from dirtime.errors import NotInDomain, PointNotInSet
from instances import random_direction, random_polytope

V01 = np.array([0.0, 1.0])


def test_global_examples():
    rep = lipschitz.global_lipschitz(geo.Implicit2D("cone"), V01, seed=0)
    assert rep.verdict == "lipschitz" and rep.constant == pytest.approx(math.sqrt(2), abs=1e-12)
    assert rep.empirical_ratio <= rep.constant + 1e-6
    assert lipschitz.global_lipschitz(geo.Ball([0, 0], 1), [1, 0]).verdict == "not_lipschitz"
    a = np.array([1.0, 2.0])
    v = np.array([-1.0, -0.5])
    rep = lipschitz.global_lipschitz(geo.Halfspace(a, 0.3), v)
    assert rep.verdict == "lipschitz"
    assert rep.constant == pytest.approx(np.linalg.norm(a) / -(a @ v))


def test_global_whole_space_constant_zero():
    rep = lipschitz.global_lipschitz(geo.Box([-np.inf, -np.inf], [np.inf, np.inf]), [1, 0])
    assert rep.verdict == "lipschitz" and rep.constant == 0.0


def test_global_on_inner_recession_is_inconclusive():
    u = geo.Union((geo.Halfspace([0, 1], 0), geo.Halfspace([1, 0], 0)))
    rep = lipschitz.global_lipschitz(u, [1, 1])
    assert rep.verdict == "inconclusive"


def test_global_implies_sampled_bound():
    rng = np.random.default_rng(0)
    found = 0
    for _ in range(200):
        s = random_polytope(rng, 2, bounded=False, m=2)
        v = random_direction(rng, 2)
        rep = lipschitz.global_lipschitz(s, v, n_pairs=10_000, seed=1)
        if rep.verdict != "lipschitz":
            continue
        found += 1
        X = rng.uniform(-10, 10, size=(10_000, 2))
        Y = X + rng.normal(size=(10_000, 2)) * 10 ** rng.uniform(-4, 0, size=(10_000, 1))
        TX, TY = mintime.min_time_many(s, v, X), mintime.min_time_many(s, v, Y)
        assert np.all(np.abs(TX - TY) <= (rep.constant + 1e-9) * np.linalg.norm(X - Y, axis=1) + 1e-12)
        if found == 10:
            break
    assert found == 10


def test_local_examples():
    assert lipschitz.local_lipschitz(geo.Implicit2D("abs-cone"), V01, [0, 0]).verdict == "lipschitz"
    assert lipschitz.local_lipschitz(geo.Implicit2D("sqrt-cusp"), V01, [0, 0]).verdict == "not_lipschitz"
    rep = lipschitz.local_lipschitz(geo.Implicit2D("axis-cross"), V01, [0, -2])
    assert rep.verdict == "inconclusive"
    assert rep.empirical_ratio == pytest.approx(1.0, abs=0.05)


def test_local_outside_domain():
    with pytest.raises(NotInDomain):
        lipschitz.local_lipschitz(geo.Box([-1, -1], [1, 1]), [1, 0], [2, 0])


def test_local_ratio_stable_when_certified():
    s = geo.Ball([0, 0], 2.0)
    v = np.array([1.0, 0.2])
    x = np.array([-4.0, 0.5])
    rep = lipschitz.local_lipschitz(s, v, x)
    assert rep.verdict == "lipschitz"
    r = [lipschitz.empirical_ratio_local(s, v, x, n_pairs=2000, seed=k)[0] for k in range(3)]
    assert max(r) < 10 and max(r) / min(r) < 1.5


def test_local_bound_near_inset_point():
    s = geo.Implicit2D("abs-cone")
    rep = lipschitz.local_lipschitz(s, V01, [0, 0])
    assert rep.verdict == "lipschitz"
    lhat = rep.empirical_ratio
    rng = np.random.default_rng(0)
    base = geo.sample_near(s, np.zeros(2), 1e-2, 300, rng)
    n = base.shape[0]
    U = rng.normal(size=(n, 2))
    U *= 1e-3 * rng.uniform(0, 1, size=(n, 1)) / np.linalg.norm(U, axis=1)[:, None]
    T = mintime.min_time_many(s, V01, base + U)
    assert np.all(T <= (lhat + 0.1) * np.linalg.norm(U, axis=1) + 1e-12)


def test_epi_lipschitz_examples():
    box = geo.Box([-1, -1], [1, 1])
    assert lipschitz.epi_lipschitz(box, [1, 1], [-1, -1]) == "true"
    assert lipschitz.epi_lipschitz(box, [1, 1], [0, -1]) == "false"
    assert lipschitz.epi_lipschitz(box, [0, 0], [3, 1]) == "true"
    with pytest.raises(PointNotInSet):
        lipschitz.epi_lipschitz(box, [3, 0], [1, 0])


def test_epi_lipschitz_matches_local_verdict():
    rng = np.random.default_rng(2)
    n = 0
    while n < 200:
        s = random_polytope(rng, int(rng.integers(2, 4)), bounded=False)
        K = geo.recession_cone(s)
        if K.is_zero:
            continue
        v = K.sample(rng, 1)[0]
        if np.linalg.norm(v) < 1e-6 or not all(lipschitz.v_in_recession(s, v)):
            continue
        x = geo.euclid_project(s, 3 * rng.normal(size=s.dim))
        epi = lipschitz.epi_lipschitz(s, x, v)
        loc = lipschitz.local_lipschitz(s, v, x, n_pairs=200).verdict
        assert (epi == "true") == (loc == "lipschitz")
        n += 1


def test_property_p_examples():
    h = geo.Halfspace([0, -1], 0)
    assert lipschitz.property_p_check(h, V01, [0, 0], 1.0) == "holds"
    box = geo.Box([-1, -1], [1, 1])
    assert lipschitz.property_p_check(box, [1, 0], [1, 0], 3.0) == "fails"
    assert lipschitz.property_p_check(geo.Implicit2D("abs-cone"), V01, [0, 0], 1.0) == "holds"


def test_report_serialization():
    d = lipschitz.global_lipschitz(geo.Implicit2D("cone"), V01, seed=5).to_dict()
    assert d["verdict"] == "lipschitz" and d["seed"] == 5
    assert set(d) >= {"verdict", "constant", "evidence", "empirical_ratio", "seed"}
