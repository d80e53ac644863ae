from fractions import Fraction

import numpy as np
import pytest

from ofbf import construct, groups as grp, sim, spectral as sp
from ofbf.errors import GridNotInvariant, InvalidInput, NotPSD


@pytest.fixture(scope="module")
def d3_so2():
    return construct.build_ac(grp.dihedral(3), "SO2")


@pytest.fixture(scope="module")
def d3_grid():
    return sim.polygon_grid([0.6, 1.2], 6, offset=Fraction(1, 12))


def test_single_point_factor():
    spec = sp.fbm_spec(0.3)
    st = sim.build_sampler(spec, [[1.5]])
    assert st.factor[0, 0] == pytest.approx(np.sqrt(sp.covariance(spec, [1.5], [1.5])[0, 0]))


def test_fbm_block_covariance_closed_form():
    h = 0.3
    spec = sp.fbm_spec(h)
    st = sim.build_sampler(spec, [[1.0], [2.0]])
    s2 = st.covariance[0, 0]
    want = 0.5 * s2 * np.array([[2, 1 + 2 ** (2 * h) - 1], [1 + 2 ** (2 * h) - 1, 2 * 2 ** (2 * h)]])
    assert np.allclose(st.covariance, want, rtol=1e-10)
    assert np.allclose(st.factor @ st.factor.T, st.covariance, rtol=1e-12)


def test_square_grid_factorizes_with_small_jitter(d3_so2):
    xs = np.linspace(-1, 1, 4)
    grid = sim.GridDesign(np.array([[x, y] for x in xs for y in xs]))
    st = sim.build_sampler(d3_so2, grid)
    scale = np.trace(st.covariance) / st.dim
    assert st.jitter <= 1e-10 * scale
    assert np.allclose(st.factor @ st.factor.T, st.covariance + st.jitter * np.eye(st.dim), atol=1e-8 * scale)


def test_origin_gets_zero_rows(d3_so2):
    st = sim.build_sampler(d3_so2, [[0.0, 0.0], [1.0, 0.0]])
    X = sim.sample(st, 5)
    assert np.array_equal(X[:, 0, :], np.zeros((5, 2)))


def test_sampling_shapes_and_determinism(d3_so2, d3_grid):
    st = sim.build_sampler(d3_so2, d3_grid, seed=7)
    assert sim.sample(st, 0).shape == (0, 12, 2)
    first = sim.sample(st, 3)
    nxt = sim.sample(st, 2)
    assert st.counter == 5
    replay = sim.sample(st, 5, start=0)
    assert np.array_equal(np.concatenate([first, nxt]), replay)
    other = sim.sample(sim.build_sampler(d3_so2, d3_grid, seed=8), 3)
    assert not np.array_equal(first, other)


def test_worker_count_does_not_change_output(d3_so2, d3_grid, monkeypatch):
    st = sim.build_sampler(d3_so2, d3_grid, seed=3)
    serial = sim.sample(st, 20, start=0, threads=1)
    monkeypatch.setenv("OFBF_THREADS", "4")
    st4 = sim.build_sampler(d3_so2, d3_grid, seed=3)
    assert np.array_equal(st4.covariance, st.covariance)
    assert np.array_equal(sim.sample(st4, 20, start=0), serial)
    monkeypatch.setenv("OFBF_THREADS", "many")
    with pytest.raises(InvalidInput):
        sim.worker_count()


def test_sample_mean_is_near_zero(d3_so2, d3_grid):
    st = sim.build_sampler(d3_so2, d3_grid, seed=1)
    X = sim.sample(st, 2000).reshape(2000, -1)
    se = X.std(axis=0, ddof=1) / np.sqrt(len(X))
    assert np.all(np.abs(X.mean(axis=0)) <= 4 * se)


def test_empirical_increment_stationarity(d3_so2):
    t, h = np.array([0.7, 0.2]), np.array([-0.3, 0.5])
    st = sim.build_sampler(d3_so2, [t, h, t + h], seed=5)
    X = sim.sample(st, 2000)
    inc = X[:, 2] - X[:, 1]
    v1, v2 = inc**2, X[:, 0] ** 2
    se = np.sqrt(v1.var(ddof=1) / 2000 + v2.var(ddof=1) / 2000)
    assert np.all(np.abs(v1.mean(axis=0) - v2.mean(axis=0)) <= 4 * se)


def test_grid_validation(d3_grid):
    with pytest.raises(InvalidInput):
        sim.GridDesign([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(InvalidInput):
        sim.GridDesign(np.empty((0, 2)))
    perm = d3_grid.permutation(grp.rotation(Fraction(1, 3)).matrix())
    assert sorted(perm) == list(range(len(d3_grid)))
    with pytest.raises(GridNotInvariant):
        d3_grid.permutation(grp.rotation(Fraction(1, 4)).matrix())


def test_symmetry_tests(d3_so2, d3_grid):
    st = sim.build_sampler(d3_so2, d3_grid, seed=11)
    run = lambda g, mode: sim.empirical_symmetry_test(d3_so2, g, mode, d3_grid, samples=2000, state=st)
    assert run(np.eye(2), "range").passed
    assert run(grp.rotation(Fraction(1, 3)), "domain").passed
    assert run(grp.reflection(Fraction(2, 3)), "domain").passed
    minus = run(-np.eye(2), "domain")
    assert not minus.passed and minus.statistic > minus.threshold
    assert not run(np.diag([1.0, -1.0]), "range").passed
    with pytest.raises(GridNotInvariant):
        sim.empirical_symmetry_test(d3_so2, grp.rotation(Fraction(1, 4)), "domain", d3_grid, samples=10)


def test_not_psd_is_reported(monkeypatch):
    monkeypatch.setattr(sim, "block_covariance", lambda *a, **k: np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NotPSD) as info:
        sim.build_sampler(sp.fbm_spec(0.5), [[1.0], [2.0]])
    assert info.value.min_eigenvalue == pytest.approx(-1.0)
