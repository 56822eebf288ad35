import numpy as np
import pytest
from scipy import integrate, stats

from spheretests import projection
from spheretests.projection import ProjectionConfig
from spheretests.sample import DirectionalSample, SampleError
from spheretests.samplers import draw_uniform


def quad_cdf(x, p):
    dens = lambda y: (1 - y * y) ** ((p - 3) / 2)  # noqa: E731
    total = integrate.quad(dens, -1, 1, epsabs=1e-12)[0]
    return integrate.quad(dens, -1, x, epsabs=1e-12)[0] / total


def test_project_examples(rng):
    h = np.array([0.0, 0.0, 1.0])
    x = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    np.testing.assert_allclose(projection.project(x, h), [1.0, 0.0])
    y = draw_uniform(rng, 200, 5)
    hh = draw_uniform(rng, 1, 5)[0]
    assert np.all(np.abs(projection.project(y, hh)) <= 1)
    np.testing.assert_array_equal(projection.project(y, -hh), -projection.project(y, hh))
    with pytest.raises(SampleError):
        projection.project(y, h)


def test_null_cdf_closed_forms():
    assert projection.projected_null_cdf(0.0, 2) == pytest.approx(0.5)
    assert projection.projected_null_cdf(1.0, 3) == 1.0
    assert projection.projected_null_cdf(0.0, 4) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        projection.projected_null_cdf(1.1, 3)


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6, 10, 41])
def test_null_cdf_against_quadrature(p):
    for x in np.linspace(-0.95, 0.95, 13):
        assert projection.projected_null_cdf(x, p) == pytest.approx(quad_cdf(x, p), abs=1e-9)


@pytest.mark.parametrize("p", [2, 3, 4, 7, 30])
def test_null_cdf_symmetry_and_bounds(p):
    x = np.linspace(-1, 1, 401)
    f = projection.projected_null_cdf(x, p)
    assert f[0] == pytest.approx(0.0, abs=1e-15) and f[-1] == pytest.approx(1.0)
    assert np.all(np.diff(f) >= 0)
    np.testing.assert_allclose(f + f[::-1], 1.0, atol=1e-10)


def test_single_point_distance():
    x = DirectionalSample(np.array([[1.0, 0.0, 0.0]]))
    d, _ = projection.single_projection_test(x, np.array([0.0, 0.0, 1.0]))
    assert d == pytest.approx(0.5)


def grid_sup(y, p, m=1_000_000):
    y = np.sort(y)
    x = np.concatenate([np.linspace(-1, 1, m), y, np.nextafter(y, -2)])
    f_n = np.searchsorted(y, x, side="right") / y.size
    return np.max(np.abs(f_n - projection.projected_null_cdf(x, p)))


def test_jump_point_sup_matches_grid(rng):
    for i in range(20):
        p = (2, 3, 5)[i % 3]
        y = projection.project(draw_uniform(rng, 30, p), draw_uniform(rng, 1, p)[0])
        assert projection.ks_distance(y, p) == pytest.approx(grid_sup(y, p), abs=1e-9)


def test_single_projection_pvalues_uniform(rng):
    h = np.array([0.0, 1.0, 0.0])
    pv = [projection.single_projection_test(draw_uniform(rng, 500, 3), h)[1] for _ in range(2000)]
    assert stats.kstest(pv, "uniform").statistic < 0.05


def test_k_one_equals_single():
    x = draw_uniform(np.random.default_rng(1), 40, 3)
    h = projection.random_directions(1, 3, 5)
    assert projection.min_projection_pvalue(x, h) == projection.single_projection_test(x, h[0])[1]


def test_multi_projection_deterministic_and_guarded():
    x = draw_uniform(np.random.default_rng(2), 40, 3)
    cfg = ProjectionConfig(k=10, seed=3, mc_replicates=199)
    assert projection.multi_projection_test(x, cfg) == projection.multi_projection_test(x, cfg)
    assert projection.multi_projection_test(x, cfg, workers=3) == \
        projection.multi_projection_test(x, cfg)
    with pytest.raises(ValueError):
        projection.multi_projection_test(x, ProjectionConfig(k=10, mc_replicates=50))
    with pytest.raises(ValueError):
        ProjectionConfig(k=0)


def test_default_k():
    assert projection.default_k(2) == 25 and projection.default_k(3) == 100


def test_directions_are_unit(rng):
    h = projection.random_directions(50, 6, 9)
    np.testing.assert_allclose(np.linalg.norm(h, axis=1), 1.0, atol=1e-14)
