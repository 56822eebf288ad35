import math

import numpy as np
import pytest

from spheretests import circular
from spheretests.sample import DirectionalSample, SampleError
from spheretests.samplers import draw_uniform

TWO_PI = 2 * math.pi
STATS = [circular.kuiper, circular.watson, circular.hodges_ajne, circular.circular_range,
         circular.rao_spacings, circular.greenwood, circular.ajne_circular]


def circ(theta):
    return DirectionalSample.from_angles(theta)


def dist_c(a, b):
    d = np.abs(a - b) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def kuiper_grid(theta, m=1_000_000):
    # sup over a grid plus both one-sided limits at every data point
    u = np.sort(np.mod(theta, TWO_PI)) / TWO_PI
    n = u.size
    x = np.concatenate([np.linspace(0, 1, m), u, np.nextafter(u, -1)])
    f_n = np.searchsorted(u, x, side="right") / n
    return math.sqrt(n) * (np.max(f_n - x) + np.max(x - f_n))


def watson_quadrature(theta, m=2_000_001):
    u = np.sort(np.mod(theta, TWO_PI)) / TWO_PI
    n = u.size
    x = np.linspace(0, 1, m)
    g = np.searchsorted(u, x, side="right") / n - x
    return n * (np.trapezoid(g**2, x) - np.trapezoid(g, x) ** 2)


def half_circle_count(theta, alpha):
    return np.sum(dist_c(theta[None, :], alpha[:, None]) < math.pi / 2, axis=1)


def hodges_ajne_brute(theta):
    # N(alpha) is constant between consecutive breakpoints theta_i +- pi/2
    br = np.sort(np.mod(np.concatenate([theta + math.pi / 2, theta - math.pi / 2]), TWO_PI))
    mids = (br + np.roll(br, -1) + np.r_[np.zeros(br.size - 1), TWO_PI]) / 2
    n = theta.size
    return 2 / math.sqrt(n) * (half_circle_count(theta, np.mod(mids, TWO_PI)).max() - n / 2)


def test_kuiper_matches_grid(rng):
    for _ in range(10):
        th = rng.uniform(0, TWO_PI, rng.integers(1, 40))
        assert abs(circular.kuiper(circ(th)) - kuiper_grid(th)) < 1e-5


def test_kuiper_parts():
    d_plus, d_minus = circular.kuiper_parts(circ([0.0]))
    assert d_plus == pytest.approx(1.0) and d_minus == pytest.approx(0.0)
    assert circular.kuiper(circ([0.0])) == pytest.approx(1.0)


def test_watson_matches_quadrature(rng):
    for _ in range(5):
        th = rng.uniform(0, TWO_PI, rng.integers(2, 40))
        assert abs(circular.watson(circ(th)) - watson_quadrature(th)) < 1e-5


def test_watson_lower_bound(rng):
    x = draw_uniform(rng, (200, 17), 2)
    assert np.all(circular.watson(x) >= 1 / (12 * 17) - 1e-12)
    equal = circ(np.arange(17) * TWO_PI / 17 + 0.3)
    assert circular.watson(equal) == pytest.approx(1 / (12 * 17), abs=1e-12)


def test_hodges_ajne_matches_brute_force(rng):
    for _ in range(30):
        th = rng.uniform(0, TWO_PI, rng.integers(1, 30))
        assert circular.hodges_ajne(circ(th)) == pytest.approx(hodges_ajne_brute(th), abs=1e-12)


def test_hodges_ajne_open_half_circle():
    # two antipodal points never share an open half circle
    assert circular.max_half_circle_count(circ([0.0, math.pi])) == 1
    assert circular.max_half_circle_count(circ([0.1, 0.2, 0.3])) == 3
    # tied angles both count
    assert circular.max_half_circle_count(circ([0.5, 0.5, 0.5, 2.0, 4.5])) == 4


def test_ajne_matches_integral_form(rng):
    th = rng.uniform(0, TWO_PI, 30)
    alpha = (np.arange(1_000_000) + 0.5) * TWO_PI / 1_000_000
    counts = np.zeros(alpha.size)
    for t in th:
        counts += dist_c(alpha, t) < math.pi / 2
    integral = np.mean((counts - 15) ** 2) * TWO_PI / (TWO_PI * 30)
    assert circular.ajne_circular(circ(th)) == pytest.approx(integral, abs=1e-5)


def test_ajne_matches_pair_sum(rng):
    for n in (1, 2, 5, 31):
        th = rng.uniform(0, TWO_PI, n)
        i, j = np.triu_indices(n, 1)
        brute = n / 4 - dist_c(th[i], th[j]).sum() / (n * math.pi)
        assert circular.ajne_circular(circ(th)) == pytest.approx(brute, abs=1e-12)


def test_range_examples():
    assert circular.circular_range(circ([0, math.pi / 2, math.pi, 3 * math.pi / 2])) == \
        pytest.approx(3 * math.pi / 2)
    assert circular.circular_range(circ([1.0, 1.0])) == pytest.approx(0.0, abs=1e-12)


def test_equally_spaced_spacing_statistics():
    n = 12
    x = circ(np.arange(n) * TWO_PI / n)
    assert circular.rao_spacings(x) == pytest.approx(-math.sqrt(n) * TWO_PI / math.e)
    assert circular.greenwood(x) == pytest.approx(-math.sqrt(n))
    assert circular.symmetric_spacing(x, lambda s: s) == pytest.approx(1.0)


def test_symmetric_spacing_rejects_nonfinite():
    with pytest.raises(ValueError):
        with np.errstate(divide="ignore"):
            circular.symmetric_spacing(circ([0.0, 0.0, 1.0]), np.log)


def test_tied_angles_are_legal():
    x = circ([0.5, 0.5, 0.5, 2.0])
    for f in STATS:
        assert math.isfinite(f(x))


def test_circular_only():
    with pytest.raises(SampleError, match="p=2"):
        circular.kuiper(DirectionalSample(np.eye(3)))


@pytest.mark.parametrize("stat", STATS, ids=lambda f: f.__name__)
def test_rotation_invariance(stat, rng):
    for _ in range(20):
        th = rng.uniform(0, TWO_PI, rng.integers(2, 30))
        base = stat(circ(th))
        shifts = rng.uniform(0, TWO_PI, 100)
        rotated = stat(np.stack([circ(th + s).points for s in shifts]))
        np.testing.assert_allclose(rotated, base, atol=1e-9)


@pytest.mark.parametrize("stat", STATS, ids=lambda f: f.__name__)
def test_batch_matches_single(stat, rng):
    x = draw_uniform(rng, (7, 15), 2)
    np.testing.assert_allclose(stat(x), [stat(s) for s in x], rtol=0, atol=1e-12)


def test_kuiper_dominates_parts(rng):
    x = draw_uniform(rng, (500, 20), 2)
    v = circular.kuiper(x)
    d_plus, d_minus = circular.kuiper_parts(x)
    assert np.all(v >= d_plus) and np.all(v >= d_minus)
