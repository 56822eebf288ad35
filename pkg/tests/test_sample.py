import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheretests.sample import (DirectionalSample, OrderedCircular, SampleError, emit, ingest,
                                parse, spacings)


def test_angle_line_becomes_vector():
    s = parse("3.141592653589793", "angles-rad")
    assert (s.n, s.dim) == (1, 2)
    np.testing.assert_allclose(s.points[0], [-1.0, 0.0], atol=1e-15)


def test_three_four_five_vector_unchanged():
    s = parse("0.6,0.8", "vectors")
    np.testing.assert_array_equal(s.points[0], [0.6, 0.8])


def test_renormalize_band():
    s = parse("0.60001,0.8", "vectors", renormalize=True)
    assert abs(np.linalg.norm(s.points[0]) - 1) < 1e-15
    with pytest.raises(SampleError):
        parse("0.60001,0.8", "vectors")
    with pytest.raises(SampleError, match="band"):
        parse("0.7,0.8", "vectors", renormalize=True)


@pytest.mark.parametrize("text,match", [
    ("", "no data"),
    ("# only a comment\n", "no data"),
    ("0.6,abc", "row 1, column 2"),
    ("1,0\n0,0", "zero norm"),
    ("1,0\n0,1,0", "inconsistent"),
    ("1", "at least 2"),
])
def test_ingest_errors(text, match):
    with pytest.raises(SampleError, match=match):
        parse(text, "vectors")


def test_degrees_and_comments(tmp_path):
    f = tmp_path / "d.txt"
    f.write_text("# header\n90 180\n\n270\n", encoding="utf-8")
    s = ingest(f, "angles-deg")
    np.testing.assert_allclose(s.angles, [math.pi / 2, math.pi, 3 * math.pi / 2], atol=1e-15)


def test_angles_reduced_mod_two_pi():
    s = parse("-1.0, 7.0", "angles-rad")
    np.testing.assert_allclose(s.angles, [2 * math.pi - 1.0, 7.0 - 2 * math.pi], atol=1e-14)
    assert np.all((s.angles >= 0) & (s.angles < 2 * math.pi))


def test_sample_invariants():
    with pytest.raises(SampleError):
        DirectionalSample(np.array([[1.0, 1e-4]]))
    with pytest.raises(SampleError):
        DirectionalSample(np.zeros((0, 3)))
    with pytest.raises(SampleError):
        DirectionalSample(np.ones((3, 1)))
    s = DirectionalSample(np.eye(3))
    with pytest.raises(ValueError):
        s.points[0, 0] = 2.0


@given(st.lists(st.floats(0, 2 * math.pi, exclude_max=True), min_size=1, max_size=30))
def test_angle_view_roundtrip(theta):
    s = DirectionalSample.from_angles(theta)
    back = np.column_stack([np.cos(s.angles), np.sin(s.angles)])
    np.testing.assert_allclose(back, s.points, atol=1e-12)


def test_emit_ingest_roundtrip(tmp_path, rng):
    for p in (2, 3, 7):
        x = rng.standard_normal((25, p))
        s = DirectionalSample(x / np.linalg.norm(x, axis=1, keepdims=True))
        emit(s, tmp_path / "s.csv")
        back = ingest(tmp_path / "s.csv")
        np.testing.assert_allclose(back.points, s.points, atol=1e-12, rtol=0)


@pytest.mark.parametrize("theta,gaps", [
    ([0, math.pi], [math.pi, math.pi]),
    ([0, math.pi / 2, math.pi, 3 * math.pi / 2], [math.pi / 2] * 4),
    ([0, math.pi / 2, math.pi / 2], [math.pi / 2, 0, 3 * math.pi / 2]),
])
def test_spacings_examples(theta, gaps):
    d = spacings(DirectionalSample.from_angles(theta)).gaps
    np.testing.assert_allclose(d, gaps, atol=1e-12)


def test_spacings_need_two_points_on_circle():
    with pytest.raises(SampleError):
        spacings(DirectionalSample.from_angles([1.0]))
    with pytest.raises(SampleError):
        spacings(DirectionalSample(np.eye(3)))


@settings(max_examples=50)
@given(st.lists(st.floats(0, 6.28), min_size=2, max_size=40), st.floats(0, 2 * math.pi))
def test_spacings_sum_and_rotation(theta, shift):
    s = DirectionalSample.from_angles(theta)
    d = spacings(s).gaps
    assert np.all(d >= 0)
    assert abs(d.sum() - 2 * math.pi) < 1e-10
    r = spacings(DirectionalSample.from_angles(np.asarray(theta) + shift)).gaps
    np.testing.assert_allclose(np.sort(r), np.sort(d), atol=1e-9)


def test_ordered_circular():
    o = OrderedCircular.from_sample(DirectionalSample.from_angles([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(o.u, np.array([1.0, 2.0, 3.0]) / (2 * math.pi))
    assert abs(o.u_bar - 1.0 / math.pi) < 1e-15
