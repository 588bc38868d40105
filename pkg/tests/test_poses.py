import numpy as np
import pytest
from hypothesis import given, strategies as st

from beamplan.poses import (EmbeddedPose, InvalidPoseError, Pose, embed,
                            embedded_grad_to_pose, embedded_sq_distance,
                            wrap_angle)

finite_angles = st.floats(-10 * np.pi, 10 * np.pi, allow_nan=False)
finite_coords = st.floats(-10.0, 10.0, allow_nan=False)


def test_embed_identity_pose():
    e = embed(Pose((0, 0, 0), (0, 0, 0)))
    assert np.allclose(e.trig, [0, 1, 0, 1, 0, 1])
    assert np.allclose(e.position, 0)


def test_embed_quarter_roll():
    e = embed(Pose((0, 0, 0), (np.pi / 2, 0, 0)))
    assert np.allclose(e.trig, [1, 0, 0, 1, 0, 1])


@given(st.tuples(finite_angles, finite_angles, finite_angles),
       st.tuples(finite_coords, finite_coords, finite_coords))
def test_embed_trig_pairs_on_unit_circle(angles, position):
    e = embed(Pose(position, angles))
    for k in range(3):
        assert abs(e.trig[2 * k] ** 2 + e.trig[2 * k + 1] ** 2 - 1.0) < 1e-9


def test_non_finite_pose_rejected():
    with pytest.raises(InvalidPoseError):
        Pose((np.nan, 0, 0), (0, 0, 0))
    with pytest.raises(InvalidPoseError):
        Pose((0, 0, 0), (np.inf, 0, 0))


def test_angles_normalized_on_construction():
    p = Pose((0, 0, 0), (3 * np.pi, -3 * np.pi, np.pi))
    assert np.allclose(p.angles, [np.pi, np.pi, np.pi])
    assert np.all(p.angles > -np.pi)
    assert np.all(p.angles <= np.pi)


def test_wrap_angle_half_open_interval():
    assert wrap_angle(np.pi) == pytest.approx(np.pi)
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)


def test_sq_distance_identity():
    a = embed(Pose((0.3, -0.2, 0.1), (0.4, -1.0, 2.0)))
    assert embedded_sq_distance(a, a) == 0.0


def test_sq_distance_yaw_pi():
    a = embed(Pose((0, 0, 0), (0, 0, 0)))
    b = embed(Pose((0, 0, 0), (0, 0, np.pi)))
    assert embedded_sq_distance(a, b) == pytest.approx(4.0)


def test_sq_distance_translation_only():
    a = embed(Pose((0, 0, 0), (0.1, 0.2, 0.3)))
    b = embed(Pose((0.1, 0, 0), (0.1, 0.2, 0.3)))
    assert embedded_sq_distance(a, b) == pytest.approx(0.01)


@given(st.tuples(finite_angles, finite_angles, finite_angles),
       st.tuples(finite_angles, finite_angles, finite_angles))
def test_angle_contribution_matches_half_angle_formula(angles_a, angles_b):
    a = embed(Pose((0, 0, 0), angles_a))
    b = embed(Pose((0, 0, 0), angles_b))
    expected = sum(
        4.0 * np.sin((wa - wb) / 2.0) ** 2
        for wa, wb in zip(np.asarray(angles_a), np.asarray(angles_b))
    )
    assert embedded_sq_distance(a, b) == pytest.approx(expected, abs=1e-9)


@given(st.tuples(finite_coords, finite_coords, finite_coords),
       st.tuples(finite_angles, finite_angles, finite_angles),
       st.tuples(finite_coords, finite_coords, finite_coords),
       st.tuples(finite_angles, finite_angles, finite_angles))
def test_sq_distance_symmetric_and_nonnegative(pa, aa, pb, ab):
    a = embed(Pose(pa, aa))
    b = embed(Pose(pb, ab))
    dab = embedded_sq_distance(a, b)
    assert dab >= 0.0
    assert dab == embedded_sq_distance(b, a)


def test_sq_distance_zero_iff_componentwise_equal():
    a = embed(Pose((1, 2, 3), (0.1, 0.2, 0.3)))
    b = embed(Pose((1, 2, 3), (0.1, 0.2, 0.3)))
    assert embedded_sq_distance(a, b) == 0.0
    c = embed(Pose((1, 2, 3 + 1e-6), (0.1, 0.2, 0.3)))
    assert embedded_sq_distance(a, c) > 0.0


def test_weighted_distance_rescales_dimensions():
    a = EmbeddedPose((0, 0, 0), (0, 1, 0, 1, 0, 1))
    b = EmbeddedPose((1, 0, 0), (0, 1, 0, 1, 0, 1))
    assert embedded_sq_distance(a, b, weights=[4, 1, 1, 1, 1, 1, 1, 1, 1]) \
        == pytest.approx(4.0)


def test_embedded_grad_mapping_matches_finite_differences():
    # chain rule through the trig entries, checked against FD on a test
    # functional phi(pose) = w . embed(pose)
    rng = np.random.default_rng(7)
    for _ in range(20):
        w = rng.normal(size=9)
        pos = rng.uniform(-1, 1, 3)
        ang = rng.uniform(-3, 3, 3)
        pose = Pose(pos, ang)

        def phi(p: Pose) -> float:
            return float(w @ embed(p).as_vector())

        dpos, dang = embedded_grad_to_pose(w, pose.angles)
        eps = 1e-6
        for k in range(3):
            d = np.zeros(3)
            d[k] = eps
            fd = (phi(Pose(pos + d, ang)) - phi(Pose(pos - d, ang))) / (2 * eps)
            assert fd == pytest.approx(dpos[k], rel=1e-6, abs=1e-8)
            fd = (phi(Pose(pos, ang + d)) - phi(Pose(pos, ang - d))) / (2 * eps)
            assert fd == pytest.approx(dang[k], rel=1e-6, abs=1e-8)
