import numpy as np
import pytest

from beamplan.poses import Pose
from beamplan.workspace import (BarrierParams, BoxWorkspace,
                                HalfspaceWorkspace, InfeasibleStateError,
                                ProjectionError, barrier_cost_and_gradient,
                                equality_hook, inequality_value, project_into)

UNIT_BOX = BoxWorkspace(lo=(-1, -1, -1), hi=(1, 1, 1))
Y_HALF = HalfspaceWorkspace(normal=(0, 1, 0), offset=0.0)  # y <= 0


def at(x, y, z, yaw=0.0):
    return Pose((x, y, z), (0, 0, yaw))


# -- signed values -----------------------------------------------------------

def test_box_centre_signed_distance():
    assert inequality_value(at(0, 0, 0), UNIT_BOX) == pytest.approx(-1.0)


def test_box_boundary_is_zero():
    assert inequality_value(at(1.0, 0, 0), UNIT_BOX) == pytest.approx(0.0)


def test_halfspace_outside_distance():
    assert inequality_value(at(0, 0.2, 0), Y_HALF) == pytest.approx(0.2)


def test_box_outside_corner_distance():
    # 0.3 beyond two faces: euclidean distance to the corner
    v = inequality_value(at(1.3, 1.3, 0), UNIT_BOX)
    assert v == pytest.approx(np.hypot(0.3, 0.3))


def test_halfspace_normal_normalized():
    ws = HalfspaceWorkspace(normal=(0, 2, 0), offset=0.5)
    assert inequality_value(at(0, 0.45, 0), ws) == pytest.approx(0.2)


# -- barrier -----------------------------------------------------------------

def test_barrier_cost_zero_at_unit_depth():
    cost, _ = barrier_cost_and_gradient(at(0, -1.0, 0), Y_HALF,
                                        BarrierParams(mu=0.01))
    assert cost == pytest.approx(0.0)


def test_barrier_cost_at_exp_depth():
    cost, _ = barrier_cost_and_gradient(at(0, -np.exp(-1.0), 0), Y_HALF,
                                        BarrierParams(mu=0.01))
    assert cost == pytest.approx(0.01)


def test_barrier_requires_strict_interior():
    with pytest.raises(InfeasibleStateError):
        barrier_cost_and_gradient(at(0, 0.0, 0), Y_HALF, BarrierParams())
    with pytest.raises(InfeasibleStateError):
        barrier_cost_and_gradient(at(0, 0.5, 0), Y_HALF, BarrierParams())


def test_barrier_diverges_towards_boundary():
    params = BarrierParams(mu=0.01)
    costs = [barrier_cost_and_gradient(at(0, -d, 0), Y_HALF, params)[0]
             for d in (0.5, 0.1, 0.01, 1e-4)]
    assert all(b > a for a, b in zip(costs, costs[1:]))


def test_barrier_gradient_matches_finite_differences():
    # 50 random strictly interior points per workspace kind, away from
    # face ties where the box gradient is non-smooth
    rng = np.random.default_rng(5)
    params = BarrierParams(mu=0.01)
    checked = 0
    while checked < 50:
        p = rng.uniform(-0.95, 0.95, 3)
        q = np.maximum(UNIT_BOX.lo - p, p - UNIT_BOX.hi)
        best, second = np.sort(q)[[-1, -2]]
        if best - second < 1e-3:
            continue
        _, grad = barrier_cost_and_gradient(Pose(p, (0, 0, 0)), UNIT_BOX, params)
        fd = np.zeros(3)
        for k in range(3):
            d = np.zeros(3)
            d[k] = 1e-6
            cp = barrier_cost_and_gradient(Pose(p + d, (0, 0, 0)), UNIT_BOX, params)[0]
            cm = barrier_cost_and_gradient(Pose(p - d, (0, 0, 0)), UNIT_BOX, params)[0]
            fd[k] = (cp - cm) / 2e-6
        assert np.linalg.norm(fd - grad) / max(np.linalg.norm(fd), 1e-12) <= 1e-5
        checked += 1
    for _ in range(50):
        p = rng.uniform(-1, 0, 3) * np.array([1, 1, 1]) - np.array([0, 0.05, 0])
        _, grad = barrier_cost_and_gradient(Pose(p, (0, 0, 0)), Y_HALF, params)
        fd = np.zeros(3)
        for k in range(3):
            d = np.zeros(3)
            d[k] = 1e-6
            cp = barrier_cost_and_gradient(Pose(p + d, (0, 0, 0)), Y_HALF, params)[0]
            cm = barrier_cost_and_gradient(Pose(p - d, (0, 0, 0)), Y_HALF, params)[0]
            fd[k] = (cp - cm) / 2e-6
        assert np.linalg.norm(fd - grad) / max(np.linalg.norm(fd), 1e-12) <= 1e-5


# -- projection --------------------------------------------------------------

def test_project_interior_pose_unchanged():
    pose = at(0.2, -0.3, 0.0, yaw=1.0)
    assert project_into(pose, UNIT_BOX, 0.01) is pose


def test_project_outside_face_moves_along_normal():
    pose = at(0, 0.1, 0)
    moved = project_into(pose, Y_HALF, 0.01)
    assert moved.position[1] == pytest.approx(-0.01)
    assert np.allclose(moved.position[[0, 2]], pose.position[[0, 2]])
    assert np.allclose(moved.angles, pose.angles)


def test_project_corner_clamps_componentwise():
    # oracle: euclidean projection onto a shrunk box is a per-axis clamp
    pose = at(1.4, -1.7, 0.3)
    slack = 0.05
    moved = project_into(pose, UNIT_BOX, slack)
    expected = np.clip(pose.position, UNIT_BOX.lo + slack, UNIT_BOX.hi - slack)
    assert np.allclose(moved.position, expected)


def test_project_idempotent():
    pose = at(2.0, 2.0, 2.0)
    once = project_into(pose, UNIT_BOX, 0.02)
    twice = project_into(once, UNIT_BOX, 0.02)
    assert once.almost_equal(twice)
    assert inequality_value(once, UNIT_BOX) <= -0.02 + 1e-12


def test_project_empty_region_raises():
    with pytest.raises(ProjectionError):
        project_into(at(0, 0, 0), UNIT_BOX, 1.5)


def test_project_requires_positive_slack():
    with pytest.raises(ValueError):
        project_into(at(0, 0, 0), UNIT_BOX, 0.0)


# -- equality hook -----------------------------------------------------------

def test_default_equality_hook_returns_zero():
    assert equality_hook(at(0.3, -0.2, 0.6, yaw=2.0)) == 0.0
