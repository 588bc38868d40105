"""Workspace reachability sets and their log-barrier absorption.

Each hand is confined to a geometric region over the table, expressed as
a signed-distance inequality f(p) <= 0. The planner absorbs the
constraint with an interior-point term -mu*ln(-f) while a hand is within
`margin` of the boundary; the simulator additionally projects hands back
inside after every step, so feasibility never depends on the barrier
alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poses import Pose


class InfeasibleStateError(RuntimeError):
    """Raised when a pose required to be strictly interior is not."""


class ProjectionError(ValueError):
    """Raised when the requested slack leaves no feasible region."""


@dataclass(frozen=True)
class BoxWorkspace:
    """Axis-aligned box {p : lo <= p <= hi}."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(3)
        hi = np.asarray(self.hi, dtype=float).reshape(3)
        if not np.all(lo < hi):
            raise ValueError(f"box needs lo < hi per axis, got {lo} / {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def signed_value(self, p: np.ndarray) -> float:
        q = np.maximum(self.lo - p, p - self.hi)
        if np.all(q <= 0.0):
            return float(np.max(q))
        return float(np.linalg.norm(np.maximum(q, 0.0)))

    def boundary_gradient(self, p: np.ndarray) -> np.ndarray:
        q = np.maximum(self.lo - p, p - self.hi)
        sign = np.where(self.lo - p > p - self.hi, -1.0, 1.0)
        grad = np.zeros(3)
        if np.all(q <= 0.0):
            axis = int(np.argmax(q))
            grad[axis] = sign[axis]
            return grad
        r = np.maximum(q, 0.0)
        return sign * r / np.linalg.norm(r)

    def project_position(self, p: np.ndarray, slack: float) -> np.ndarray:
        lo = self.lo + slack
        hi = self.hi - slack
        if np.any(lo > hi):
            raise ProjectionError(f"slack {slack} empties box workspace")
        return np.clip(p, lo, hi)


@dataclass(frozen=True)
class HalfspaceWorkspace:
    """Half-space {p : normal.p - offset <= 0}; normal need not be unit."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(3)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise ValueError("half-space normal must be non-zero")
        object.__setattr__(self, "normal", n / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    def signed_value(self, p: np.ndarray) -> float:
        return float(self.normal @ p - self.offset)

    def boundary_gradient(self, p: np.ndarray) -> np.ndarray:
        return self.normal.copy()

    def project_position(self, p: np.ndarray, slack: float) -> np.ndarray:
        f = self.signed_value(p)
        if f <= -slack:
            return np.asarray(p, dtype=float).copy()
        return p - (f + slack) * self.normal


WorkspaceSet = (BoxWorkspace, HalfspaceWorkspace)


@dataclass(frozen=True)
class BarrierParams:
    """Barrier weight and activation distance.

    margin is the distance from the boundary within which the planner
    adds the barrier force to a hand's objective; 0 disables the force
    entirely (the simulator's per-step projection still guarantees
    feasibility). The cost formula itself never involves margin.
    """

    mu: float = 0.01
    margin: float = 0.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("barrier mu must be > 0")
        if self.margin < 0:
            raise ValueError("barrier margin must be >= 0")


def inequality_value(h: Pose, ws) -> float:
    """Signed distance of the hand's position to the workspace boundary.

    <= 0 inside (0 on the boundary), > 0 outside, in metres.
    """
    return ws.signed_value(h.position)


def barrier_cost_and_gradient(h: Pose, ws, params: BarrierParams):
    """Interior-point cost -mu*ln(-f) and its position gradient -mu/f * grad f.

    Requires the hand strictly inside the workspace; the cost diverges as
    the boundary is approached from inside.
    """
    f = ws.signed_value(h.position)
    if f >= 0.0:
        raise InfeasibleStateError(
            f"hand at {h.position} is outside or on the workspace boundary (f={f})"
        )
    cost = -params.mu * np.log(-f)
    grad = (-params.mu / f) * ws.boundary_gradient(h.position)
    return float(cost), grad


def project_into(h: Pose, ws, slack: float) -> Pose:
    """Minimal-position-change projection to {f <= -slack}; angles unchanged."""
    if not slack > 0:
        raise ValueError("projection slack must be > 0")
    p = ws.project_position(h.position, slack)
    if np.array_equal(p, h.position):
        return h
    return Pose(p, h.angles)


def equality_hook(h: Pose) -> float:
    """Default equality-constraint residual: none are instantiated.

    Custom hooks (any callable Pose -> float) can be handed to the
    planner, which folds rho * residual^2 into each hand's objective.
    """
    return 0.0
