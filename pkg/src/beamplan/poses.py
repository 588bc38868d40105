"""Pose representation and the sin/cos universal-joint embedding.

Every energy computation in this package runs over a 9-dimensional
embedded vector: 3 position coordinates plus (sin, cos) of the three
rotation angles. Embedding the angles this way keeps distances free of
wraparound artifacts: the contribution of an angle difference d to the
squared distance is 4*sin^2(d/2), smooth and 2*pi-periodic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAU = 2.0 * np.pi


class InvalidPoseError(ValueError):
    """Raised when a pose contains non-finite entries."""


def wrap_angle(a):
    """Wrap angles (scalar or array) into (-pi, pi]."""
    return -((np.pi - np.asarray(a, dtype=float)) % TAU - np.pi)


@dataclass(frozen=True)
class Pose:
    """A tabletop pose: position in metres, (roll, pitch, yaw) in radians.

    Angles are normalized to (-pi, pi] on construction. All entries must
    be finite.
    """

    position: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3).copy()
        ang = np.asarray(self.angles, dtype=float).reshape(3)
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(ang))):
            raise InvalidPoseError(
                f"non-finite pose: position={pos}, angles={ang}"
            )
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "angles", wrap_angle(ang))
        self.position.flags.writeable = False
        self.angles.flags.writeable = False

    def translated(self, dpos, dang=(0.0, 0.0, 0.0)) -> "Pose":
        """New pose offset by a position delta and an angle delta."""
        return Pose(self.position + np.asarray(dpos, dtype=float),
                    self.angles + np.asarray(dang, dtype=float))

    def almost_equal(self, other: "Pose", tol: float = 1e-12) -> bool:
        return (np.allclose(self.position, other.position, atol=tol)
                and np.allclose(self.angles, other.angles, atol=tol))


@dataclass(frozen=True)
class EmbeddedPose:
    """Universal-joint embedding of a Pose.

    trig holds [sin a0, cos a0, sin a1, cos a1, sin a2, cos a2]; each
    (sin, cos) pair lies on the unit circle.
    """

    position: np.ndarray
    trig: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3).copy()
        trig = np.asarray(self.trig, dtype=float).reshape(6).copy()
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "trig", trig)
        self.position.flags.writeable = False
        self.trig.flags.writeable = False

    def as_vector(self) -> np.ndarray:
        """The 9-vector (position then trig) used by all distance math."""
        return np.concatenate([self.position, self.trig])


def embed(p: Pose) -> EmbeddedPose:
    """Map a pose to its sin/cos embedding."""
    s = np.sin(p.angles)
    c = np.cos(p.angles)
    trig = np.empty(6)
    trig[0::2] = s
    trig[1::2] = c
    return EmbeddedPose(p.position, trig)


def embed_many(poses) -> np.ndarray:
    """Stack the 9-vectors of several poses into an (n, 9) array."""
    return np.stack([embed(p).as_vector() for p in poses]) if poses else np.zeros((0, 9))


def embedded_sq_distance(a: EmbeddedPose, b: EmbeddedPose, weights=None) -> float:
    """Squared Euclidean distance over the 9-vector difference.

    Position (metres) and trig (dimensionless) components are summed
    unweighted by default; pass a 9-vector of per-dimension weights to
    rescale.
    """
    diff = a.as_vector() - b.as_vector()
    if weights is not None:
        diff = diff * np.sqrt(np.asarray(weights, dtype=float))
    return float(diff @ diff)


def embedded_grad_to_pose(grad9: np.ndarray, angles: np.ndarray):
    """Chain-rule a 9-vector embedded-space gradient back to pose coordinates.

    d(sin a)/da = cos a and d(cos a)/da = -sin a, so the gradient w.r.t.
    angle k is grad_sin*cos(a_k) - grad_cos*sin(a_k). Returns
    (position gradient (3,), angle gradient (3,)).
    """
    grad9 = np.asarray(grad9, dtype=float).reshape(9)
    dpos = grad9[:3].copy()
    gs = grad9[3::2]
    gc = grad9[4::2]
    dang = gs * np.cos(angles) - gc * np.sin(angles)
    return dpos, dang
