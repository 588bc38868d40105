"""Goal loss, contact gating and per-hand energies with their gradients.

The per-hand, per-component energy couples two ingredients: a goal loss
g (squared embedded distance of a component to its target) and a contact
pseudo-probability P (1 when hand and component are within a contact
radius, 0 otherwise). The product P*g carries the task semantics but is
useless as a descent landscape on its own: it is identically zero for
every non-contacting hand and its indicator factor has no gradient. Two
companions fix that without touching the discrete semantics:

* a smooth contact surrogate exp(-d^2/sigma^2) used wherever a gradient
  through the contact term is needed;
* a composite selection scalar  s*g + (1-s)*(d^2 + g) = g + (1-s)*d^2
  (s the surrogate, d^2 the embedded hand-component distance) so that
  among off-goal components the "closest feasible work" wins the argmin.
  In contact (s -> 1) the scalar collapses back to the plain product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .poses import EmbeddedPose, embedded_sq_distance

#: Defaults shared by every scenario unless overridden: contact radius
#: 0.02 in embedded norm (squared), surrogate length 0.15, goal threshold
#: 0.01 squared.
DEFAULT_CONTACT_EPSILON = 0.02 ** 2
DEFAULT_CONTACT_SIGMA = 0.15
DEFAULT_GOAL_EPSILON = 0.01 ** 2


@dataclass(frozen=True)
class ContactParams:
    """Contact gate threshold and smoothing length of the surrogate."""

    epsilon: float = DEFAULT_CONTACT_EPSILON
    sigma: float = DEFAULT_CONTACT_SIGMA

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("contact epsilon must be > 0")
        if not self.sigma > 0:
            raise ValueError("contact sigma must be > 0")


@dataclass(frozen=True)
class GoalSpec:
    """Embedded target poses for all components plus the goal threshold."""

    targets: tuple
    epsilon_g: float = DEFAULT_GOAL_EPSILON

    def __post_init__(self):
        if len(self.targets) < 1:
            raise ValueError("GoalSpec needs at least one target")
        if not self.epsilon_g > 0:
            raise ValueError("epsilon_g must be > 0")
        object.__setattr__(self, "targets", tuple(self.targets))

    @property
    def num_components(self) -> int:
        return len(self.targets)


@dataclass
class EnergyReport:
    """One hand's view of all components at a single step.

    feasible_mask marks the components this hand may select: off-goal,
    currently inside the hand's workspace, not held by another hand and
    not already delivered as far as this workspace allows. selected, when
    present, is the masked argmin of per_component_energy (lowest index
    on ties). hand_gradient is the drive gradient of the selected entry
    over the hand's 9 embedded coordinates.
    """

    per_component_energy: np.ndarray
    feasible_mask: np.ndarray
    selected: Optional[int] = None
    hand_gradient: np.ndarray = field(default_factory=lambda: np.zeros(9))


def goal_loss(c: EmbeddedPose, c_star: EmbeddedPose) -> float:
    """Squared embedded distance of a component to its target pose."""
    return embedded_sq_distance(c, c_star)


def goal_loss_gradient(c: EmbeddedPose, c_star: EmbeddedPose) -> np.ndarray:
    """Gradient of goal_loss w.r.t. the component's 9 embedded coordinates."""
    return 2.0 * (c.as_vector() - c_star.as_vector())


def contact_prob(h: EmbeddedPose, c: EmbeddedPose, params: ContactParams) -> int:
    """Hard contact gate: 1 iff the embedded distance^2 is strictly below epsilon."""
    return 1 if embedded_sq_distance(c, h) < params.epsilon else 0


def smooth_contact_prob(h: EmbeddedPose, c: EmbeddedPose, params: ContactParams) -> float:
    """Gradient-friendly surrogate exp(-d^2/sigma^2); 1 at d=0, decreasing in d^2."""
    d2 = embedded_sq_distance(c, h)
    return float(np.exp(-d2 / params.sigma ** 2))


def hand_energy(h: EmbeddedPose, c: EmbeddedPose, c_star: EmbeddedPose,
                params: ContactParams) -> float:
    """Selection scalar s*g + (1-s)*(d^2 + g) for one hand-component pair.

    Collapses to the plain product P*g in contact and adds the reach
    term d^2 outside it, so the argmin prefers close, off-goal work.
    """
    g = goal_loss(c, c_star)
    d2 = embedded_sq_distance(c, h)
    s = float(np.exp(-d2 / params.sigma ** 2))
    return s * g + (1.0 - s) * (d2 + g)


def hand_energy_gradient(h: EmbeddedPose, c: EmbeddedPose, c_star: EmbeddedPose,
                         params: ContactParams):
    """The two gradient routes of the contact-gated energy.

    Returns (grad_h, grad_c), both 9-vectors over embedded coordinates:

    * grad_h = grad_h[smooth_contact_prob] * g  -- the contact term's
      hand-side gradient with the component frozen (stop gradient), the
      direction that raises the contact probability, gained by g;
    * grad_c = contact_prob * grad_c[g]  -- the carry gradient, active
      only in contact. The unrealisable route through the contact term's
      component argument is never produced.
    """
    hv = h.as_vector()
    cv = c.as_vector()
    d2 = float((cv - hv) @ (cv - hv))
    sigma2 = params.sigma ** 2
    s = np.exp(-d2 / sigma2)
    g = goal_loss(c, c_star)
    grad_h = (2.0 * s / sigma2) * (cv - hv) * g
    p = 1 if d2 < params.epsilon else 0
    grad_c = p * goal_loss_gradient(c, c_star)
    return grad_h, grad_c


def hand_drive_gradient(h: EmbeddedPose, c: EmbeddedPose,
                        params: ContactParams) -> np.ndarray:
    """Hand-side gradient of the selection scalar, grad_h[(1-s)*d^2].

    This is the approach drive: far from the component it behaves like a
    plain quadratic pull 2*(h-c), near contact it hands over to the
    carry gradient. The goal-loss part of the scalar is constant in the
    hand's coordinates and drops out.
    """
    hv = h.as_vector()
    cv = c.as_vector()
    diff = hv - cv
    d2 = float(diff @ diff)
    sigma2 = params.sigma ** 2
    s = np.exp(-d2 / sigma2)
    return 2.0 * diff * ((1.0 - s) + s * d2 / sigma2)
