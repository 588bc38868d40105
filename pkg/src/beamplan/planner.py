"""Per-hand sub-goal selection and gradient stepping.

Each hand plans from the shared world snapshot with no knowledge of the
other hands' decisions: it scores every component with the selection
scalar, masks out components that are at goal, out of reach, in another
gripper or already delivered as far as its workspace allows, and descends
the gradient of the winning entry. Task sequencing, reattempts and
cross-workspace hand-offs are not represented anywhere below; they fall
out of re-running this myopic selection every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .energy import (ContactParams, EnergyReport, GoalSpec, goal_loss,
                     goal_loss_gradient, hand_drive_gradient, hand_energy)
from .poses import EmbeddedPose, Pose, embed, embedded_grad_to_pose
from .workspace import (BarrierParams, InfeasibleStateError,
                        barrier_cost_and_gradient, inequality_value)

ARBITRATION_MODES = ("none", "next_best")


@dataclass(frozen=True)
class PlannerConfig:
    """Step size, gates, caps and per-hand geometry for the planner.

    workspaces and homes are per-hand tuples supplied by the scenario;
    both may be empty for free-space unit tests. The velocity caps bound
    a single step's position/angle change so that the gain of a remote
    goal cannot catapult a hand. rho and equality_hook expose the
    quadratic-penalty extension point for equality constraints; none are
    instantiated by default.
    """

    t_s: float = 0.5
    max_steps: int = 2000
    contact: ContactParams = ContactParams()
    barrier: BarrierParams = BarrierParams()
    arbitration: str = "none"
    workspaces: tuple = ()
    homes: tuple = ()
    pos_rate_cap: float = 0.05
    ang_rate_cap: float = 0.25
    handoff_slack: float = 0.03
    goal_margin: float = 0.02
    backtrack_limit: int = 8
    rho: float = 0.0
    equality_hook: Optional[Callable[[Pose], float]] = None

    def __post_init__(self):
        if not self.t_s > 0:
            raise ValueError("t_s must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.arbitration not in ARBITRATION_MODES:
            raise ValueError(f"arbitration must be one of {ARBITRATION_MODES}")

    def workspace_of(self, hand: int):
        return self.workspaces[hand] if hand < len(self.workspaces) else None

    def home_of(self, hand: int) -> Optional[Pose]:
        return self.homes[hand] if hand < len(self.homes) else None


@dataclass
class HandDecision:
    """One hand's outcome for one step: chosen component and velocity.

    velocity is a pose tangent (3 position rates, 3 angle rates) already
    capped and backtracked; step stamps the world snapshot the decision
    was computed from.
    """

    hand: int
    selected: Optional[int]
    velocity: np.ndarray
    report: EnergyReport
    step: int


def effective_target(hand: int, component: int, goals: GoalSpec,
                     cfg: PlannerConfig):
    """This hand's reachable stand-in for a component's goal.

    If the true goal position lies outside the hand's workspace the
    target position is clamped to the nearest interior point (with
    handoff_slack of clearance); the clamped flag tells the selection
    gate to drop the component once it has been parked there.
    """
    target = goals.targets[component]
    ws = cfg.workspace_of(hand)
    if ws is None or ws.signed_value(target.position) <= 0.0:
        return target, False
    clamped = ws.project_position(target.position, cfg.handoff_slack)
    return EmbeddedPose(clamped, target.trig), True


def evaluate_hand(hand: int, world, goals: GoalSpec, cfg: PlannerConfig,
                  extra_excluded: frozenset = frozenset()) -> EnergyReport:
    """Score all components from one hand's viewpoint and pick the argmin.

    Reads the world snapshot only; never mutates anything.
    """
    h_emb = embed(world.hands[hand])
    ws = cfg.workspace_of(hand)
    held_elsewhere = {c for i, c in enumerate(world.attach)
                      if c is not None and i != hand}
    n = goals.num_components
    energies = np.empty(n)
    mask = np.zeros(n, dtype=bool)
    for j in range(n):
        c_emb = embed(world.components[j])
        target, clamped = effective_target(hand, j, goals, cfg)
        energies[j] = hand_energy(h_emb, c_emb, target, cfg.contact)
        if goal_loss(c_emb, goals.targets[j]) <= goals.epsilon_g:
            continue
        if ws is not None and ws.signed_value(world.components[j].position) > 0.0:
            continue
        if j in held_elsewhere or j in extra_excluded:
            continue
        if clamped and goal_loss(c_emb, target) <= goals.epsilon_g:
            continue  # parked at the edge of this workspace; someone else's job now
        mask[j] = True
    report = EnergyReport(per_component_energy=energies, feasible_mask=mask)
    if mask.any():
        candidates = np.where(mask)[0]
        report.selected = int(candidates[np.argmin(energies[candidates])])
    return report


def select_subgoal(hand: int, world, goals: GoalSpec, cfg: PlannerConfig,
                   extra_excluded: frozenset = frozenset()) -> Optional[int]:
    """Masked argmin over the selection scalar; None when nothing qualifies."""
    return evaluate_hand(hand, world, goals, cfg, extra_excluded).selected


def is_converged(world, goals: GoalSpec) -> bool:
    """True iff every component's goal loss is at or below epsilon_g."""
    return all(
        goal_loss(embed(c), t) <= goals.epsilon_g
        for c, t in zip(world.components, goals.targets)
    )


def total_goal_loss(world, goals: GoalSpec) -> float:
    return sum(goal_loss(embed(c), t)
               for c, t in zip(world.components, goals.targets))


def _cap_scale(v: np.ndarray, cfg: PlannerConfig) -> float:
    scale = 1.0
    pos_norm = float(np.linalg.norm(v[:3]))
    if pos_norm > cfg.pos_rate_cap:
        scale = cfg.pos_rate_cap / pos_norm
    ang_max = float(np.max(np.abs(v[3:])))
    if ang_max > cfg.ang_rate_cap:
        scale = min(scale, cfg.ang_rate_cap / ang_max)
    return scale


def _barrier_active(h: Pose, ws, cfg: PlannerConfig) -> bool:
    if ws is None or cfg.barrier.margin <= 0.0:
        return False
    return inequality_value(h, ws) > -cfg.barrier.margin


def _hand_objective(hand: int, h: Pose, c: Optional[Pose], target,
                    cfg: PlannerConfig) -> float:
    """The scalar a hand's step must not increase (backtracking check)."""
    ws = cfg.workspace_of(hand)
    if c is not None:
        cost = hand_energy(embed(h), embed(c), target, cfg.contact)
    else:
        home = cfg.home_of(hand)
        if home is None:
            cost = 0.0
        else:
            cost = goal_loss(embed(h), embed(home))
    if _barrier_active(h, ws, cfg):
        cost += barrier_cost_and_gradient(h, ws, cfg.barrier)[0]
    if cfg.equality_hook is not None and cfg.rho > 0.0:
        cost += cfg.rho * cfg.equality_hook(h) ** 2
    return cost


def _equality_force(h: Pose, cfg: PlannerConfig) -> np.ndarray:
    """Central-difference gradient of rho*r(h)^2 over the 6 pose coordinates."""
    step = 1e-6
    r0 = cfg.equality_hook(h)
    grad = np.zeros(6)
    for k in range(6):
        d = np.zeros(6)
        d[k] = step
        rp = cfg.equality_hook(h.translated(d[:3], d[3:]))
        rm = cfg.equality_hook(h.translated(-d[:3], -d[3:]))
        grad[k] = (rp - rm) / (2.0 * step)
    return cfg.rho * 2.0 * r0 * grad


def plan_step(hand: int, world, goals: GoalSpec, cfg: PlannerConfig,
              extra_excluded: frozenset = frozenset()) -> HandDecision:
    """Select a sub-goal for one hand and compute its descent velocity.

    The velocity is -t_s times the mapped-back gradient of the selected
    component's selection scalar (approach drive while free, carry
    gradient while attached, homing pull when idle), plus the barrier
    force when the hand is within the activation margin. The step is
    capped and then backtracked (halved up to backtrack_limit times, then
    zeroed) so the objective never increases.
    """
    h = world.hands[hand]
    ws = cfg.workspace_of(hand)
    if ws is not None and inequality_value(h, ws) >= 0.0:
        raise InfeasibleStateError(
            f"hand {hand} is not strictly inside its workspace"
        )
    report = evaluate_hand(hand, world, goals, cfg, extra_excluded)
    sel = report.selected
    attached = world.attach[hand]
    h_emb = embed(h)

    carrying = sel is not None and attached == sel
    comp_pose = world.components[sel] if sel is not None else None
    target = None
    if sel is not None:
        target, _ = effective_target(hand, sel, goals, cfg)

    if sel is None:
        home = cfg.home_of(hand)
        if home is None:
            grad9 = np.zeros(9)
        else:
            grad9 = 2.0 * (h_emb.as_vector() - embed(home).as_vector())
        dpos, dang = embedded_grad_to_pose(grad9, h.angles)
    elif carrying:
        grad9 = goal_loss_gradient(embed(comp_pose), target)
        dpos, dang = embedded_grad_to_pose(grad9, comp_pose.angles)
        report.hand_gradient = grad9
    else:
        grad9 = hand_drive_gradient(h_emb, embed(comp_pose), cfg.contact)
        dpos, dang = embedded_grad_to_pose(grad9, h.angles)
        report.hand_gradient = grad9

    v = -cfg.t_s * np.concatenate([dpos, dang])
    if _barrier_active(h, ws, cfg):
        _, bgrad = barrier_cost_and_gradient(h, ws, cfg.barrier)
        v[:3] -= cfg.t_s * bgrad
    if cfg.equality_hook is not None and cfg.rho > 0.0:
        v -= cfg.t_s * _equality_force(h, cfg)
    v *= _cap_scale(v, cfg)

    base = _hand_objective(hand, h, comp_pose, target, cfg)
    scale = 1.0
    for _ in range(cfg.backtrack_limit + 1):
        if not np.any(v):
            break
        h_try = h.translated(scale * v[:3], scale * v[3:])
        c_try = comp_pose
        if carrying:
            c_try = comp_pose.translated(scale * v[:3], scale * v[3:])
        if ws is not None and inequality_value(h_try, ws) >= 0.0 \
                and _barrier_active(h, ws, cfg):
            scale *= 0.5  # log barrier undefined outside; shorten the step
            continue
        cost = _hand_objective(hand, h_try, c_try, target, cfg)
        if cost <= base + 1e-12:
            v = scale * v
            break
        scale *= 0.5
    else:
        v = np.zeros(6)

    return HandDecision(hand=hand, selected=sel, velocity=v,
                        report=report, step=world.step)


def plan_all(world, goals: GoalSpec, cfg: PlannerConfig) -> list:
    """Independent per-hand decisions over one immutable snapshot.

    Hands are evaluated in index order but each evaluation reads only
    the snapshot, so any evaluation order (or concurrent evaluation)
    produces identical output. With arbitration="next_best" a post-pass
    reassigns contested components: the lower-energy hand keeps its
    claim and the others re-run selection with that component masked.
    """
    hands = range(len(world.hands))
    decisions = [plan_step(i, world, goals, cfg) for i in hands]
    if cfg.arbitration != "next_best":
        return decisions
    excluded = [set() for _ in hands]
    for _ in range(len(world.hands) * goals.num_components):
        claims = {}
        for d in decisions:
            if d.selected is not None:
                claims.setdefault(d.selected, []).append(d)
        contested = {c: ds for c, ds in claims.items() if len(ds) > 1}
        if not contested:
            break
        for comp, ds in contested.items():
            ds = sorted(ds, key=lambda d: (d.report.per_component_energy[comp],
                                           d.hand))
            for loser in ds[1:]:
                excluded[loser.hand].add(comp)
        decisions = [
            plan_step(i, world, goals, cfg, frozenset(excluded[i]))
            if excluded[i] else decisions[i]
            for i in hands
        ]
    return decisions
