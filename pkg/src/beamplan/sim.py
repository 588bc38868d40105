"""Kinematic world model: hands, beams, grasps, disturbances, stepping.

The world is deliberately simple: hands are free-flying grippers, beams
are poses with a rectangular footprint used only for spawning and
rendering, and there is no inter-body physics. A grasp freezes the
world-frame position offset and the per-axis angle offsets between hand
and component at first contact, so an imperfect grasp stays imperfect
until release. Exactly one stepping loop mutates state; planner
evaluations read immutable snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .energy import GoalSpec, contact_prob, goal_loss
from .planner import PlannerConfig, is_converged, plan_all
from .poses import Pose, embed, wrap_angle
from .workspace import inequality_value, project_into

#: Slack used when projecting hands back into their workspaces; keeps the
#: post-projection pose strictly interior so the next plan_step's
#: precondition holds.
PROJECTION_SLACK = 1e-9

#: Beam footprint (m) from the simplified benchmark geometry; used for
#: spawn separation defaults and by renderers, never for contact math.
BEAM_LENGTH = 0.3
BEAM_WIDTH = 0.04

MAX_SPAWN_ATTEMPTS = 10_000

EVENT_KINDS = ("attach", "detach", "subgoal_change", "goal_reached",
               "disturbance", "handover")


class StalenessError(RuntimeError):
    """Raised when decisions were planned from a different world step."""


class InitializationError(RuntimeError):
    """Raised when spawn sampling cannot place all components."""


@dataclass(frozen=True)
class DisturbanceEvent:
    """A scripted or operator-injected change to one component's pose."""

    at_step: int
    target: int
    action: str  # "set_pose" | "offset"
    pose: Optional[Pose] = None
    delta_position: Optional[np.ndarray] = None
    delta_angles: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.at_step < 0:
            raise ValueError("at_step must be >= 0")
        if self.action not in ("set_pose", "offset"):
            raise ValueError(f"unknown disturbance action {self.action!r}")
        if self.action == "set_pose" and self.pose is None:
            raise ValueError("set_pose event needs a pose")
        if self.action == "offset" and self.delta_position is None:
            raise ValueError("offset event needs a delta")

    def apply(self, pose: Pose) -> Pose:
        if self.action == "set_pose":
            return self.pose
        dang = self.delta_angles if self.delta_angles is not None else (0, 0, 0)
        return pose.translated(self.delta_position, dang)


@dataclass(frozen=True)
class EventRecord:
    step: int
    kind: str
    hand: Optional[int] = None
    component: Optional[int] = None

    def to_dict(self) -> dict:
        return {"step": self.step, "kind": self.kind,
                "hand": self.hand, "component": self.component}


class EventLog:
    """Ordered record of attaches, detaches, goal completions and disturbances.

    A handover record is synthesized purely by pattern: whenever a
    component is attached by a hand different from the one that last
    released it (and that release was not a goal placement), the log adds
    a handover entry. Nothing in the planner produces or consumes it.
    """

    def __init__(self):
        self.records: list[EventRecord] = []
        self._last_release: dict[int, tuple[int, bool]] = {}

    def append(self, step: int, kind: str, hand: Optional[int] = None,
               component: Optional[int] = None):
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        self.records.append(EventRecord(step, kind, hand, component))
        if kind == "detach":
            at_goal = any(r.kind == "goal_reached" and r.step == step
                          and r.component == component for r in self.records)
            self._last_release[component] = (hand, at_goal)
        elif kind == "attach":
            prev = self._last_release.get(component)
            if prev is not None and prev[0] != hand and not prev[1]:
                self.records.append(
                    EventRecord(step, "handover", hand, component))
        elif kind == "disturbance":
            self._last_release.pop(component, None)

    def of_kind(self, kind: str) -> list[EventRecord]:
        return [r for r in self.records if r.kind == kind]

    def to_dicts(self) -> list[dict]:
        return [r.to_dict() for r in self.records]


@dataclass(frozen=True)
class GraspOffset:
    """World-frame position offset and per-axis angle offsets, frozen at attach."""

    dposition: np.ndarray
    dangles: np.ndarray


@dataclass(frozen=True)
class WorldState:
    """Immutable snapshot: poses of all hands and components plus grasp state.

    attach[i] is the component index hand i is holding (or None);
    grasps[i] the frozen hand-to-component offset for that hold.
    """

    step: int
    hands: tuple
    components: tuple
    attach: tuple
    grasps: tuple
    rng_seed: int
    selections: tuple = ()

    @property
    def num_hands(self) -> int:
        return len(self.hands)

    @property
    def num_components(self) -> int:
        return len(self.components)


def init_world(scenario, seed: int) -> WorldState:
    """Sample component spawns and place hands at their homes.

    Components draw uniformly from their spawn regions in declaration
    order, rejecting placements whose centre comes within the scenario's
    minimum separation of an earlier component. Deterministic for a
    fixed seed.
    """
    rng = np.random.default_rng(seed)
    placed: list[Pose] = []
    attempts = 0
    for comp in scenario.components:
        region = comp.spawn
        while True:
            attempts += 1
            if attempts > MAX_SPAWN_ATTEMPTS:
                raise InitializationError(
                    f"could not place component {len(placed)} after "
                    f"{MAX_SPAWN_ATTEMPTS} attempts; spawn region too crowded"
                )
            x = rng.uniform(region.x[0], region.x[1])
            y = rng.uniform(region.y[0], region.y[1])
            yaw = rng.uniform(region.yaw[0], region.yaw[1])
            pose = Pose((x, y, region.z), (0.0, 0.0, yaw))
            if all(np.linalg.norm(pose.position - q.position)
                   >= scenario.spawn_min_separation for q in placed):
                placed.append(pose)
                break
    hands = tuple(scenario.homes)
    return WorldState(
        step=0,
        hands=hands,
        components=tuple(placed),
        attach=(None,) * len(hands),
        grasps=(None,) * len(hands),
        rng_seed=seed,
        selections=(None,) * len(hands),
    )


def step_world(world: WorldState, decisions, goals: GoalSpec,
               cfg: PlannerConfig, events=(), log: Optional[EventLog] = None
               ) -> WorldState:
    """Advance the world one step under the hands' decisions.

    Order: scripted disturbances, selection-change releases, hand
    integration, workspace projection, rigid placement of held
    components, contact attaches, goal-reached detaches. The decisions
    must have been planned from exactly this snapshot.
    """
    for d in decisions:
        if d.step != world.step:
            raise StalenessError(
                f"decision for hand {d.hand} was planned at step {d.step}, "
                f"world is at step {world.step}"
            )
    if log is None:
        log = EventLog()
    step = world.step
    components = list(world.components)
    attach = list(world.attach)
    grasps = list(world.grasps)

    # Disturbances teleport components and break any grasp on them.
    for ev in events:
        components[ev.target] = ev.apply(components[ev.target])
        log.append(step, "disturbance", component=ev.target)
        for i, held in enumerate(attach):
            if held == ev.target:
                attach[i] = None
                grasps[i] = None
                log.append(step, "detach", hand=i, component=ev.target)

    # A decision that no longer selects the held component opens the gripper.
    for d in decisions:
        held = attach[d.hand]
        if held is not None and d.selected != held:
            attach[d.hand] = None
            grasps[d.hand] = None
            log.append(step, "detach", hand=d.hand, component=held)

    # Integrate hand velocities, then keep hands strictly inside their
    # workspaces; held components follow the final hand pose rigidly.
    hands = list(world.hands)
    for d in decisions:
        pose = world.hands[d.hand].translated(d.velocity[:3], d.velocity[3:])
        ws = cfg.workspace_of(d.hand)
        if ws is not None:
            pose = project_into(pose, ws, PROJECTION_SLACK)
        hands[d.hand] = pose
    for i, held in enumerate(attach):
        if held is not None:
            g = grasps[i]
            components[held] = Pose(hands[i].position + g.dposition,
                                    hands[i].angles + g.dangles)

    # New grasps: a hand in contact with its selected, unheld component
    # freezes the relative offset. Lowest hand index wins a same-step race.
    for d in sorted(decisions, key=lambda d: d.hand):
        i = d.hand
        if d.selected is None or attach[i] is not None:
            continue
        if d.selected in (c for j, c in enumerate(attach) if j != i):
            continue
        c = components[d.selected]
        if contact_prob(embed(hands[i]), embed(c), cfg.contact) == 1:
            attach[i] = d.selected
            grasps[i] = GraspOffset(
                dposition=c.position - hands[i].position,
                dangles=wrap_angle(c.angles - hands[i].angles),
            )
            log.append(step, "attach", hand=i, component=d.selected)

    # Release components that reached their goals.
    for i, held in enumerate(attach):
        if held is None:
            continue
        if goal_loss(embed(components[held]), goals.targets[held]) <= goals.epsilon_g:
            log.append(step, "goal_reached", hand=i, component=held)
            attach[i] = None
            grasps[i] = None
            log.append(step, "detach", hand=i, component=held)

    selections = list(world.selections)
    for d in decisions:
        selections[d.hand] = d.selected
        if d.selected != world.selections[d.hand]:
            log.append(step, "subgoal_change", hand=d.hand, component=d.selected)

    return WorldState(
        step=step + 1,
        hands=tuple(hands),
        components=tuple(components),
        attach=tuple(attach),
        grasps=tuple(grasps),
        rng_seed=world.rng_seed,
        selections=tuple(selections),
    )


@dataclass
class LossTrace:
    """Per-step normalized total loss plus raw per-component losses.

    normalized is False only for the degenerate world that starts at
    zero loss, in which case the totals are emitted unnormalized.
    """

    steps: list = field(default_factory=list)
    normalized_total: list = field(default_factory=list)
    per_component: list = field(default_factory=list)
    selected: list = field(default_factory=list)
    initial_total: float = 0.0
    normalized: bool = True

    def record(self, world: WorldState, goals: GoalSpec, selections):
        losses = [goal_loss(embed(c), t)
                  for c, t in zip(world.components, goals.targets)]
        total = float(sum(losses))
        if not self.steps:
            self.initial_total = total
            self.normalized = total > 0.0
        norm = total / self.initial_total if self.normalized else total
        self.steps.append(world.step)
        self.normalized_total.append(norm)
        self.per_component.append(losses)
        self.selected.append(list(selections))

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class RunResult:
    final: WorldState
    trace: LossTrace
    log: EventLog
    converged: bool
    steps: int
    max_boundary_violation: float


def run(scenario, seed: int, cfg: Optional[PlannerConfig] = None) -> RunResult:
    """Plan/step until convergence (with no scripted events pending) or max_steps.

    Non-convergence is a result, not an error. The trace is normalized by
    the loss at step 0 so a freshly initialised run starts at 1.0; the
    returned max_boundary_violation is the largest workspace
    inequality value seen over all hands and steps (feasible runs stay
    <= 0).
    """
    if cfg is None:
        cfg = scenario.planner_config()
    goals = scenario.goal_spec()
    world = init_world(scenario, seed)
    log = EventLog()
    trace = LossTrace()
    trace.record(world, goals, world.selections)
    violation = _max_violation(world, cfg)
    pending = sorted(scenario.events, key=lambda e: e.at_step)
    while world.step < cfg.max_steps:
        if is_converged(world, goals) and not pending:
            break
        decisions = plan_all(world, goals, cfg)
        due = [e for e in pending if e.at_step == world.step]
        pending = [e for e in pending if e.at_step > world.step]
        world = step_world(world, decisions, goals, cfg, due, log)
        trace.record(world, goals, world.selections)
        violation = max(violation, _max_violation(world, cfg))
    return RunResult(
        final=world,
        trace=trace,
        log=log,
        converged=is_converged(world, goals),
        steps=world.step,
        max_boundary_violation=violation,
    )


def _max_violation(world: WorldState, cfg: PlannerConfig) -> float:
    worst = -np.inf
    for i, h in enumerate(world.hands):
        ws = cfg.workspace_of(i)
        if ws is not None:
            worst = max(worst, inequality_value(h, ws))
    return worst
