"""Scenario files: schema, validation, defaults and bundled setups.

A scenario is a JSON document (conventionally *.scenario) declaring the
hands, their workspaces and home poses, the components with spawn
regions and goal poses, optional planner overrides and scripted
disturbance events. See docs/scenarios.md for the field-by-field schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .energy import (DEFAULT_GOAL_EPSILON, ContactParams, GoalSpec)
from .planner import PlannerConfig
from .poses import Pose, embed
from .sim import DisturbanceEvent
from .workspace import BarrierParams, BoxWorkspace, HalfspaceWorkspace

#: Workspaces used when a scenario omits them: two half-spaces split at
#: y = 0 with a shared 0.05 m overlap band so cross-side exchanges have
#: an exchange region.
DEFAULT_OVERLAP = 0.05
DEFAULT_SPAWN_SEPARATION = 0.06
DEFAULT_TABLE = ((-0.5, 0.5), (-0.5, 0.5))


class ScenarioError(ValueError):
    """Schema or validation failure; message names the offending field."""


@dataclass(frozen=True)
class SpawnRegion:
    """Uniform sampling box for a component: x/y/yaw ranges, fixed z."""

    x: tuple
    y: tuple
    yaw: tuple
    z: float = 0.0


@dataclass(frozen=True)
class ComponentSpec:
    spawn: SpawnRegion
    goal: Pose


@dataclass(frozen=True)
class Scenario:
    name: str
    num_hands: int
    components: tuple
    workspaces: tuple
    homes: tuple
    events: tuple = ()
    planner_overrides: dict = field(default_factory=dict)
    spawn_min_separation: float = DEFAULT_SPAWN_SEPARATION
    table: tuple = DEFAULT_TABLE

    def goal_spec(self) -> GoalSpec:
        eps = self.planner_overrides.get("epsilon_g", DEFAULT_GOAL_EPSILON)
        return GoalSpec(targets=tuple(embed(c.goal) for c in self.components),
                        epsilon_g=eps)

    def planner_config(self, **extra) -> PlannerConfig:
        kw = dict(self.planner_overrides)
        kw.pop("epsilon_g", None)
        contact_kw = {}
        for key in ("epsilon", "sigma"):
            if key in kw:
                contact_kw[key] = kw.pop(key)
        barrier_kw = {}
        for key in ("mu", "margin"):
            if key in kw:
                barrier_kw[key] = kw.pop(key)
        kw.update(extra)
        kw.setdefault("contact", ContactParams(**contact_kw))
        kw.setdefault("barrier", BarrierParams(**barrier_kw))
        return PlannerConfig(workspaces=self.workspaces, homes=self.homes, **kw)


def default_workspaces(num_hands: int) -> tuple:
    """Two y-split half-spaces with the default overlap band."""
    if num_hands == 1:
        return (HalfspaceWorkspace(normal=(0, 1, 0), offset=1e6),)
    half = DEFAULT_OVERLAP / 2.0
    if num_hands != 2:
        raise ScenarioError(
            "default workspaces are defined for 1 or 2 hands; "
            "declare workspaces explicitly"
        )
    return (HalfspaceWorkspace(normal=(0, 1, 0), offset=half),
            HalfspaceWorkspace(normal=(0, -1, 0), offset=half))


def _pose_from(obj, where: str) -> Pose:
    try:
        return Pose(obj["p"], obj["r"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: bad pose {obj!r} ({exc})") from exc


def _range_from(obj, where: str) -> tuple:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or obj[0] > obj[1]):
        raise ScenarioError(f"{where}: expected [lo, hi], got {obj!r}")
    return (float(obj[0]), float(obj[1]))


def _workspace_from(obj, where: str):
    kind = obj.get("kind")
    try:
        if kind == "box":
            return BoxWorkspace(lo=obj["lo"], hi=obj["hi"])
        if kind == "halfspace":
            return HalfspaceWorkspace(normal=obj["normal"], offset=obj["offset"])
    except (KeyError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc
    raise ScenarioError(f"{where}: kind must be 'box' or 'halfspace', got {kind!r}")


def _event_from(obj, num_components: int, where: str) -> DisturbanceEvent:
    try:
        at_step = int(obj["at_step"])
        target = int(obj["target"])
        action = obj["action"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc
    if not 0 <= target < num_components:
        raise ScenarioError(f"{where}: target {target} out of range")
    if action == "set_pose":
        return DisturbanceEvent(at_step=at_step, target=target,
                                action="set_pose",
                                pose=_pose_from(obj["pose"], where))
    if action == "offset":
        delta = obj.get("delta", {})
        return DisturbanceEvent(
            at_step=at_step, target=target, action="offset",
            delta_position=np.asarray(delta.get("p", (0, 0, 0)), dtype=float),
            delta_angles=np.asarray(delta.get("r", (0, 0, 0)), dtype=float),
        )
    raise ScenarioError(f"{where}: unknown action {action!r}")


def parse_scenario(doc: dict, name_hint: str = "<inline>") -> Scenario:
    """Build and validate a Scenario from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    name = doc.get("name", name_hint)
    try:
        num_hands = int(doc["num_hands"])
    except (KeyError, TypeError, ValueError):
        raise ScenarioError("num_hands: required positive integer")
    if num_hands < 1:
        raise ScenarioError("num_hands: must be >= 1")

    raw_components = doc.get("components")
    if not raw_components:
        raise ScenarioError("components: at least one component required")
    components = []
    for i, c in enumerate(raw_components):
        where = f"components[{i}]"
        spawn_obj = c.get("spawn")
        if spawn_obj is None:
            raise ScenarioError(f"{where}.spawn: required")
        spawn = SpawnRegion(
            x=_range_from(spawn_obj.get("x"), f"{where}.spawn.x"),
            y=_range_from(spawn_obj.get("y"), f"{where}.spawn.y"),
            yaw=_range_from(spawn_obj.get("yaw", [0, 0]), f"{where}.spawn.yaw"),
            z=float(spawn_obj.get("z", 0.0)),
        )
        goal = _pose_from(c.get("goal"), f"{where}.goal")
        components.append(ComponentSpec(spawn=spawn, goal=goal))

    if "workspaces" in doc:
        raw_ws = doc["workspaces"]
        if len(raw_ws) != num_hands:
            raise ScenarioError("workspaces: need exactly one per hand")
        workspaces = tuple(_workspace_from(w, f"workspaces[{i}]")
                           for i, w in enumerate(raw_ws))
    else:
        workspaces = default_workspaces(num_hands)

    if "homes" in doc:
        raw_homes = doc["homes"]
        if len(raw_homes) != num_hands:
            raise ScenarioError("homes: need exactly one per hand")
        homes = tuple(_pose_from(h, f"homes[{i}]")
                      for i, h in enumerate(raw_homes))
    else:
        raise ScenarioError("homes: required, one pose per hand")

    events = tuple(_event_from(e, len(components), f"events[{i}]")
                   for i, e in enumerate(doc.get("events", [])))

    table = DEFAULT_TABLE
    if "table" in doc:
        table = (_range_from(doc["table"].get("x"), "table.x"),
                 _range_from(doc["table"].get("y"), "table.y"))

    scenario = Scenario(
        name=name,
        num_hands=num_hands,
        components=tuple(components),
        workspaces=workspaces,
        homes=homes,
        events=events,
        planner_overrides=dict(doc.get("planner", {})),
        spawn_min_separation=float(
            doc.get("spawn_min_separation", DEFAULT_SPAWN_SEPARATION)),
        table=table,
    )
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: Scenario):
    """Reject geometrically unreachable setups before any run starts."""
    cfg = scenario.planner_config()
    (tx, ty) = scenario.table
    for i, comp in enumerate(scenario.components):
        p = comp.goal.position
        if not (tx[0] <= p[0] <= tx[1] and ty[0] <= p[1] <= ty[1]):
            raise ScenarioError(
                f"components[{i}].goal: position {p} is outside the table")
        margins = [ws.signed_value(p) for ws in scenario.workspaces]
        if min(margins) > -cfg.goal_margin:
            raise ScenarioError(
                f"components[{i}].goal: position {p} is not at least "
                f"{cfg.goal_margin} m inside any workspace")
        corners = [
            np.array([x, y, comp.spawn.z])
            for x in comp.spawn.x for y in comp.spawn.y
        ]
        if not any(all(ws.signed_value(c) <= 0.0 for c in corners)
                   for ws in scenario.workspaces):
            raise ScenarioError(
                f"components[{i}].spawn: region is not fully inside any "
                f"single workspace")
    for i, home in enumerate(scenario.homes):
        if scenario.workspaces[i].signed_value(home.position) >= 0.0:
            raise ScenarioError(
                f"homes[{i}]: position {home.position} is not strictly "
                f"inside workspace {i}")


def bundled_scenario_path(name: str) -> Path:
    return Path(resources.files("beamplan").joinpath(
        "scenarios", f"{name}.scenario"))


def load_scenario(path_or_name) -> Scenario:
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(path_or_name)
    if not path.exists():
        candidate = bundled_scenario_path(str(path_or_name))
        if candidate.exists():
            path = candidate
        else:
            raise ScenarioError(f"scenario not found: {path_or_name}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return parse_scenario(doc, name_hint=path.stem)
