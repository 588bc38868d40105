"""Live operator bridge: one simulation, streamed snapshots, queued commands.

The session core is synchronous and single-writer: network handlers only
append validated commands to a queue, and the tick loop drains the queue
at step boundaries, steps the world and emits snapshot copies. Transport
is WebSocket with one JSON envelope {"v":1,"type":...,"seq":...,
"payload":...} per message; see docs/protocol.md for the exact schema.

Commands move components, never hands. A simulation that has converged
keeps stepping so fresh disturbances immediately restart progress.
"""

from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, replace
from .energy import goal_loss
from .planner import is_converged, plan_all
from .poses import Pose, embed
from .scenario import Scenario
from .sim import DisturbanceEvent, EventLog, LossTrace, init_world, step_world
from .workspace import BoxWorkspace, HalfspaceWorkspace

log = logging.getLogger("beamplan.bridge")

PROTOCOL_VERSION = 1
SEND_QUEUE_LIMIT = 256
DEFAULT_TICK_HZ = 30.0

COMMAND_TYPES = ("move_component", "pause", "resume", "single_step",
                 "reset", "set_param", "get_log")


def envelope(msg_type: str, payload: dict, seq: int) -> dict:
    return {"v": PROTOCOL_VERSION, "type": msg_type, "seq": seq,
            "payload": payload}


def pose_payload(p: Pose) -> dict:
    return {"p": [float(v) for v in p.position],
            "r": [float(v) for v in p.angles]}


def _workspace_payload(ws) -> dict:
    if isinstance(ws, BoxWorkspace):
        return {"kind": "box", "lo": ws.lo.tolist(), "hi": ws.hi.tolist()}
    if isinstance(ws, HalfspaceWorkspace):
        return {"kind": "halfspace", "normal": ws.normal.tolist(),
                "offset": ws.offset}
    return {"kind": "none"}


class LiveSession:
    """Synchronous simulation wrapper with a step-boundary command queue."""

    def __init__(self, scenario: Scenario, seed: int, cfg=None):
        self.scenario = scenario
        self.cfg = cfg if cfg is not None else scenario.planner_config()
        self.goals = scenario.goal_spec()
        self.status = "running"
        self._pending_controls: list = []
        self._pending_moves: list = []
        self._single_steps = 0
        self._reset(seed)

    def _reset(self, seed: int):
        self.seed = seed
        self.world = init_world(self.scenario, seed)
        self.log = EventLog()
        self.trace = LossTrace()
        self.trace.record(self.world, self.goals, self.world.selections)
        self._last_decisions = None
        self.status = "running"
        self._pending_moves.clear()
        self._single_steps = 0

    # -- command intake (called from network handlers; enqueue only) --

    def submit(self, message: dict):
        """Validate a command envelope; enqueue it; return the ack payload.

        The acknowledgement precedes application: accepted commands take
        effect at the next step boundary.
        """
        if not isinstance(message, dict):
            return {"status": "rejected", "reason": "parse: not an object"}
        cmd = message.get("type")
        payload = message.get("payload", {})
        if cmd not in COMMAND_TYPES:
            return {"status": "rejected", "reason": f"parse: unknown type {cmd!r}"}
        if cmd == "move_component":
            try:
                target = int(payload["id"])
                pose = Pose(payload["pose"]["p"], payload["pose"]["r"])
            except (KeyError, TypeError, ValueError) as exc:
                return {"status": "rejected", "reason": f"parse: {exc}"}
            if not 0 <= target < self.world.num_components:
                return {"status": "rejected",
                        "reason": f"id: no component {target}"}
            self._pending_moves.append((target, pose))
        elif cmd == "reset":
            try:
                seed = int(payload.get("seed", self.seed))
            except (TypeError, ValueError) as exc:
                return {"status": "rejected", "reason": f"parse: {exc}"}
            self._pending_controls.append(("reset", seed))
        elif cmd == "set_param":
            name = payload.get("name")
            value = payload.get("value")
            if name not in ("t_s", "epsilon_g"):
                return {"status": "rejected", "reason": f"param: {name!r}"}
            if not isinstance(value, (int, float)) or not value > 0:
                return {"status": "rejected",
                        "reason": "param: value must be > 0"}
            self._pending_controls.append(("set_param", (name, float(value))))
        elif cmd == "get_log":
            return {"status": "accepted", "records": self.log.to_dicts()}
        else:
            self._pending_controls.append((cmd, None))
        return {"status": "accepted"}

    # -- stepping (called from the single tick loop) --

    def tick(self) -> bool:
        """Drain controls, then advance one step unless paused.

        Queued component moves are consumed only by an executed step, so
        a drag during pause takes effect on resume. Returns whether the
        world stepped.
        """
        for kind, arg in self._pending_controls:
            if kind == "pause":
                self.status = "paused"
            elif kind == "resume":
                self.status = "running"
            elif kind == "single_step":
                self._single_steps += 1
            elif kind == "reset":
                self._reset(arg)
            elif kind == "set_param":
                name, value = arg
                if name == "t_s":
                    self.cfg = replace(self.cfg, t_s=value)
                else:
                    self.goals = replace(self.goals, epsilon_g=value)
        self._pending_controls.clear()

        stepping = self.status == "running" or self._single_steps > 0
        if not stepping:
            return False
        if self._single_steps > 0:
            self._single_steps -= 1
        events = [
            DisturbanceEvent(at_step=self.world.step, target=target,
                             action="set_pose", pose=pose)
            for target, pose in self._pending_moves
        ]
        self._pending_moves.clear()
        decisions = plan_all(self.world, self.goals, self.cfg)
        self.world = step_world(self.world, decisions, self.goals, self.cfg,
                                events, self.log)
        self.trace.record(self.world, self.goals, self.world.selections)
        self._last_decisions = decisions
        return True

    # -- observation --

    def snapshot(self) -> dict:
        """JSON-ready copy of the current world; never a live reference."""
        status = self.status
        if status == "running" and is_converged(self.world, self.goals):
            status = "converged"
        hands = []
        for i, h in enumerate(self.world.hands):
            selected = energy = None
            if self._last_decisions is not None:
                d = self._last_decisions[i]
                selected = d.selected
                if selected is not None:
                    energy = float(d.report.per_component_energy[selected])
            hands.append({
                "id": i,
                "pose": pose_payload(h),
                "selected_subgoal": selected,
                "attached_component": self.world.attach[i],
                "energy": energy,
            })
        components = []
        for j, c in enumerate(self.world.components):
            loss = goal_loss(embed(c), self.goals.targets[j])
            components.append({
                "id": j,
                "pose": pose_payload(c),
                "goal_pose": {
                    "p": [float(v) for v in self.goals.targets[j].position],
                    "r": [float(v) for v in
                          self.scenario.components[j].goal.angles],
                },
                "goal_loss": float(loss),
                "at_goal": bool(loss <= self.goals.epsilon_g),
            })
        raw_total = float(sum(c["goal_loss"] for c in components))
        initial = self.trace.initial_total
        return {
            "step": self.world.step,
            "sim_status": status,
            "hands": hands,
            "components": components,
            "workspaces": [_workspace_payload(ws)
                           for ws in self.scenario.workspaces],
            "table": {"x": list(self.scenario.table[0]),
                      "y": list(self.scenario.table[1])},
            "loss": {
                "raw_total": raw_total,
                "normalized_total": raw_total / initial if initial > 0 else raw_total,
                "initial_total": initial,
            },
        }


@dataclass
class BridgeServer:
    """Handle onto a running bridge; close() stops serving."""

    session: LiveSession
    port: int
    _server: object
    _ticker: asyncio.Task

    async def close(self):
        self._ticker.cancel()
        try:
            await self._ticker
        except asyncio.CancelledError:
            pass
        self._server.close()
        await self._server.wait_closed()


async def start_bridge(scenario: Scenario, seed: int, port: int,
                       tick_hz: float = DEFAULT_TICK_HZ,
                       cfg=None) -> BridgeServer:
    """Start the WebSocket endpoint plus the authoritative tick loop."""
    from websockets.asyncio.server import serve as ws_serve

    session = LiveSession(scenario, seed, cfg)
    clients: set[asyncio.Queue] = set()
    seq = {"n": 0}

    def next_seq() -> int:
        seq["n"] += 1
        return seq["n"]

    async def handler(ws):
        queue: asyncio.Queue = asyncio.Queue(maxsize=SEND_QUEUE_LIMIT)

        async def sender():
            while True:
                msg = await queue.get()
                if msg is None:
                    await ws.close(code=1013, reason="send queue overflow")
                    return
                await ws.send(msg)

        send_task = asyncio.create_task(sender())
        clients.add(queue)
        try:
            await ws.send(json.dumps(
                envelope("snapshot", session.snapshot(), next_seq())))
            async for raw in ws:
                try:
                    message = json.loads(raw)
                except json.JSONDecodeError as exc:
                    ack = {"status": "rejected", "reason": f"parse: {exc.msg}"}
                    message = {}
                else:
                    ack = session.submit(message)
                ack["for_seq"] = message.get("seq") if isinstance(message, dict) else None
                msg_type = "event_log" if "records" in ack else "ack"
                await ws.send(json.dumps(envelope(msg_type, ack, next_seq())))
        finally:
            clients.discard(queue)
            send_task.cancel()

    async def ticker():
        loop = asyncio.get_running_loop()
        interval = 1.0 / tick_hz if tick_hz > 0 else 0.0
        while True:
            started = loop.time()
            session.tick()
            msg = json.dumps(envelope("snapshot", session.snapshot(),
                                      next_seq()))
            for queue in list(clients):
                try:
                    queue.put_nowait(msg)
                except asyncio.QueueFull:
                    # Slow client: stop broadcasting to it and tell its
                    # sender to close the connection.
                    clients.discard(queue)
                    queue.get_nowait()
                    queue.put_nowait(None)
            await asyncio.sleep(max(0.0, interval - (loop.time() - started)))

    server = await ws_serve(handler, "127.0.0.1", port)
    actual_port = server.sockets[0].getsockname()[1]
    ticker_task = asyncio.create_task(ticker())
    log.info("bridge serving %s on port %d", scenario.name, actual_port)
    return BridgeServer(session=session, port=actual_port,
                        _server=server, _ticker=ticker_task)


def serve(scenario: Scenario, seed: int, port: int,
          tick_hz: float = DEFAULT_TICK_HZ):
    """Blocking entry point used by the CLI; runs until interrupted."""

    async def _main():
        bridge = await start_bridge(scenario, seed, port, tick_hz)
        print(f"serving {scenario.name} on ws://127.0.0.1:{bridge.port} "
              f"(seed {seed}, {tick_hz} steps/s)")
        try:
            await asyncio.Future()
        finally:
            await bridge.close()

    try:
        asyncio.run(_main())
    except KeyboardInterrupt:
        pass
