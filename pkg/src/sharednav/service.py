"""Live teleoperation server.

One websocket connection = one session.  The client sends `create` with
the input condition, then `input` messages; the server applies the rate
limit, quantization, and (undisclosed until trial end) corruption, runs
the shared-control simulation in real time, and streams `frame`
messages with robot state, confidence, and a downsampled goal-posterior
heatmap.  All messages are JSON texts; the websocket framing delimits
them.

Message types:

    -> {"type": "create", "condition": {"directions": "four", "accuracy": 0.8,
        "period": 1.0, "mode": "shared"}, "seed": 7}
    <- {"type": "created", "session": id, "map": {...}, "frame": {...}}
    -> {"type": "input", "direction": 1}          # index into the session set
    -> {"type": "input", "vector": [0.26, 0.15]}  # all-directions sessions
    <- {"type": "input_ack", "status": "accepted" | "limited",
        "sent": [vx, vy]}
    <- {"type": "frame", ...}                     # >= 10 per second
    <- {"type": "terminal", "result": {...}, "command_log": [...]}
    <- {"type": "error", "message": ...}
"""

from __future__ import annotations

import asyncio
import json
import math
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .goal_estimator import CommandRecord, GoalEstimator, NoFeasibleGoalError
from .gridmap import OccupancyGrid, WorldPoint
from .potential_field import FieldCache
from .pseudo_user import Directions, InputCondition, corrupt, direction_set, quantize
from .shared_controller import ControlMode, HeldCommand, control_tick
from .simulator import SimParams, SimState, step

HEATMAP_MAX_DIM = 64
DISCONNECT_GRACE = 30.0  # seconds a session survives without a client


def downsample_heatmap(probs: np.ndarray, max_dim: int = HEATMAP_MAX_DIM) -> tuple[np.ndarray, int, int]:
    """Block-sum the posterior down to at most max_dim per side, then
    renormalize so the payload still sums to 1."""
    h, w = probs.shape
    by = max(1, math.ceil(h / max_dim))
    bx = max(1, math.ceil(w / max_dim))
    ph = math.ceil(h / by) * by
    pw = math.ceil(w / bx) * bx
    padded = np.zeros((ph, pw))
    padded[:h, :w] = probs
    blocks = padded.reshape(ph // by, by, pw // bx, bx).sum(axis=(1, 3))
    total = blocks.sum()
    if total > 0:
        blocks = blocks / total
    return blocks, blocks.shape[1], blocks.shape[0]


@dataclass
class Session:
    id: str
    grid: OccupancyGrid
    condition: InputCondition
    params: SimParams
    true_goal: tuple[int, int]
    rng: np.random.Generator
    cache: FieldCache
    state: SimState
    estimator: GoalEstimator
    held: HeldCommand = field(default_factory=lambda: HeldCommand((0.0, 0.0), 0.0))
    estimate: object = None
    status: str = "running"
    last_accepted: float = -math.inf
    command_log: list = field(default_factory=list)

    def apply_input(self, vector: tuple[float, float]) -> dict:
        """Rate-limit, quantize, corrupt, record, re-estimate."""
        now = self.state.clock
        if self.status != "running":
            return {"type": "input_ack", "status": "rejected", "sent": list(vector)}
        if now - self.last_accepted < self.condition.period - 1e-9:
            return {"type": "input_ack", "status": "limited", "sent": list(vector)}
        self.last_accepted = now
        s = self.params.s
        norm = math.hypot(*vector)
        if norm > 0:
            vector = (vector[0] / norm * s, vector[1] / norm * s)
        sent = quantize(vector, self.condition.directions, s)
        applied = sent
        if self.condition.directions is not Directions.ALL and norm > 0:
            applied = corrupt(sent, self.condition, self.rng, s)
        record = CommandRecord(time=now, position=self.state.position, velocity=applied)
        self.held = HeldCommand(value=applied, issued_at=now)
        try:
            self.estimate = self.estimator.push(record)
        except (NoFeasibleGoalError, ValueError):
            self.estimate = None
        self.command_log.append({"t": now, "sent": list(sent), "applied": list(applied)})
        return {"type": "input_ack", "status": "accepted", "sent": list(sent)}

    def tick(self, dt: float) -> None:
        if self.status != "running":
            return
        v = control_tick(
            self.grid, self.state.position, self.held, self.estimate,
            self.condition.mode, self.params.s, self.cache,
        )
        step(self.state, v, dt, self.grid)
        goal_center = self.grid.cell_to_world(self.true_goal)
        d = math.hypot(self.state.position.x - goal_center.x, self.state.position.y - goal_center.y)
        if d <= self.params.goal_radius:
            self.status = "succeeded" if self.state.collisions == 0 else "failed"
        elif self.state.clock >= self.params.timeout:
            self.status = "failed"

    def frame(self) -> dict:
        if self.estimator.posterior is not None:
            probs = self.estimator.posterior.probabilities
        else:
            sup = ~self.grid.occupied
            probs = sup / sup.sum()
        heat, hw, hh = downsample_heatmap(probs)
        est = self.estimate
        return {
            "type": "frame",
            "session": self.id,
            "t": round(self.state.clock, 6),
            "x": self.state.position.x,
            "y": self.state.position.y,
            "collisions": self.state.collisions,
            "path_length": self.state.path_length,
            "confidence": (est.confidence or 0.0) if est is not None else 0.0,
            "goal_cell": list(est.goal) if est is not None else None,
            "status": self.status,
            "heatmap": {
                "width": hw,
                "height": hh,
                "values": [round(v, 9) for v in heat.ravel().tolist()],
            },
        }

    def terminal_message(self) -> dict:
        return {
            "type": "terminal",
            "session": self.id,
            "result": {
                "success": self.status == "succeeded",
                "collisions": self.state.collisions,
                "elapsed_s": self.state.clock,
                "path_length_m": self.state.path_length,
            },
            "command_log": self.command_log,
        }


def _parse_condition(raw: dict) -> InputCondition:
    try:
        return InputCondition(
            directions=Directions(raw.get("directions", "all")),
            accuracy=float(raw.get("accuracy", 1.0)),
            period=float(raw.get("period", 1.0)),
            mode=ControlMode(raw.get("mode", "shared")),
        )
    except ValueError as e:
        raise ValueError(f"condition: {e}") from None


def create_app(
    grid: OccupancyGrid,
    start: WorldPoint,
    true_goal: tuple[int, int],
    params: SimParams | None = None,
    tick_hz: float = 20.0,
    static_dir: str | None = None,
    time_scale: float = 1.0,
) -> FastAPI:
    """Build the service app. `time_scale` > 1 speeds the sim clock up
    relative to wall time (used by tests)."""
    if params is None:
        params = SimParams()
    if not grid.is_free_point(start):
        raise ValueError("configured start is not on a free cell")
    if not grid.is_free_cell(true_goal):
        raise ValueError("configured goal cell is occupied")
    app = FastAPI()
    shared_cache = FieldCache(grid)
    dt = 1.0 / tick_hz

    map_info = {
        "width": grid.width,
        "height": grid.height,
        "resolution": grid.resolution,
        "origin": [grid.origin_x, grid.origin_y],
        "occupied": ["".join("#" if c else "." for c in row) for row in grid.occupied],
        "goal_cell": list(true_goal),
        "period": None,  # filled per session
    }

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        session: Session | None = None
        ticker: asyncio.Task | None = None
        outbox: asyncio.Queue = asyncio.Queue()

        async def run_loop(sess: Session):
            loop = asyncio.get_running_loop()
            next_tick = loop.time()
            while sess.status == "running":
                next_tick += dt / time_scale
                delay = next_tick - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                sess.tick(dt)
                await outbox.put(sess.frame())
            await outbox.put(sess.terminal_message())

        async def sender():
            while True:
                msg = await outbox.get()
                await ws.send_text(json.dumps(msg))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await outbox.put({"type": "error", "message": "not valid JSON"})
                    continue
                mtype = msg.get("type")
                if mtype == "create":
                    if session is not None:
                        await outbox.put({"type": "error", "message": "session already created"})
                        continue
                    try:
                        condition = _parse_condition(msg.get("condition", {}))
                    except ValueError as e:
                        await outbox.put({"type": "error", "message": str(e)})
                        continue
                    seed = int(msg.get("seed", 0))
                    sess_start = start
                    if "start" in msg:
                        sess_start = WorldPoint(*msg["start"])
                        if not grid.is_free_point(sess_start):
                            await outbox.put({"type": "error", "message": "start not on a free cell"})
                            continue
                    session = Session(
                        id=uuid.uuid4().hex,
                        grid=grid,
                        condition=condition,
                        params=params,
                        true_goal=true_goal,
                        rng=np.random.Generator(np.random.PCG64(seed)),
                        cache=shared_cache,
                        state=SimState(position=sess_start),
                        estimator=GoalEstimator(
                            grid, params.s, params.n_window, params.threshold,
                            params.beta, shared_cache,
                        ),
                    )
                    info = dict(map_info, period=condition.period)
                    await outbox.put(
                        {"type": "created", "session": session.id, "map": info,
                         "frame": session.frame()}
                    )
                    ticker = asyncio.create_task(run_loop(session))
                elif mtype == "input":
                    if session is None:
                        await outbox.put({"type": "error", "message": "no session; send create first"})
                        continue
                    if "vector" in msg:
                        vec = (float(msg["vector"][0]), float(msg["vector"][1]))
                    elif "direction" in msg:
                        dirs = direction_set(
                            session.condition.directions
                            if session.condition.directions is not Directions.ALL
                            else Directions.EIGHT
                        )
                        idx = int(msg["direction"])
                        if not (0 <= idx < len(dirs)):
                            await outbox.put({"type": "error", "message": f"direction index {idx} out of range"})
                            continue
                        vec = dirs[idx]
                    else:
                        await outbox.put({"type": "error", "message": "input needs 'direction' or 'vector'"})
                        continue
                    await outbox.put(session.apply_input(vec))
                else:
                    await outbox.put({"type": "error", "message": f"unknown message type {mtype!r}"})
        except WebSocketDisconnect:
            pass
        finally:
            if ticker is not None and session is not None and session.status == "running":
                # grace period: keep simulating, then fail the trial
                await asyncio.sleep(min(DISCONNECT_GRACE / time_scale, DISCONNECT_GRACE))
                session.status = "failed"
            if ticker is not None:
                ticker.cancel()
            send_task.cancel()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
