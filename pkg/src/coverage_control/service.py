"""Live bridge between a running simulation and operator consoles.

One asyncio loop owns the simulation; browser clients connect over a single
websocket endpoint, receive stateless JSON frames at a fixed rate, and send
JSON commands (density edits, controller switches, pause/resume/reset) that
are applied atomically at step boundaries.

Message catalog (schema_version 1):
  server -> client: {"type": "hello", "schema_version": 1}
                    {"type": "frame", ...}          full render state
                    {"type": "error", "message": str}
  client -> server: {"type": "command", "action": <str>, ...}
Actions: move_component, add_component, remove_component, set_controller,
set_gain, pause, resume, reset. See docs/protocol.md for field details.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass, replace

import numpy as np
import websockets

from .density import (
    DensityField,
    FixedPath,
    GaussianComponent,
    retarget_component,
)
from .errors import CoverageControlError, ScenarioError
from .jacobian import spectral_radius
from .sim import Scenario, SimContext, init_cvt, sample_positions, unicycle_map

SCHEMA_VERSION = 1
DEFAULT_TRAVEL_TIME = 0.5  # seconds a moved component takes to glide to its target


class SimulationService:
    """Owns simulation state; not thread-safe by design (single loop owner)."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.ctx = SimContext(scenario)
        if scenario.initial_positions is not None:
            p = np.asarray(scenario.initial_positions, dtype=float).copy()
        else:
            p = sample_positions(self.ctx.domain, scenario.n, scenario.seed)
        if scenario.init_cvt:
            p = init_cvt(p, self.ctx.field, 0.0, self.ctx.domain, self.ctx.cfg,
                         tol=scenario.init_cvt_tol,
                         budget=scenario.init_cvt_budget).positions
        self.positions = p
        self.headings = np.zeros(scenario.n)
        self.t = 0.0
        self.paused = False
        self.error: str | None = None
        self._pending: list[dict] = []
        self._latest: dict | None = None
        self._refresh_snapshot()

    # -- simulation stepping ------------------------------------------------

    def _refresh_snapshot(self):
        res = self.ctx.evaluate(self.positions, self.t)
        lam = spectral_radius(res.jacobian) if res.jacobian is not None else None
        self._latest = {
            "cells": [c.tolist() for c in res.tessellation.cells],
            "centroids": res.moments.centroids.tolist(),
            "H": res.cost,
            "lambda_max": lam,
            "condition_flag": bool(res.command.condition_flag),
            "tracking_error": res.command.tracking_error,
        }
        return res

    def step_once(self):
        """Advance one dt: apply queued commands, integrate, update headings."""
        self.apply_pending()
        if self.paused or self.error is not None:
            return
        try:
            dt = self.scenario.dt
            res = self._refresh_snapshot()
            k1 = res.command.velocities
            k2 = self.ctx.velocity(self.t + dt / 2, self.positions + (dt / 2) * k1)
            k3 = self.ctx.velocity(self.t + dt / 2, self.positions + (dt / 2) * k2)
            k4 = self.ctx.velocity(self.t + dt, self.positions + dt * k3)
            nxt = self.positions + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            self.positions, _ = self.ctx.clamp(nxt)
            for i in range(len(self.headings)):
                _, omega = unicycle_map(k1[i], self.headings[i])
                self.headings[i] += omega * dt
            self.t += dt
        except CoverageControlError as exc:
            self.error = str(exc)
            self.paused = True

    # -- commands -----------------------------------------------------------

    def validate_command(self, msg: dict):
        if not isinstance(msg, dict) or msg.get("type") != "command":
            raise ScenarioError("expected {'type': 'command', 'action': ...}", key="type")
        action = msg.get("action")
        n_comp = len(self.ctx.field.components)
        if action in ("move_component", "remove_component"):
            idx = msg.get("index")
            if not isinstance(idx, int) or not (0 <= idx < n_comp):
                raise ScenarioError(f"component index {idx!r} out of range", key="index")
        if action == "move_component" and "center" not in msg:
            raise ScenarioError("move_component needs 'center'", key="center")
        if action == "add_component":
            if "center" not in msg:
                raise ScenarioError("add_component needs 'center'", key="center")
            if float(msg.get("weight", 1.0)) <= 0:
                raise ScenarioError("weight must be positive", key="weight")
        if action == "set_controller":
            name = msg.get("name")
            if name not in ("lloyd", "cortes", "tvd_c", "tvd_dk"):
                raise ScenarioError(f"unknown controller {name!r}", key="name")
            if name == "tvd_dk" and int(msg.get("hops", 1)) < 0:
                raise ScenarioError("hops must be >= 0", key="hops")
        if action == "set_gain" and float(msg.get("kappa", 0.0)) <= 0:
            raise ScenarioError("kappa must be positive", key="kappa")
        if action not in ("move_component", "add_component", "remove_component",
                          "set_controller", "set_gain", "pause", "resume", "reset"):
            raise ScenarioError(f"unknown action {action!r}", key="action")

    def queue_command(self, msg: dict):
        self.validate_command(msg)
        self._pending.append(msg)

    def apply_pending(self):
        pending, self._pending = self._pending, []
        for msg in pending:
            try:
                self._apply(msg)
            except (ScenarioError, IndexError, ValueError):
                continue  # stale command (e.g. component removed meanwhile)

    def _swap_field(self, new_field: DensityField):
        self.scenario = replace(self.scenario, density=new_field)
        self.ctx = SimContext(self.scenario)

    def _apply(self, msg: dict):
        action = msg["action"]
        fld = self.ctx.field
        if action == "move_component":
            comps = list(fld.components)
            comps[msg["index"]] = retarget_component(
                comps[msg["index"]], self.t, msg["center"],
                travel_time=float(msg.get("travel_time", DEFAULT_TRAVEL_TIME)))
            self._swap_field(DensityField(components=tuple(comps), floor=fld.floor))
        elif action == "add_component":
            comp = GaussianComponent(
                weight=float(msg.get("weight", 1.0)),
                path=FixedPath(point=tuple(map(float, msg["center"]))),
                inverse_scales=tuple(msg.get("scales", (1.0, 1.0))))
            self._swap_field(DensityField(components=fld.components + (comp,),
                                          floor=fld.floor))
        elif action == "remove_component":
            comps = list(fld.components)
            del comps[msg["index"]]
            self._swap_field(DensityField(components=tuple(comps), floor=fld.floor))
        elif action == "set_controller":
            self.scenario = replace(self.scenario, controller=msg["name"],
                                    hops=int(msg.get("hops", self.scenario.hops)))
            self.ctx = SimContext(self.scenario)
        elif action == "set_gain":
            self.scenario = replace(self.scenario, kappa=float(msg["kappa"]))
            self.ctx = SimContext(self.scenario)
        elif action == "pause":
            self.paused = True
        elif action == "resume":
            self.paused = False
            self.error = None
        elif action == "reset":
            result = init_cvt(self.positions, self.ctx.field, self.t, self.ctx.domain,
                              self.ctx.cfg, tol=self.scenario.init_cvt_tol,
                              budget=self.scenario.init_cvt_budget)
            self.positions = result.positions
        self._refresh_snapshot()

    # -- frames ---------------------------------------------------------------

    def build_frame(self) -> dict:
        snap = self._latest or {}
        return {
            "type": "frame",
            "schema_version": SCHEMA_VERSION,
            "t": self.t,
            "paused": self.paused,
            "error": self.error,
            "controller": self.scenario.controller_label(),
            "kappa": self.scenario.kappa,
            "domain": self.ctx.domain.vertices.tolist(),
            "positions": self.positions.tolist(),
            "headings": self.headings.tolist(),
            "density": self.ctx.field.descriptor(self.t),
            **snap,
        }


@dataclass
class RunningService:
    """Handle for a started service; close() tears everything down."""

    service: SimulationService
    server: object
    host: str
    port: int
    tasks: list

    async def close(self):
        for task in self.tasks:
            task.cancel()
        for task in self.tasks:
            try:
                await task
            except asyncio.CancelledError:
                pass
            except Exception:
                pass
        self.server.close()
        await self.server.wait_closed()


async def start_service(scenario: Scenario, host: str = "127.0.0.1", port: int = 0,
                        time_scale: float = 1.0, frame_hz: float = 30.0) -> RunningService:
    """Start the simulation loop, frame broadcaster, and websocket endpoint.

    port=0 binds an ephemeral port (reported on the returned handle).
    """
    service = SimulationService(scenario)
    clients: set = set()

    async def handler(ws):
        clients.add(ws)
        try:
            await ws.send(json.dumps({"type": "hello", "schema_version": SCHEMA_VERSION}))
            await ws.send(json.dumps(service.build_frame()))
            async for raw in ws:
                try:
                    msg = json.loads(raw)
                    service.queue_command(msg)
                except (json.JSONDecodeError, ScenarioError, ValueError, TypeError) as exc:
                    try:
                        await ws.send(json.dumps({"type": "error", "message": str(exc)}))
                    except websockets.ConnectionClosed:
                        break
        except websockets.ConnectionClosed:
            pass
        finally:
            clients.discard(ws)

    async def sim_loop():
        loop = asyncio.get_running_loop()
        period = scenario.dt / time_scale
        next_wall = loop.time()
        while True:
            service.step_once()
            next_wall += period
            now = loop.time()
            if next_wall < now - 0.25:
                next_wall = now  # fell behind wall clock; resync rather than spiral
            await asyncio.sleep(max(0.0, next_wall - now))

    async def broadcast_loop():
        last_error = None
        while True:
            await asyncio.sleep(1.0 / frame_hz)
            if not clients:
                continue
            payloads = [json.dumps(service.build_frame())]
            if service.error is not None and service.error != last_error:
                payloads.append(json.dumps({"type": "error", "message": service.error}))
                last_error = service.error
            for ws in list(clients):
                for payload in payloads:
                    try:
                        await ws.send(payload)
                    except websockets.ConnectionClosed:
                        clients.discard(ws)
                        break

    server = await websockets.serve(handler, host, port)
    actual_port = server.sockets[0].getsockname()[1]
    tasks = [asyncio.create_task(sim_loop()), asyncio.create_task(broadcast_loop())]
    return RunningService(service=service, server=server, host=host,
                          port=actual_port, tasks=tasks)


async def serve_forever(scenario: Scenario, host: str = "127.0.0.1", port: int = 8765,
                        time_scale: float = 1.0, frame_hz: float = 30.0):
    handle = await start_service(scenario, host=host, port=port,
                                 time_scale=time_scale, frame_hz=frame_hz)
    print(f"serving on ws://{handle.host}:{handle.port} "
          f"(controller {scenario.controller_label()}, dt={scenario.dt})")
    try:
        await asyncio.Future()
    finally:
        await handle.close()
