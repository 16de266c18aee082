"""Northbound HTTP API over the simulated mesh.

All mutation funnels through the controller and the simulation event loop
under a single lock; handlers block while simulated time advances, which is
fast since an hour of mesh traffic replays in seconds. See docs/api.md for
the full endpoint reference and error codes.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import asdict

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from .controller import (
    Controller,
    ControllerError,
    DeviceRecord,
    DuplicateDeviceId,
    GatewayDown,
    InvalidCoordinates,
    NoTargets,
    NotFound,
    ReservedId,
)
from .harness import build_report, build_world
from .node import UnknownAction
from .scenario import Scenario, default_scenario

_STATUS_BY_ERROR = (
    (DuplicateDeviceId, 409),
    (ReservedId, 400),
    (InvalidCoordinates, 400),
    (NotFound, 404),
    (NoTargets, 400),
    (GatewayDown, 503),
    (ControllerError, 400),
)


class DeviceIn(BaseModel):
    name: str
    device_id: int
    sensor_type: str = ""
    latitude: float
    longitude: float
    notes: str = ""
    mesh_role: str = "MP"


class DeviceUpdate(BaseModel):
    name: str | None = None
    sensor_type: str | None = None
    latitude: float | None = None
    longitude: float | None = None
    notes: str | None = None
    mesh_role: str | None = None


class ActionIn(BaseModel):
    targets: list[int] | str
    action: int | str
    timeout_s: float | None = Field(default=None, gt=0)
    retries: int | None = Field(default=None, ge=0)


class LinkUpdate(BaseModel):
    enabled: bool | None = None
    p_err: float | None = Field(default=None, ge=0.0, le=1.0)


def _error_response(exc: Exception) -> JSONResponse:
    for cls, status in _STATUS_BY_ERROR:
        if isinstance(exc, cls):
            return JSONResponse(
                status_code=status,
                content={"error": {"code": getattr(exc, "code", cls.code), "message": str(exc)}},
            )
    if isinstance(exc, UnknownAction):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "unknown_action", "message": str(exc)}},
        )
    raise exc


def create_app(scenario: Scenario | None = None, registry_path=None) -> FastAPI:
    scenario = scenario or default_scenario()
    sim, controller = build_world(scenario, registry_path=registry_path)
    lock = threading.Lock()

    app = FastAPI(title="LoRa mesh SDN controller", version="0.1.0")
    app.state.sim = sim
    app.state.controller = controller
    app.state.scenario = scenario

    handled = tuple(cls for cls, _ in _STATUS_BY_ERROR) + (UnknownAction,)
    for cls in handled:
        app.add_exception_handler(cls, lambda request, exc: _error_response(exc))

    # -- registry ---------------------------------------------------------

    @app.post("/devices", status_code=201)
    def create_device(body: DeviceIn):
        with lock:
            record = controller.register_device(DeviceRecord(**body.model_dump()))
            return asdict(record)

    @app.get("/devices")
    def list_devices():
        with lock:
            return [asdict(d) for d in controller.list_devices()]

    @app.get("/devices/{device_id}")
    def get_device(device_id: int):
        with lock:
            return asdict(controller.get_device(device_id))

    @app.put("/devices/{device_id}")
    def update_device(device_id: int, body: DeviceUpdate):
        fields = {k: v for k, v in body.model_dump().items() if v is not None}
        with lock:
            return asdict(controller.update_device(device_id, **fields))

    @app.delete("/devices/{device_id}", status_code=204)
    def delete_device(device_id: int):
        with lock:
            controller.delete_device(device_id)

    @app.post("/devices/{device_id}/connectivity-check")
    def connectivity_check(device_id: int):
        with lock:
            return controller.connectivity_check(device_id)

    # -- actions ----------------------------------------------------------

    @app.post("/actions")
    def dispatch(body: ActionIn):
        if isinstance(body.targets, str) and body.targets != "all":
            return JSONResponse(
                status_code=400,
                content={
                    "error": {
                        "code": "no_targets",
                        "message": 'targets must be a list of ids or "all"',
                    }
                },
            )
        with lock:
            results = controller.dispatch_action(
                body.targets, body.action, body.timeout_s, body.retries
            )
            return {"results": {str(k): v for k, v in results.items()}}

    # -- observation and steering ----------------------------------------

    @app.get("/metrics")
    def metrics():
        with lock:
            report = build_report(
                sim,
                meta={
                    "scenario": scenario.name,
                    "seed": scenario.seed,
                    "simulated_time_s": sim.now,
                },
            )
            return report.to_dict()

    @app.get("/topology")
    def topology():
        with lock:
            return {
                "nodes": [
                    {
                        "id": n.device_id,
                        "mesh_role": n.mesh_role,
                        "alive": n.is_listening(sim.now),
                        "sensor_active": n.sensor_active,
                        "ap_active": n.ap_active,
                        "ap_clients": n.ap_clients,
                    }
                    for n in (sim.nodes[i] for i in sorted(sim.nodes))
                ],
                "links": [
                    {"a": l.a, "b": l.b, "p_err": l.p_err, "enabled": l.enabled}
                    for l in sim.topology.links()
                ],
            }

    @app.put("/links/{a}/{b}")
    def update_link(a: int, b: int, body: LinkUpdate):
        with lock:
            try:
                link = sim.topology.set_link(a, b, enabled=body.enabled, p_err=body.p_err)
            except KeyError as exc:
                raise NotFound(str(exc)) from exc
            sim.record(
                {"type": "link", "t": sim.now, "a": link.a, "b": link.b,
                 "p_err": link.p_err, "enabled": link.enabled}
            )
            return {"a": link.a, "b": link.b, "p_err": link.p_err,
                    "enabled": link.enabled}

    # -- event stream -----------------------------------------------------

    @app.get("/events")
    def events(request: Request, since: int = 0, follow: bool = False):
        def stream():
            cursor = max(0, since)
            while True:
                with lock:
                    pending = sim.trace[cursor:]
                for rec in pending:
                    cursor += 1
                    payload = json.dumps({"seq": cursor - 1, **rec}, sort_keys=True)
                    yield f"data: {payload}\n\n"
                if not follow:
                    return
                time.sleep(0.2)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app
