"""Evaluation harness: the hour-long request workload, rate math, reports.

The workload mirrors the field test: issue one request, await the response
(or a timeout), pause, repeat, cycling both targets and a configurable action
list round-robin over the non-gateway devices. Simulated time is decoupled
from wall time, so an hour replays in seconds.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import dataclass, field

from .controller import Controller, DeviceRecord
from .node import (
    ACTION_AP_CLIENTS,
    ACTION_AP_STATUS,
    ACTION_PING,
    ACTION_SENSOR_STATUS,
    NodeState,
    ROLE_MPP,
)
from .scenario import Scenario, ScenarioInvalid
from .sim import Simulator
from .radio import Topology

DEFAULT_WORKLOAD_ACTIONS = (
    ACTION_AP_CLIENTS,
    ACTION_PING,
    ACTION_SENSOR_STATUS,
    ACTION_AP_STATUS,
)

REPORT_FORMATS = ("json", "csv")
CSV_COLUMNS = (
    "device",
    "errors",
    "retransmitted",
    "received",
    "sent",
    "ignored",
    "success_rate",
    "error_rate",
)


class EmptyCounters(Exception):
    """Rates are undefined before the first reception."""


class IoFailure(Exception):
    """Report could not be written."""


@dataclass
class MetricsReport:
    devices: dict
    aggregate: dict
    meta: dict

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "devices": self.devices,
            "aggregate": self.aggregate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        totals = {k: 0 for k in ("errors", "retransmitted", "received", "sent", "ignored")}
        for device_id in sorted(self.devices, key=int):
            row = self.devices[device_id]
            for k in totals:
                totals[k] += row[k]
            writer.writerow(
                [
                    device_id,
                    row["errors"],
                    row["retransmitted"],
                    row["received"],
                    row["sent"],
                    row["ignored"],
                    _fmt_rate(row["success_rate"]),
                    _fmt_rate(row["error_rate"]),
                ]
            )
        writer.writerow(
            [
                "aggregate",
                totals["errors"],
                totals["retransmitted"],
                totals["received"],
                totals["sent"],
                totals["ignored"],
                _fmt_rate(self.aggregate["success_rate"]),
                _fmt_rate(self.aggregate["error_rate"]),
            ]
        )
        return buf.getvalue()


def _fmt_rate(rate) -> str:
    return "" if rate is None else f"{rate:.6f}"


def compute_rates(counters) -> dict:
    """Success/error split of one device's receptions."""
    successes = counters.retransmitted + counters.received + counters.ignored
    total = successes + counters.errors
    if total == 0:
        raise EmptyCounters("no receptions recorded")
    error_rate = counters.errors / total
    return {"success_rate": 1.0 - error_rate, "error_rate": error_rate}


def build_world(scenario: Scenario, registry_path=None):
    """Instantiate (Simulator, Controller) for one scenario."""
    scenario.validate()
    topology = Topology()
    sim = Simulator(topology, copy.deepcopy(scenario.radio), seed=scenario.seed)
    for spec in scenario.nodes:
        sim.add_node(
            NodeState(
                spec.id,
                spec.role,
                sensor_active=spec.sensor_active,
                ap_active=spec.ap_active,
                ap_clients=spec.ap_clients,
            )
        )
    for link in scenario.links:
        topology.add_link(link.a, link.b, link.p_err, link.enabled)
    gateway_id = min(n.id for n in scenario.nodes if n.role == ROLE_MPP)
    controller = Controller(sim, gateway_id, registry_path=registry_path)
    known = {d.device_id for d in controller.list_devices()}
    for spec in scenario.nodes:
        if spec.id in known:
            continue  # registry snapshot reloaded from a previous run
        controller.register_device(
            DeviceRecord(
                name=spec.name,
                device_id=spec.id,
                sensor_type=spec.sensor_type,
                latitude=spec.lat,
                longitude=spec.lon,
                notes=spec.notes,
                mesh_role=spec.role,
            )
        )
    return sim, controller


def build_report(sim, meta=None) -> MetricsReport:
    devices = {}
    rates = []
    for device_id in sorted(sim.nodes):
        counters = sim.nodes[device_id].counters
        row = counters.as_dict()
        try:
            row.update(compute_rates(counters))
            rates.append((row["success_rate"], row["error_rate"]))
        except EmptyCounters:
            row.update({"success_rate": None, "error_rate": None})
        devices[str(device_id)] = row
    if rates:
        aggregate = {
            "success_rate": sum(r[0] for r in rates) / len(rates),
            "error_rate": sum(r[1] for r in rates) / len(rates),
        }
    else:
        aggregate = {"success_rate": None, "error_rate": None}
    return MetricsReport(devices=devices, aggregate=aggregate, meta=meta or {})


def run_field_workload(
    scenario: Scenario,
    duration_s: float = 3600.0,
    inter_request_s: float = 1.0,
    actions=DEFAULT_WORKLOAD_ACTIONS,
    registry_path=None,
):
    """Replay the hour-long sequential request workload.

    Returns (MetricsReport, trace). In-flight traffic is drained after the
    cutoff so cumulative counters balance at the end of the run.
    """
    if duration_s <= 0 or inter_request_s < 0:
        raise ScenarioInvalid("duration must be positive, pause non-negative")
    if not actions:
        raise ScenarioInvalid("workload needs at least one action")
    sim, controller = build_world(scenario, registry_path=registry_path)
    targets = [i for i in sorted(sim.nodes) if i != controller.gateway_id]
    if not targets:
        raise ScenarioInvalid("workload needs at least one non-gateway device")
    requests = 0
    while sim.now < duration_s:
        target = targets[requests % len(targets)]
        action = actions[requests % len(actions)]
        controller.dispatch_action([target], action)
        requests += 1
        sim.run_until(sim.now + inter_request_s)
    sim.run_all()
    report = build_report(
        sim,
        meta={
            "scenario": scenario.name,
            "seed": scenario.seed,
            "duration_s": duration_s,
            "inter_request_s": inter_request_s,
            "requests": requests,
            "simulated_end_s": sim.now,
        },
    )
    return report, sim.trace


def export_report(report: MetricsReport, path, fmt: str = "json") -> None:
    """Deterministic serialization; identical reports re-export identically."""
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; use one of {REPORT_FORMATS}")
    text = report.to_json() if fmt == "json" else report.to_csv()
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write report {path}: {exc}") from exc


def run_fingerprint(scenario: Scenario, seed: int, duration_s: float = 60.0) -> str:
    """Canonical (report, trace) serialization of one seeded run."""
    run_scenario = copy.deepcopy(scenario)
    run_scenario.seed = seed
    report, trace = run_field_workload(run_scenario, duration_s=duration_s)
    return report.to_json() + json.dumps(trace, sort_keys=True)


def verify_determinism(
    scenario: Scenario, seed: int, repetitions: int = 3, duration_s: float = 60.0
) -> bool:
    """True iff repeated runs of (scenario, seed) replay identically."""
    if repetitions < 2:
        raise ValueError("repetitions must be >= 2")
    first = run_fingerprint(scenario, seed, duration_s)
    return all(
        run_fingerprint(scenario, seed, duration_s) == first
        for _ in range(repetitions - 1)
    )
