"""Scenario files: node roster, link graph, radio parameters, seed.

The bundled default reproduces the four-device campus deployment (LoRa
gateway hub plus HaLow gateway, temperature/humidity sensor, and traffic
light). The devices were mutually in radio range, so the default graph links
every pair even though traffic radiates star-like from the gateway.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .node import MESH_ROLES, ROLE_MP, ROLE_MPP
from .radio import Link, RadioConfig


class ScenarioInvalid(Exception):
    """Scenario file or structure failed validation."""


@dataclass
class NodeSpec:
    id: int
    name: str
    role: str = ROLE_MP
    sensor_type: str = ""
    lat: float = 0.0
    lon: float = 0.0
    ap_clients: int = 0
    notes: str = ""
    sensor_active: bool = True
    ap_active: bool = False


@dataclass
class Scenario:
    name: str
    nodes: list
    links: list
    radio: RadioConfig = field(default_factory=RadioConfig)
    seed: int = 1

    def validate(self) -> None:
        if not self.nodes:
            raise ScenarioInvalid("scenario has no nodes")
        ids = [n.id for n in self.nodes]
        if len(ids) != len(set(ids)):
            raise ScenarioInvalid("duplicate node ids")
        if any(i == 0 for i in ids):
            raise ScenarioInvalid("node id 0 is reserved for broadcast")
        for n in self.nodes:
            if n.role not in MESH_ROLES:
                raise ScenarioInvalid(f"node {n.id}: bad role {n.role!r}")
            if not -90.0 <= n.lat <= 90.0 or not -180.0 <= n.lon <= 180.0:
                raise ScenarioInvalid(f"node {n.id}: coordinates out of bounds")
        known = set(ids)
        seen = set()
        for link in self.links:
            if link.a not in known or link.b not in known:
                raise ScenarioInvalid(f"link ({link.a}, {link.b}): unknown node")
            if link.key in seen:
                raise ScenarioInvalid(f"duplicate link ({link.a}, {link.b})")
            seen.add(link.key)
        if not any(n.role == ROLE_MPP for n in self.nodes):
            raise ScenarioInvalid("scenario needs at least one MPP gateway")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "nodes": [dataclasses.asdict(n) for n in self.nodes],
            "links": [
                {"a": l.a, "b": l.b, "p_err": l.p_err, "enabled": l.enabled}
                for l in self.links
            ],
            "radio": {
                "air_rate_bps": self.radio.air_rate_bps,
                "preamble_bytes": self.radio.preamble_bytes,
                "channels_mhz": list(self.radio.channels_mhz),
                "slot_ms": self.radio.slot_ms,
                "hop_mode": self.radio.hop_mode,
                "duty_limit": self.radio.duty_limit,
                "duty_window_s": self.radio.duty_window_s,
                "jitter_ms": self.radio.jitter_ms,
            },
        }


def scenario_from_dict(data: dict) -> Scenario:
    try:
        nodes = [NodeSpec(**n) for n in data.get("nodes", [])]
        links = [Link(**l) for l in data.get("links", [])]
        radio = RadioConfig(**data.get("radio", {}))
        scenario = Scenario(
            name=data.get("name", "unnamed"),
            nodes=nodes,
            links=links,
            radio=radio,
            seed=int(data.get("seed", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioInvalid(str(exc)) from exc
    scenario.validate()
    return scenario


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioInvalid(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(data)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def default_scenario(p_err: float = 0.0, seed: int = 1) -> Scenario:
    """Four-device campus deployment with a homogeneous link loss rate."""
    nodes = [
        NodeSpec(
            id=1,
            name="LoRa gateway",
            role=ROLE_MPP,
            sensor_type="gateway",
            lat=51.4545,
            lon=-2.6026,
            notes="controller-attached hub",
            sensor_active=False,
        ),
        NodeSpec(
            id=2,
            name="HaLow gateway",
            role=ROLE_MP,
            sensor_type="gateway",
            lat=51.4553,
            lon=-2.6041,
            ap_clients=3,
            ap_active=True,
            sensor_active=False,
        ),
        NodeSpec(
            id=3,
            name="Smart temperature/humidity sensor",
            role=ROLE_MP,
            sensor_type="temperature-humidity",
            lat=51.4561,
            lon=-2.6018,
        ),
        NodeSpec(
            id=4,
            name="Smart traffic light",
            role=ROLE_MP,
            sensor_type="traffic-light",
            lat=51.4537,
            lon=-2.6002,
        ),
    ]
    links = [
        Link(a, b, p_err=p_err)
        for a in (1, 2, 3, 4)
        for b in (1, 2, 3, 4)
        if a < b
    ]
    scenario = Scenario(
        name="campus-4-device",
        nodes=nodes,
        links=links,
        radio=RadioConfig(),
        seed=seed,
    )
    scenario.validate()
    return scenario
