"""SDN control service: device registry, action dispatch, response correlation.

The controller sits behind the gateway node (the MPP). Northbound requests
turn into frames originated by the gateway; responses flooding back to the
gateway are handed up and matched against pending correlation entries by
(source device, action prefix of the packed code). Group actions fan out as
unicasts since the wire format carries a single destination; only dst=0
expresses a network-wide broadcast.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass

from .node import ACTION_IDS, ACTION_PING, ACTIONS, MESH_ROLES, ROLE_MPP, UnknownAction
from .wire import BROADCAST_ID, RESPONSE_RADIX, U32_MAX, ControlFrame

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 10.0
DEFAULT_RETRIES = 2

PENDING = "pending"
ANSWERED = "answered"
TIMED_OUT = "timed-out"


class ControllerError(Exception):
    code = "controller_error"


class DuplicateDeviceId(ControllerError):
    code = "duplicate_device_id"


class ReservedId(ControllerError):
    code = "reserved_device_id"


class InvalidCoordinates(ControllerError):
    code = "invalid_coordinates"


class NotFound(ControllerError):
    code = "not_found"


class NoTargets(ControllerError):
    code = "no_targets"


class GatewayDown(ControllerError):
    code = "gateway_down"


@dataclass
class DeviceRecord:
    name: str
    device_id: int
    sensor_type: str
    latitude: float
    longitude: float
    notes: str = ""
    mesh_role: str = "MP"

    def validate(self) -> None:
        if self.device_id == 0:
            raise ReservedId("device_id 0 is reserved for broadcast")
        if not 0 < self.device_id <= U32_MAX:
            raise ControllerError(f"device_id {self.device_id} out of range")
        if not -90.0 <= self.latitude <= 90.0 or not -180.0 <= self.longitude <= 180.0:
            raise InvalidCoordinates(
                f"({self.latitude}, {self.longitude}) outside lat/lon bounds"
            )
        if self.mesh_role not in MESH_ROLES:
            raise ControllerError(f"mesh_role must be one of {MESH_ROLES}")
        if not self.name:
            raise ControllerError("name must not be empty")


@dataclass
class CorrelationEntry:
    target: int
    msg_id: int
    action_id: int
    issued_at: float
    deadline: float
    retries_left: int
    state: str = PENDING
    value: int | None = None
    answered_at: float | None = None


def resolve_action(action) -> int:
    """Accept a catalog id or name; raise UnknownAction otherwise."""
    if isinstance(action, str):
        if action not in ACTION_IDS:
            raise UnknownAction(action)
        return ACTION_IDS[action]
    if action not in ACTIONS:
        raise UnknownAction(action)
    return action


class Controller:
    def __init__(
        self,
        sim,
        gateway_id: int,
        *,
        registry_path=None,
        default_timeout_s: float = DEFAULT_TIMEOUT_S,
        default_retries: int = DEFAULT_RETRIES,
    ):
        self.sim = sim
        self.gateway_id = gateway_id
        self.default_timeout_s = default_timeout_s
        self.default_retries = default_retries
        self.registry_path = registry_path
        self._registry: dict = {}
        self._pending: list = []
        if gateway_id not in sim.nodes:
            raise ControllerError(f"gateway node {gateway_id} not in simulation")
        sim.nodes[gateway_id].uplink = self.correlate_response
        if registry_path and os.path.exists(registry_path):
            self._load_registry()

    # -- registry ---------------------------------------------------------

    def register_device(self, record: DeviceRecord) -> DeviceRecord:
        record.validate()
        if record.device_id in self._registry:
            raise DuplicateDeviceId(f"device {record.device_id} already registered")
        self._registry[record.device_id] = record
        self._persist()
        self.sim.record(
            {"type": "device", "t": self.sim.now, "op": "registered",
             "device": asdict(record)}
        )
        return record

    def update_device(self, device_id: int, **fields) -> DeviceRecord:
        record = self.get_device(device_id)
        updated = DeviceRecord(**{**asdict(record), **fields, "device_id": device_id})
        updated.validate()
        self._registry[device_id] = updated
        self._persist()
        self.sim.record(
            {"type": "device", "t": self.sim.now, "op": "updated",
             "device": asdict(updated)}
        )
        return updated

    def delete_device(self, device_id: int) -> None:
        if device_id not in self._registry:
            raise NotFound(f"device {device_id} not registered")
        del self._registry[device_id]
        for entry in list(self._pending):
            if entry.target == device_id:
                entry.state = TIMED_OUT
                self._pending.remove(entry)
                self._record_correlation(entry)
        self._persist()
        self.sim.record(
            {"type": "device", "t": self.sim.now, "op": "deleted",
             "device": {"device_id": device_id}}
        )

    def get_device(self, device_id: int) -> DeviceRecord:
        try:
            return self._registry[device_id]
        except KeyError:
            raise NotFound(f"device {device_id} not registered") from None

    def list_devices(self) -> list:
        return [self._registry[i] for i in sorted(self._registry)]

    def _persist(self) -> None:
        if not self.registry_path:
            return
        payload = [asdict(self._registry[i]) for i in sorted(self._registry)]
        with open(self.registry_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def _load_registry(self) -> None:
        with open(self.registry_path, "r", encoding="utf-8") as fh:
            for item in json.load(fh):
                record = DeviceRecord(**item)
                record.validate()
                self._registry[record.device_id] = record

    # -- dispatch ---------------------------------------------------------

    def dispatch_action(self, targets, action, timeout_s=None, retries=None) -> dict:
        """Send one action to targets ("all" or a list of device ids).

        Returns {device_id: {"status": "answered", "action_id": a, "value": n}
        or {"status": "timed-out"}} once every target resolved.
        """
        action_id = resolve_action(action)
        timeout_s = self.default_timeout_s if timeout_s is None else float(timeout_s)
        retries = self.default_retries if retries is None else int(retries)
        gateway = self.sim.nodes.get(self.gateway_id)
        if gateway is None or not gateway.is_listening(self.sim.now):
            raise GatewayDown(f"gateway {self.gateway_id} is not on the air")

        if targets == "all":
            entries = self._dispatch_broadcast(action_id, timeout_s)
        else:
            ids = sorted(set(targets))
            if not ids:
                raise NoTargets("empty target list")
            for t in ids:
                if t not in self._registry:
                    raise NotFound(f"target {t} not registered")
            entries = {
                t: self._issue(t, action_id, timeout_s, retries) for t in ids
            }
        self.sim.run_until(
            stop=lambda: all(e.state != PENDING for e in entries.values())
        )
        results = {}
        for t, entry in entries.items():
            if entry.state == ANSWERED:
                results[t] = {
                    "status": ANSWERED,
                    "action_id": entry.action_id,
                    "value": entry.value,
                }
            else:
                results[t] = {"status": TIMED_OUT}
        return results

    def _dispatch_broadcast(self, action_id, timeout_s) -> dict:
        gateway = self.sim.nodes[self.gateway_id]
        frame = gateway.originate(BROADCAST_ID, action_id)
        responders = [i for i in sorted(self._registry) if i != self.gateway_id]
        if not responders:
            raise NoTargets("no registered devices besides the gateway")
        now = self.sim.now
        entries = {}
        for t in responders:
            entry = CorrelationEntry(
                target=t,
                msg_id=frame.msg_id,
                action_id=action_id,
                issued_at=now,
                deadline=now + timeout_s,
                retries_left=0,
            )
            self._pending.append(entry)
            entries[t] = entry
        self.sim.send(self.gateway_id, frame, origin=True, jitter=False)
        deadline = now + timeout_s
        self.sim.schedule(
            deadline, 0, lambda: self._expire(list(entries.values()), deadline)
        )
        return entries

    def _issue(self, target, action_id, timeout_s, retries_left) -> CorrelationEntry:
        gateway = self.sim.nodes[self.gateway_id]
        frame = gateway.originate(target, action_id)
        entry = CorrelationEntry(
            target=target,
            msg_id=frame.msg_id,
            action_id=action_id,
            issued_at=self.sim.now,
            deadline=self.sim.now + timeout_s,
            retries_left=retries_left,
        )
        self._pending.append(entry)
        self.sim.send(self.gateway_id, frame, origin=True, jitter=False)
        self.sim.schedule(
            entry.deadline,
            0,
            lambda: self._check_timeout(entry, timeout_s),
        )
        return entry

    def _check_timeout(self, entry, timeout_s) -> None:
        if entry.state != PENDING or self.sim.now < entry.deadline:
            return  # answered, or superseded by a retry with a later deadline
        if entry.retries_left > 0:
            entry.retries_left -= 1
            gateway = self.sim.nodes[self.gateway_id]
            frame = gateway.originate(entry.target, entry.action_id)
            entry.msg_id = frame.msg_id  # fresh sequence number per retry
            entry.deadline = self.sim.now + timeout_s
            self.sim.send(self.gateway_id, frame, origin=True, jitter=False)
            self.sim.schedule(
                entry.deadline, 0, lambda: self._check_timeout(entry, timeout_s)
            )
            return
        entry.state = TIMED_OUT
        if entry in self._pending:
            self._pending.remove(entry)
        self._record_correlation(entry)

    def _expire(self, entries, deadline) -> None:
        for entry in entries:
            if entry.state == PENDING and self.sim.now >= deadline:
                entry.state = TIMED_OUT
                if entry in self._pending:
                    self._pending.remove(entry)
                self._record_correlation(entry)

    # -- southbound uplink ------------------------------------------------

    def correlate_response(self, frame: ControlFrame) -> None:
        """Match a frame that reached the gateway against pending entries."""
        if frame.src_id not in self._registry:
            logger.info("dropping response from unregistered device %d", frame.src_id)
            self.sim.record(
                {"type": "correlation", "t": self.sim.now, "state": "dropped",
                 "reason": "unregistered-source", "src": frame.src_id}
            )
            return
        action_id, value = divmod(frame.action_id, RESPONSE_RADIX)
        for entry in self._pending:
            if entry.target == frame.src_id and entry.action_id == action_id:
                entry.state = ANSWERED
                entry.value = value
                entry.answered_at = self.sim.now
                self._pending.remove(entry)
                self._record_correlation(entry)
                return
        logger.info(
            "dropping unmatched response from %d (code %d)",
            frame.src_id, frame.action_id,
        )
        self.sim.record(
            {"type": "correlation", "t": self.sim.now, "state": "dropped",
             "reason": "unmatched", "src": frame.src_id, "code": frame.action_id}
        )

    def _record_correlation(self, entry) -> None:
        self.sim.record(
            {
                "type": "correlation",
                "t": self.sim.now,
                "target": entry.target,
                "action": entry.action_id,
                "state": entry.state,
                "value": entry.value,
            }
        )

    # -- convenience ------------------------------------------------------

    def connectivity_check(self, device_id: int) -> dict:
        """Probe one device; reports reachability and simulated round trip."""
        if device_id not in self._registry:
            raise NotFound(f"device {device_id} not registered")
        gateway = self.sim.nodes.get(self.gateway_id)
        if gateway is None or not gateway.is_listening(self.sim.now):
            raise GatewayDown(f"gateway {self.gateway_id} is not on the air")
        issued = self.sim.now
        entry = self._issue(
            device_id, ACTION_PING, self.default_timeout_s, self.default_retries
        )
        self.sim.run_until(stop=lambda: entry.state != PENDING)
        reachable = entry.state == ANSWERED
        return {
            "reachable": reachable,
            "duration_s": (entry.answered_at - issued) if reachable else None,
        }
