"""Per-device protocol state: controlled-flooding reception and the action catalog.

A node classifies every successful reception into exactly one of three
buckets (received / retransmitted / ignored); corrupted receptions count as
errors. First-sight frames addressed elsewhere are relayed once; duplicates
are dropped via two bounded (source, message-id) caches.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field

from .wire import (
    BROADCAST_ID,
    RESPONSE_RADIX,
    U32_MAX,
    ControlFrame,
    Overflow,
    pack_response,
)

ROLE_MPP = "MPP"
ROLE_MP = "MP"
MESH_ROLES = (ROLE_MPP, ROLE_MP)

ACTION_SENSOR_ON = 1
ACTION_SENSOR_OFF = 2
ACTION_WIFI_ON = 3
ACTION_WIFI_OFF = 4
ACTION_AP_CLIENTS = 5
ACTION_SENSOR_TO_AP = 6
ACTION_AP_TO_SENSOR = 7
ACTION_REBOOT = 8
ACTION_PING = 9
ACTION_SENSOR_STATUS = 10
ACTION_AP_STATUS = 11

ACTIONS = {
    ACTION_SENSOR_ON: "sensor-on",
    ACTION_SENSOR_OFF: "sensor-off",
    ACTION_WIFI_ON: "wifi-on",
    ACTION_WIFI_OFF: "wifi-off",
    ACTION_AP_CLIENTS: "ap-connection-count",
    ACTION_SENSOR_TO_AP: "sensor-to-ap",
    ACTION_AP_TO_SENSOR: "ap-to-sensor",
    ACTION_REBOOT: "reboot",
    ACTION_PING: "connectivity-check",
    ACTION_SENSOR_STATUS: "sensor-status",
    ACTION_AP_STATUS: "ap-status",
}
ACTION_IDS = {name: num for num, name in ACTIONS.items()}

DEFAULT_DEDUP_CAPACITY = 1024
DEFAULT_BOOT_DELAY_S = 5.0


class UnknownAction(Exception):
    """action_id has no catalog entry."""


@dataclass
class MessageCounters:
    errors: int = 0
    retransmitted: int = 0
    received: int = 0
    sent: int = 0
    ignored: int = 0

    @property
    def successes(self) -> int:
        return self.retransmitted + self.received + self.ignored

    def as_dict(self) -> dict:
        return {
            "errors": self.errors,
            "retransmitted": self.retransmitted,
            "received": self.received,
            "sent": self.sent,
            "ignored": self.ignored,
        }


class LruSet:
    """Bounded set evicting the least recently refreshed member."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._entries: OrderedDict = OrderedDict()

    def __contains__(self, key) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def add(self, key) -> None:
        self._entries[key] = None
        self._entries.move_to_end(key)
        while len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def touch(self, key) -> None:
        if key in self._entries:
            self._entries.move_to_end(key)

    def clear(self) -> None:
        self._entries.clear()


@dataclass(frozen=True)
class Transmit:
    """Request to put one frame on the air.

    origin transmissions count toward the sender's `sent` counter when
    committed; allow_silent lets a pre-reboot response out even though the
    node is already marked as booting.
    """

    frame: ControlFrame
    origin: bool
    allow_silent: bool = False


class NodeState:
    """Single-owner runtime state of one mesh device."""

    def __init__(
        self,
        device_id: int,
        mesh_role: str = ROLE_MP,
        *,
        sensor_active: bool = True,
        ap_active: bool = False,
        ap_clients: int = 0,
        dedup_capacity: int = DEFAULT_DEDUP_CAPACITY,
        boot_delay_s: float = DEFAULT_BOOT_DELAY_S,
    ):
        if not 0 < device_id <= U32_MAX:
            raise ValueError(f"device_id must be in [1, 2^32), got {device_id}")
        if mesh_role not in MESH_ROLES:
            raise ValueError(f"mesh_role must be one of {MESH_ROLES}")
        if not 0 <= ap_clients < RESPONSE_RADIX:
            raise ValueError(f"ap_clients must be in [0, {RESPONSE_RADIX})")
        self.device_id = device_id
        self.mesh_role = mesh_role
        self.sensor_active = sensor_active
        self.ap_active = ap_active
        self.ap_clients = ap_clients
        self.alive = True
        self.boot_until = 0.0
        self.boot_delay_s = boot_delay_s
        self.next_msg_id = 1
        self.dedup_received = LruSet(dedup_capacity)
        self.dedup_forwarded = LruSet(dedup_capacity)
        self.counters = MessageCounters()
        # Set on the controller-attached gateway: frames addressed to the
        # gateway (or broadcasts reaching it) are handed north instead of
        # being executed locally.
        self.uplink = None

    def is_listening(self, now: float) -> bool:
        return self.alive and now >= self.boot_until

    def duplicate_seen(self, src: int, msg: int) -> bool:
        """Pure query over both dedup caches."""
        return (src, msg) in self.dedup_received or (src, msg) in self.dedup_forwarded

    def originate(self, dst: int, action_id: int) -> ControlFrame:
        """Build a fresh frame from this node; sequence numbers never repeat."""
        frame = ControlFrame(self.device_id, dst, self.next_msg_id, action_id)
        self.next_msg_id = 0 if self.next_msg_id >= U32_MAX else self.next_msg_id + 1
        # Remember our own frame so echoes relayed back are ignored, not
        # re-flooded.
        self.dedup_forwarded.add((frame.src_id, frame.msg_id))
        return frame

    def handle_reception(self, frame: ControlFrame | None, now: float):
        """Classify one reception outcome (None marks a corrupted one).

        Returns (classification, effects) where classification is one of
        "dropped", "error", "ignored", "received", "retransmitted" and
        effects is a list of Transmit requests.
        """
        if not self.is_listening(now):
            return "dropped", []
        if frame is None:
            self.counters.errors += 1
            return "error", []
        key = (frame.src_id, frame.msg_id)
        if key in self.dedup_received or key in self.dedup_forwarded:
            self.counters.ignored += 1
            self.dedup_received.touch(key)
            self.dedup_forwarded.touch(key)
            return "ignored", []
        if frame.src_id == self.device_id:
            # Own-origin echo surviving a cache wipe (e.g. after reboot).
            self.counters.ignored += 1
            return "ignored", []
        if frame.dst_id == self.device_id:
            self.counters.received += 1
            self.dedup_received.add(key)
            if self.uplink is not None:
                self.uplink(frame)
                return "received", []
            return "received", self._execute_and_respond(frame, now)
        if frame.dst_id == BROADCAST_ID:
            self.counters.received += 1
            self.dedup_received.add(key)
            effects = []
            if self.uplink is not None:
                self.uplink(frame)
            else:
                effects.extend(self._execute_and_respond(frame, now))
            effects.append(Transmit(frame, origin=False))
            return "received", effects
        self.counters.retransmitted += 1
        self.dedup_forwarded.add(key)
        return "retransmitted", [Transmit(frame, origin=False)]

    def _execute_and_respond(self, frame: ControlFrame, now: float) -> list:
        try:
            value = self.execute_action(frame.action_id, now)
        except UnknownAction:
            value = 0
        try:
            code = pack_response(frame.action_id, value)
        except Overflow:
            # Unknown action whose id cannot even be packed; nothing to say.
            return []
        response = self.originate(frame.src_id, code)
        return [
            Transmit(
                response,
                origin=True,
                allow_silent=frame.action_id == ACTION_REBOOT,
            )
        ]

    def execute_action(self, action_id: int, now: float) -> int:
        """Apply one catalog action; returns the response value (< 100)."""
        if action_id == ACTION_SENSOR_ON:
            self.sensor_active = True
            return 1
        if action_id == ACTION_SENSOR_OFF:
            self.sensor_active = False
            return 1
        if action_id == ACTION_WIFI_ON:
            self.ap_active = True
            return 1
        if action_id == ACTION_WIFI_OFF:
            self.ap_active = False
            return 1
        if action_id == ACTION_AP_CLIENTS:
            return self.ap_clients
        if action_id == ACTION_SENSOR_TO_AP:
            self.sensor_active = False
            self.ap_active = True
            return 1
        if action_id == ACTION_AP_TO_SENSOR:
            self.ap_active = False
            self.sensor_active = True
            return 1
        if action_id == ACTION_REBOOT:
            self.boot_until = now + self.boot_delay_s
            self.dedup_received.clear()
            self.dedup_forwarded.clear()
            return 1
        if action_id == ACTION_PING:
            return 1
        if action_id == ACTION_SENSOR_STATUS:
            return 1 if self.sensor_active else 0
        if action_id == ACTION_AP_STATUS:
            return 1 if self.ap_active else 0
        raise UnknownAction(action_id)
