"""Deterministic discrete-event loop binding mesh nodes to the shared medium.

All randomness (forward jitter, per-link loss draws) comes from one seeded
PRNG consumed in event order, and ties in the event queue break on
(time, sender, insertion sequence), so identical (scenario, seed) pairs
replay to identical traces.

Transmissions pass through a per-sender duty-cycle tracker plus a
listen-before-talk deferral: a sender never starts while a transmission it
can hear (an enabled link to the transmitter) is still on the air. Hidden
senders can still overlap, and overlapping same-channel transmissions corrupt
every reception they share a receiver with.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random

from .node import NodeState
from .radio import (
    DutyCycleTracker,
    RadioConfig,
    Topology,
    TransmissionEvent,
    airtime,
    current_channel,
)
from .wire import ControlFrame, decode_frame, encode_frame

_MAX_FRAME_LEN = 24


class Simulator:
    """Owns the timeline, the nodes, and the medium."""

    def __init__(self, topology: Topology, config: RadioConfig, seed: int = 0):
        self.topology = topology
        self.config = config
        self.seed = seed
        self.rng = random.Random(seed)
        self.nodes: dict = {}
        self.now = 0.0
        self.trace: list = []
        self._heap: list = []
        self._seq = itertools.count()
        self._duty: dict = {}
        self._txlog: list = []
        self._listeners: list = []
        self._prune_horizon = max(1.0, 8 * airtime(_MAX_FRAME_LEN, config))

    # -- wiring -----------------------------------------------------------

    def add_node(self, node: NodeState) -> NodeState:
        if node.device_id in self.nodes:
            raise ValueError(f"duplicate node id {node.device_id}")
        self.nodes[node.device_id] = node
        self.topology.add_node(node.device_id)
        self._duty[node.device_id] = DutyCycleTracker(
            self.config.duty_limit, self.config.duty_window_s
        )
        return node

    def add_listener(self, callback) -> None:
        """callback(record) fires for every trace record appended."""
        self._listeners.append(callback)

    def record(self, rec: dict) -> None:
        self.trace.append(rec)
        for cb in self._listeners:
            cb(rec)

    # -- event queue ------------------------------------------------------

    def schedule(self, t: float, sender: int, fn) -> None:
        heapq.heappush(self._heap, (t, sender, next(self._seq), fn))

    def run_until(self, until: float = math.inf, stop=None) -> None:
        """Process events up to `until`; advance now to `until` if finite."""
        while self._heap:
            t = self._heap[0][0]
            if t > until:
                break
            _, _, _, fn = heapq.heappop(self._heap)
            self.now = max(self.now, t)
            fn()
            if stop is not None and stop():
                return
        if math.isfinite(until) and until > self.now:
            self.now = until

    def run_all(self) -> None:
        self.run_until(math.inf)

    # -- transmissions ----------------------------------------------------

    def send(
        self,
        sender_id: int,
        frame: ControlFrame,
        *,
        origin: bool,
        allow_silent: bool = False,
        jitter: bool = True,
    ) -> None:
        """Queue a frame for transmission at now (+ random jitter)."""
        delay = 0.0
        if jitter and self.config.jitter_ms > 0:
            delay = self.rng.uniform(0.0, self.config.jitter_ms / 1000.0)
        self.schedule(
            self.now + delay,
            sender_id,
            lambda: self._commit(sender_id, frame, origin, allow_silent),
        )

    def _commit(self, sender_id, frame, origin, allow_silent) -> None:
        node = self.nodes[sender_id]
        if not allow_silent and not node.is_listening(self.now):
            return
        payload = encode_frame(frame)
        air = airtime(len(payload), self.config)
        start = self._earliest_start(sender_id, self.now, air)
        channel = current_channel(start, self.config, self.seed)
        tx = TransmissionEvent(sender_id, payload, start, air, channel)
        self._duty[sender_id].commit(start, air)
        self._txlog.append(tx)
        if origin:
            node.counters.sent += 1
        self.record(
            {
                "type": "tx",
                "t": self.now,
                "sender": sender_id,
                "start": start,
                "end": tx.end,
                "channel": channel,
                "origin": origin,
                "frame": frame.as_dict(),
                "payload_len": len(payload),
            }
        )
        for neighbor in self.topology.neighbors(sender_id):
            self.schedule(
                tx.end,
                sender_id,
                lambda n=neighbor, e=tx: self._deliver(e, n),
            )
        self._prune_txlog()

    def _earliest_start(self, sender_id, requested, air) -> float:
        duty = self._duty[sender_id]
        t = requested
        for _ in range(10_000):
            t_duty = duty.earliest(t, air)
            t_lbt = t_duty
            for tx in self._txlog:
                if tx.sender == sender_id:
                    continue
                if not self.topology.audible(tx.sender, sender_id):
                    continue
                if tx.start < t_lbt + air and tx.end > t_lbt:
                    t_lbt = max(t_lbt, tx.end)
            if t_lbt == t:
                return t
            t = t_lbt
        raise RuntimeError("transmission start search did not converge")

    def _deliver(self, tx: TransmissionEvent, receiver: int) -> None:
        link = self.topology.link(tx.sender, receiver)
        if link is None or not link.enabled:
            return  # link toggled off while the frame was in flight
        collision = self._has_collision(tx, receiver)
        corrupted = collision
        if not corrupted and link.p_err > 0:
            corrupted = self.rng.random() < link.p_err
        frame = None if corrupted else decode_frame(tx.payload)
        node = self.nodes[receiver]
        classification, effects = node.handle_reception(frame, self.now)
        self.record(
            {
                "type": "rx",
                "t": self.now,
                "receiver": receiver,
                "sender": tx.sender,
                "channel": tx.channel,
                "corrupted": corrupted,
                "collision": collision,
                "classification": classification,
                "frame": None if frame is None else frame.as_dict(),
            }
        )
        for eff in effects:
            self.send(
                receiver,
                eff.frame,
                origin=eff.origin,
                allow_silent=eff.allow_silent,
                jitter=True,
            )

    def _has_collision(self, tx: TransmissionEvent, receiver: int) -> bool:
        for other in self._txlog:
            if other is tx or other.channel != tx.channel:
                continue
            if other.sender == receiver:
                continue
            if not (other.start < tx.end and other.end > tx.start):
                continue
            if other.sender == tx.sender or self.topology.audible(
                other.sender, receiver
            ):
                return True
        return False

    def _prune_txlog(self) -> None:
        if len(self._txlog) > 512:
            horizon = self.now - self._prune_horizon
            self._txlog = [tx for tx in self._txlog if tx.end > horizon]
