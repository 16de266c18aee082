"""Shared-medium model: time-on-air, slotted channel hopping, duty budgeting.

Time-on-air uses a flat serial-rate model, (preamble + payload) bits over the
configured air rate; the radios expose no chirp parameters. The hop schedule
is globally synchronized: every node evaluating the schedule at the same
instant lands on the same channel.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

HOP_ROUND_ROBIN = "round-robin"
HOP_SEEDED_PERMUTATION = "seeded-permutation"
HOP_MODES = (HOP_ROUND_ROBIN, HOP_SEEDED_PERMUTATION)

DEFAULT_CHANNELS_MHZ = (865.0, 866.0, 867.0, 868.0)

_EPS = 1e-12


@dataclass
class RadioConfig:
    air_rate_bps: float = 2400.0
    preamble_bytes: int = 8
    channels_mhz: tuple = DEFAULT_CHANNELS_MHZ
    slot_ms: float = 500.0
    hop_mode: str = HOP_ROUND_ROBIN
    duty_limit: float = 0.01
    duty_window_s: float = 3600.0
    jitter_ms: float = 200.0

    def __post_init__(self) -> None:
        self.channels_mhz = tuple(self.channels_mhz)
        if not self.channels_mhz:
            raise ValueError("channels_mhz must not be empty")
        if self.air_rate_bps <= 0:
            raise ValueError("air_rate_bps must be positive")
        if self.preamble_bytes < 0:
            raise ValueError("preamble_bytes must be >= 0")
        if self.slot_ms <= 0:
            raise ValueError("slot_ms must be positive")
        if not 0 < self.duty_limit <= 1:
            raise ValueError("duty_limit must be in (0, 1]")
        if self.duty_window_s <= 0:
            raise ValueError("duty_window_s must be positive")
        if self.jitter_ms < 0:
            raise ValueError("jitter_ms must be >= 0")
        if self.hop_mode not in HOP_MODES:
            raise ValueError(f"hop_mode must be one of {HOP_MODES}")


def airtime(payload_len: int, config: RadioConfig) -> float:
    """Seconds one frame of payload_len bytes occupies the channel."""
    if payload_len < 0:
        raise ValueError("payload_len must be >= 0")
    return (config.preamble_bytes + payload_len) * 8.0 / config.air_rate_bps


def current_channel(t: float, config: RadioConfig, seed: int = 0) -> int:
    """Channel index of the network-wide schedule at simulated time t."""
    if t < 0:
        raise ValueError("t must be >= 0")
    k = len(config.channels_mhz)
    slot = int(t / (config.slot_ms / 1000.0))
    if config.hop_mode == HOP_ROUND_ROBIN:
        return slot % k
    cycle, pos = divmod(slot, k)
    # Every cycle is a full permutation derived from (seed, cycle), so all
    # nodes agree and every channel appears once per cycle.
    rng = random.Random(seed * 0x9E3779B1 + cycle)
    perm = list(range(k))
    rng.shuffle(perm)
    return perm[pos]


@dataclass
class Link:
    a: int
    b: int
    p_err: float = 0.0
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError("self-links are not allowed")
        if not 0.0 <= self.p_err <= 1.0:
            raise ValueError("p_err must be in [0, 1]")

    @property
    def key(self) -> tuple:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


class Topology:
    """Undirected link graph with per-link error probability."""

    def __init__(self):
        self.node_ids: set = set()
        self._links: dict = {}

    def add_node(self, node_id: int) -> None:
        self.node_ids.add(node_id)

    def add_link(self, a: int, b: int, p_err: float = 0.0, enabled: bool = True) -> Link:
        link = Link(a, b, p_err, enabled)
        if a not in self.node_ids or b not in self.node_ids:
            raise ValueError(f"link ({a}, {b}) references an unknown node")
        if link.key in self._links:
            raise ValueError(f"duplicate link between {a} and {b}")
        self._links[link.key] = link
        return link

    def link(self, a: int, b: int) -> Link | None:
        return self._links.get((a, b) if a < b else (b, a))

    def audible(self, a: int, b: int) -> bool:
        link = self.link(a, b)
        return link is not None and link.enabled

    def neighbors(self, node_id: int) -> list:
        out = []
        for link in self._links.values():
            if not link.enabled:
                continue
            if link.a == node_id:
                out.append(link.b)
            elif link.b == node_id:
                out.append(link.a)
        return sorted(out)

    def set_link(self, a: int, b: int, *, enabled=None, p_err=None) -> Link:
        link = self.link(a, b)
        if link is None:
            raise KeyError(f"no link between {a} and {b}")
        if enabled is not None:
            link.enabled = bool(enabled)
        if p_err is not None:
            if not 0.0 <= p_err <= 1.0:
                raise ValueError("p_err must be in [0, 1]")
            link.p_err = float(p_err)
        return link

    def links(self) -> list:
        return [self._links[k] for k in sorted(self._links)]


@dataclass
class TransmissionEvent:
    sender: int
    payload: bytes
    start: float
    airtime: float
    channel: int

    @property
    def end(self) -> float:
        return self.start + self.airtime


class DutyCycleTracker:
    """Per-sender airtime budget over a sliding window.

    Transmissions are never dropped: a frame that would bust the budget is
    deferred (FIFO per sender) until enough earlier airtime slides out of the
    window.
    """

    def __init__(self, limit: float, window_s: float):
        self.limit = limit
        self.window_s = window_s
        self.last_end = 0.0
        self._history: list = []  # (start, airtime), ascending starts

    def earliest(self, requested: float, airtime_s: float) -> float:
        """Earliest compliant start >= requested for one frame."""
        budget = self.limit * self.window_s
        if airtime_s > budget + _EPS:
            raise ValueError(
                f"frame airtime {airtime_s:.3f}s can never fit a "
                f"{budget:.3f}s duty budget"
            )
        t = max(requested, self.last_end)
        slack = 1e-9
        while True:
            window_start = t + airtime_s - self.window_s
            active = [(s, a) for s, a in self._history if s + a > window_start + slack]
            total = sum(a for _, a in active) + airtime_s
            if total <= budget + _EPS:
                return t
            # Push the start until enough of the oldest active entries have
            # fully left the window; always make strict progress so float
            # rounding cannot stall the search.
            excess = total - budget
            dropped = 0.0
            candidate = t
            for s, a in active:
                dropped += a
                if dropped >= excess - _EPS:
                    candidate = s + a + self.window_s - airtime_s
                    break
            t = max(candidate, t + slack)

    def commit(self, start: float, airtime_s: float) -> None:
        self._history.append((start, airtime_s))
        self.last_end = start + airtime_s
        # Entries that ended a full window before this start can never
        # influence a later (monotonically increasing) start.
        horizon = start + airtime_s - self.window_s
        if self._history and self._history[0][0] + self._history[0][1] <= horizon:
            self._history = [
                (s, a) for s, a in self._history if s + a > horizon
            ]
