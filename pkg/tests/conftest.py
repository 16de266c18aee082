"""Shared test helpers: independent oracles kept separate from the package."""

from __future__ import annotations

import random


def varint_oracle(value: int) -> bytes:
    """Reference base-128 varint built by explicit 7-bit grouping."""
    if value == 0:
        return b"\x00"
    groups = []
    while value:
        groups.append(value & 0b0111_1111)
        value >>= 7
    out = bytes(g | 0x80 for g in groups[:-1]) + bytes([groups[-1]])
    return out


def duty_windows_ok(transmissions, limit, window_s, tol=1e-6):
    """Replay checker: overlap-summed airtime in every sliding window.

    transmissions: list of (start, end). The maximum over window positions is
    attained with the window's right edge at some transmission end, so only
    those critical positions are checked.
    """
    budget = limit * window_s
    ends = sorted({end for _, end in transmissions})
    for right in ends:
        left = right - window_s
        used = sum(
            max(0.0, min(end, right) - max(start, left))
            for start, end in transmissions
        )
        if used > budget + tol:
            return False
    return True


def random_connected_topology(rng: random.Random, n: int, extra_p: float = 0.25):
    """Random spanning tree plus extra edges; node ids 1..n."""
    nodes = list(range(1, n + 1))
    order = nodes[:]
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        a, b = order[i], rng.choice(order[:i])
        edges.add((min(a, b), max(a, b)))
    for a in nodes:
        for b in nodes:
            if a < b and (a, b) not in edges and rng.random() < extra_p:
                edges.add((a, b))
    return nodes, sorted(edges)


def bfs_reachable(nodes, edges, origin):
    adj = {n: set() for n in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {origin}
    stack = [origin]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen
