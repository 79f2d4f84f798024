"""Capacity feasibility of a ball set via max-flow.

source -> ball (capacity of its center) -> point (unit, when contained) -> sink.
"""
from __future__ import annotations

import math
from collections import deque

from .model import SLACK


class Dinic:
    """Dinic max-flow; arcs are explored in insertion order."""

    def __init__(self, n: int):
        self.n = n
        self.head = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, c: int) -> int:
        e = len(self.to)
        self.to += [v, u]
        self.cap += [c, 0]
        self.head[u].append(e)
        self.head[v].append(e + 1)
        return e

    def _bfs(self, s: int, t: int) -> bool:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if self.cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
        self.level = level
        return level[t] >= 0

    def _dfs(self, u: int, t: int, f: int) -> int:
        if u == t:
            return f
        head, it, level, to, cap = self.head[u], self.it, self.level, self.to, self.cap
        while it[u] < len(head):
            e = head[it[u]]
            v = to[e]
            if cap[e] > 0 and level[v] == level[u] + 1:
                got = self._dfs(v, t, min(f, cap[e]))
                if got:
                    cap[e] -= got
                    cap[e ^ 1] += got
                    return got
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                f = self._dfs(s, t, 1 << 60)
                if not f:
                    break
                total += f
        return total


def _assign(inst, balls, caps) -> list[int] | None:
    n, m = inst.n, len(balls)
    if n == 0:
        return []
    if m == 0 or sum(caps) < n:
        return None
    member = []
    covered = 0
    for ball in balls:
        d = inst.distances_from(ball.center).tolist()
        lim = ball.radius + SLACK
        pts = [p for p in range(n) if d[p] <= lim]
        member.append(pts)
        for p in pts:
            covered |= 1 << p
    if covered != (1 << n) - 1:
        return None
    src, snk = 0, m + n + 1
    g = Dinic(m + n + 2)
    for b in range(m):
        g.add_edge(src, 1 + b, caps[b])
    arcs = []
    for b in range(m):
        for p in member[b]:
            arcs.append((g.add_edge(1 + b, 1 + m + p, 1), b, p))
    for p in range(n):
        g.add_edge(1 + m + p, snk, 1)
    if g.max_flow(src, snk) < n:
        return None
    assignment = [-1] * n
    for e, b, p in arcs:
        if g.cap[e] == 0:
            assignment[p] = b
    return assignment


def _check_centers(inst, balls):
    if inst.kind == "general":
        centers = [b.center for b in balls]
        if len(set(centers)) != len(centers):
            raise ValueError("general-metric balls need distinct centers")


def find_assignment(inst, balls) -> list[int] | None:
    """A capacity-respecting assignment of every point, or None if none exists."""
    if not balls:
        raise ValueError("need at least one ball")
    _check_centers(inst, balls)
    return _assign(inst, balls, [inst.capacity_of(b.center) for b in balls])


def scaled_capacity(U: int, scale: float) -> int:
    return math.floor(scale * U + 1e-9)


def find_assignment_with_capacity_scale(inst, balls, scale: float) -> list[int] | None:
    """Like find_assignment but every ball may hold floor(scale * U) points."""
    if scale < 1:
        raise ValueError("scale must be at least 1")
    if inst.uniform_capacity is None:
        raise ValueError("capacity scaling needs uniform capacities")
    if not balls:
        raise ValueError("need at least one ball")
    _check_centers(inst, balls)
    cap = scaled_capacity(inst.uniform_capacity, scale)
    return _assign(inst, balls, [cap] * len(balls))
