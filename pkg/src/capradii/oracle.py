"""Exhaustive exact solvers for tiny instances.

General metric: an optimal ball can always shrink until it touches its
farthest assigned point, so each center only needs the radii given by its
distances to input points.  Euclidean: every optimal ball may be replaced
by the minimum enclosing ball of its cluster, so enumerating partitions is
enough.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass


from .flow import find_assignment
from .meb import meb_exact_small_d
from .model import SLACK, Ball, InfeasibleInstance, Instance, Solution

TIE_TOL = 1e-12


class OracleBudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 10
    max_k: int = 3
    time_limit: float | None = None

    def check(self, inst: Instance) -> None:
        if inst.n > self.max_n or inst.k > self.max_k:
            raise OracleBudgetExceeded(
                f"n={inst.n}, k={inst.k} exceeds budget n<={self.max_n}, k<={self.max_k}")


class _Clock:
    def __init__(self, limit):
        self.deadline = None if limit is None else time.monotonic() + limit

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise OracleBudgetExceeded("time limit reached")


def _better(cost, key, best_cost, best_key) -> bool:
    if best_cost is None or cost < best_cost - TIE_TOL:
        return True
    return abs(cost - best_cost) <= TIE_TOL and key < best_key


def solve_exact_general(inst: Instance, budget: OracleBudget | None = None) -> Solution:
    budget = budget or OracleBudget()
    if inst.kind != "general":
        raise ValueError("general-metric oracle needs a general instance (see as_general)")
    budget.check(inst)
    if inst.trivially_infeasible:
        raise InfeasibleInstance("sum of the k largest capacities is below n")
    n, rows = inst.n, inst.rows
    if n == 0:
        return Solution([], [], 0.0)
    clock = _Clock(budget.time_limit)
    m = min(inst.k, n)
    full = (1 << n) - 1
    # per center: sorted candidate radii and the cover mask of each
    cand = []
    for c in range(n):
        radii = sorted(set(rows[c]) | {0.0})
        masks = [sum(1 << p for p in range(n) if rows[c][p] <= r + SLACK) for r in radii]
        cand.append((radii, masks))
    best = [None, None, None]  # cost, key, (centers, radii)

    for centers in itertools.combinations(range(n), m):
        clock.tick()
        if sum(inst.capacities[c] for c in centers) < n:
            continue
        chosen = [0.0] * m

        def rec(pos, partial, mask):
            if best[0] is not None and partial > best[0] + TIE_TOL:
                return
            if pos == m:
                if mask != full:
                    return
                key = (tuple(chosen), centers)
                if not _better(partial, key, best[0], best[1]):
                    return
                balls = [Ball(c, r) for c, r in zip(centers, chosen)]
                if find_assignment(inst, balls) is not None:
                    best[0], best[1], best[2] = partial, key, balls
                return
            radii, masks = cand[centers[pos]]
            for r, mk in zip(radii, masks):
                if best[0] is not None and partial + r > best[0] + TIE_TOL:
                    break
                chosen[pos] = r
                rec(pos + 1, partial + r, mask | mk)

        rec(0, 0.0, 0)
    if best[0] is None:
        raise InfeasibleInstance("no feasible solution")
    balls = best[2]
    return Solution.build(balls, find_assignment(inst, balls))


def _restricted_growth(n: int, max_parts: int, max_size: int):
    """Partitions of range(n) as label lists, parts capped in number and size."""
    labels = [0] * n
    sizes = [0] * max_parts

    def rec(i, used):
        if i == n:
            yield labels
            return
        for lab in range(min(used + 1, max_parts)):
            if sizes[lab] >= max_size:
                continue
            labels[i] = lab
            sizes[lab] += 1
            yield from rec(i + 1, max(used, lab + 1))
            sizes[lab] -= 1

    yield from rec(0, 0)


def solve_exact_euclidean(inst: Instance, budget: OracleBudget | None = None) -> Solution:
    budget = budget or OracleBudget()
    if inst.kind != "euclidean":
        raise ValueError("Euclidean oracle needs a Euclidean instance")
    budget.check(inst)
    if inst.d > 4:
        raise OracleBudgetExceeded("exact MEB supports d <= 4")
    if inst.trivially_infeasible:
        raise InfeasibleInstance("n exceeds k * U")
    n = inst.n
    if n == 0:
        return Solution([], [], 0.0)
    clock = _Clock(budget.time_limit)
    U, pts = inst.U, inst.points
    cache: dict[int, Ball] = {}

    def ball_of(mask: int) -> Ball:
        b = cache.get(mask)
        if b is None:
            idx = [p for p in range(n) if mask >> p & 1]
            b = cache[mask] = meb_exact_small_d(pts[idx])
        return b

    best_cost, best_key, best_parts = None, None, None
    for labels in _restricted_growth(n, inst.k, U):
        clock.tick()
        parts = [0] * (max(labels) + 1)
        for p, lab in enumerate(labels):
            parts[lab] |= 1 << p
        balls = [ball_of(mk) for mk in parts]
        cost = sum(b.radius for b in balls)
        key = (tuple(b.radius for b in balls), tuple(b.center for b in balls))
        if _better(cost, key, best_cost, best_key):
            best_cost, best_key, best_parts = cost, key, (list(labels), balls)
    labels, balls = best_parts
    return Solution.build(balls, labels)


def solve_exact(inst: Instance, budget: OracleBudget | None = None) -> Solution:
    if inst.kind == "general":
        return solve_exact_general(inst, budget)
    return solve_exact_euclidean(inst, budget)


def lower_bound_uncapacitated(inst: Instance, budget: OracleBudget | None = None) -> float:
    """Exact optimum of the same instance with every capacity raised to n."""
    n = max(inst.n, 1)
    if inst.kind == "general":
        relaxed = inst.with_capacities([n] * inst.n)
    else:
        relaxed = Instance.euclidean(inst.points, inst.k, n)
    return solve_exact(relaxed, budget).cost
