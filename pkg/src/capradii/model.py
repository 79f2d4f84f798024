"""Instances, balls, solutions and the verification contract."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .metric import EuclideanMetric, MatrixMetric

SLACK = 1e-9          # absolute containment slack
COST_RTOL = 1e-12     # relative tolerance when recomputing a cost


class InfeasibleInstance(Exception):
    """No capacity-respecting solution exists."""


class BudgetExhausted(Exception):
    """The search finished without finding any feasible candidate."""


@dataclass(frozen=True)
class Ball:
    center: Any          # point id (general metric) or coordinate tuple
    radius: float

    def __post_init__(self):
        if not (self.radius >= 0):
            raise ValueError(f"negative radius {self.radius}")
        if isinstance(self.center, (list, tuple, np.ndarray)):
            object.__setattr__(self, "center", tuple(float(x) for x in self.center))
        else:
            object.__setattr__(self, "center", int(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def is_point_centered(self) -> bool:
        return isinstance(self.center, int)


def ext(ball: Ball, delta: float) -> Ball:
    """Same center, radius grown by ``delta``."""
    if delta < 0:
        raise ValueError("extension must be non-negative")
    return Ball(ball.center, ball.radius + delta)


class Instance:
    """A capacitated sum-of-radii instance.

    General-metric instances open balls only at input points; Euclidean ones
    may center a ball anywhere and always carry a uniform capacity.
    """

    def __init__(self, metric, capacities, k: int):
        if k < 1:
            raise ValueError("k must be positive")
        caps = tuple(int(c) for c in capacities)
        if len(caps) != metric.n:
            raise ValueError("one capacity per point required")
        if any(c < 0 for c in caps):
            raise ValueError("capacities must be non-negative")
        self.metric = metric
        self.capacities = caps
        self.k = int(k)
        self.uniform_capacity = caps[0] if caps and len(set(caps)) == 1 else None
        self._rows = metric.matrix.tolist()

    @classmethod
    def general(cls, dist, capacities, k: int, validate: bool = True) -> "Instance":
        return cls(MatrixMetric(dist, validate=validate), capacities, k)

    @classmethod
    def euclidean(cls, points, k: int, U: int) -> "Instance":
        metric = EuclideanMetric(points)
        return cls(metric, [U] * metric.n, k)

    @property
    def kind(self) -> str:
        return self.metric.kind

    @property
    def n(self) -> int:
        return self.metric.n

    @property
    def d(self) -> int | None:
        return self.metric.d if self.kind == "euclidean" else None

    @property
    def U(self) -> int | None:
        return self.uniform_capacity

    @property
    def matrix(self) -> np.ndarray:
        return self.metric.matrix

    @property
    def rows(self) -> list[list[float]]:
        return self._rows

    @property
    def points(self) -> np.ndarray:
        return self.metric.points

    def dist(self, p: int, q: int) -> float:
        return self._rows[p][q]

    def distances_from(self, center) -> np.ndarray:
        if isinstance(center, (int, np.integer)):
            return self.metric.matrix[int(center)]
        return self.metric.distances_from(center)

    def dist_to_center(self, p: int, center) -> float:
        if isinstance(center, (int, np.integer)):
            return self._rows[p][int(center)]
        diff = self.metric.points[p] - np.asarray(center, dtype=float)
        return float(np.sqrt(diff @ diff))

    def capacity_of(self, center) -> int:
        if isinstance(center, (int, np.integer)):
            return self.capacities[int(center)]
        if self.uniform_capacity is None:
            raise ValueError("free centers need a uniform capacity")
        return self.uniform_capacity

    def cover_mask(self, ball: Ball) -> int:
        """Bitmask of points inside ``ball`` (with the shared slack)."""
        d = self.distances_from(ball.center)
        mask = 0
        lim = ball.radius + SLACK
        for p, v in enumerate(d.tolist()):
            if v <= lim:
                mask |= 1 << p
        return mask

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def trivially_infeasible(self) -> bool:
        if self.uniform_capacity is not None:
            return self.n > self.k * self.uniform_capacity
        if self.kind == "euclidean":
            return False
        top = sorted(self.capacities, reverse=True)[: self.k]
        return sum(top) < self.n

    def with_capacities(self, capacities) -> "Instance":
        return Instance(self.metric, capacities, self.k)

    def with_k(self, k: int) -> "Instance":
        return Instance(self.metric, self.capacities, k)

    def as_general(self) -> "Instance":
        """Same points viewed as a finite metric (centers restricted to P)."""
        return Instance(MatrixMetric(self.matrix, validate=False), self.capacities, self.k)

    def to_json(self) -> dict:
        if self.kind == "general":
            return {"kind": "general", "n": self.n, "k": self.k,
                    "dist": self.matrix.tolist(), "capacities": list(self.capacities)}
        return {"kind": "euclidean", "d": self.d, "k": self.k, "U": self.uniform_capacity,
                "points": self.points.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        if obj.get("kind") == "general":
            inst = cls.general(obj["dist"], obj["capacities"], obj["k"])
            if "n" in obj and obj["n"] != inst.n:
                raise ValueError("n does not match the distance matrix")
            return inst
        if obj.get("kind") == "euclidean":
            pts = obj["points"]
            if not pts:
                pts = np.zeros((0, int(obj.get("d", 1))))
            inst = cls.euclidean(pts, obj["k"], obj["U"])
            if "d" in obj and inst.n and obj["d"] != inst.d:
                raise ValueError("d does not match the coordinates")
            return inst
        raise ValueError(f"unknown instance kind {obj.get('kind')!r}")


@dataclass
class Solution:
    balls: list[Ball]
    assignment: list[int]
    cost: float
    trace: tuple = field(default=(), compare=False)
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, balls, assignment, trace=(), **meta) -> "Solution":
        balls = list(balls)
        return cls(balls, list(assignment), solution_cost_of(balls), tuple(trace), meta)

    def to_json(self) -> dict:
        return {"balls": [{"center": list(b.center) if not b.is_point_centered else b.center,
                           "radius": b.radius} for b in self.balls],
                "assignment": list(self.assignment), "cost": self.cost}

    @classmethod
    def from_json(cls, obj: dict) -> "Solution":
        balls = [Ball(b["center"], b["radius"]) for b in obj["balls"]]
        return cls(balls, [int(a) for a in obj["assignment"]], float(obj["cost"]))


def solution_cost_of(balls) -> float:
    return float(math.fsum(b.radius for b in balls))


def solution_cost(sol: Solution) -> float:
    return solution_cost_of(sol.balls)


@dataclass(frozen=True)
class Violation:
    kind: str       # coverage | capacity | duplicate-center | ball-count | cost | malformed
    detail: str


@dataclass
class VerificationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"{v.kind}: {v.detail}" for v in self.violations)


def verify_solution(inst: Instance, sol: Solution, capacity_scale: float = 1.0) -> VerificationReport:
    """Check coverage, capacities, distinct centers, ball count and cost.

    With ``capacity_scale`` > 1 each ball may hold ``floor(scale * cap)`` points.
    """
    rep = VerificationReport()
    add = lambda kind, detail: rep.violations.append(Violation(kind, detail))
    balls = sol.balls
    if len(balls) > inst.k:
        add("ball-count", f"{len(balls)} balls for k={inst.k}")
    for b, ball in enumerate(balls):
        if ball.is_point_centered:
            if not 0 <= ball.center < inst.n:
                add("malformed", f"ball {b} center {ball.center} is not a point")
        elif inst.kind == "general":
            add("malformed", f"ball {b} has a free center in a general metric")
        elif len(ball.center) != inst.d:
            add("malformed", f"ball {b} center has wrong dimension")
    if inst.kind == "general":
        seen = {}
        for b, ball in enumerate(balls):
            if ball.center in seen:
                add("duplicate-center", f"balls {seen[ball.center]} and {b} share center {ball.center}")
            seen.setdefault(ball.center, b)
    if rep.kinds() & {"malformed"}:
        return rep
    if len(sol.assignment) != inst.n:
        add("malformed", f"assignment has {len(sol.assignment)} entries for n={inst.n}")
        return rep
    load = [0] * len(balls)
    for p, b in enumerate(sol.assignment):
        if not 0 <= b < len(balls):
            add("coverage", f"point {p} assigned to missing ball {b}")
            continue
        load[b] += 1
        gap = inst.dist_to_center(p, balls[b].center) - balls[b].radius
        if gap > SLACK:
            add("coverage", f"point {p} lies {gap:.3g} outside ball {b}")
    for b, ball in enumerate(balls):
        cap = inst.capacity_of(ball.center)
        if capacity_scale != 1.0:
            cap = math.floor(capacity_scale * cap + 1e-9)
        if load[b] > cap:
            add("capacity", f"ball {b} holds {load[b]} points, capacity {cap}")
    true_cost = solution_cost_of(balls)
    if abs(true_cost - sol.cost) > COST_RTOL * max(1.0, abs(true_cost)):
        add("cost", f"reported {sol.cost!r}, radii sum to {true_cost!r}")
    return rep


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return Instance.from_json(json.load(fh))


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(inst.to_json(), fh)


def load_solution(path) -> Solution:
    with open(path, encoding="utf-8") as fh:
        return Solution.from_json(json.load(fh))


def save_solution(sol: Solution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sol.to_json(), fh)
