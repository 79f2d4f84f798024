"""Seeded instance generators, some with a planted reference solution."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .meb import meb_exact_small_d
from .model import Ball, Instance, Solution, solution_cost_of

KINDS = ("planted-euclidean", "planted-general", "uniform-random", "adversarial-clique-gadget")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = "uniform-random"
    n: int = 8
    k: int = 2
    d: int = 2
    U: int | None = None              # uniform capacity; None draws from cap_range or uses ceil(n/k)
    cap_range: tuple | None = None    # (lo, hi) inclusive per-point capacities (general metric only)
    separation: float = 2.0           # min inter-cluster gap / max planted radius
    seed: int = 0
    metric: str = "euclidean"         # uniform-random only: euclidean | general
    clique: int = 3                   # gadget: size of the planted clique
    edge_prob: float = 0.3            # gadget: background edge density

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 1 or self.k < 1 or self.d < 1:
            raise ValueError("n, k and d must be positive")
        if self.cap_range is not None:
            object.__setattr__(self, "cap_range", tuple(int(c) for c in self.cap_range))

    @property
    def instance_id(self) -> str:
        return f"{self.kind}-n{self.n}-k{self.k}-d{self.d}-s{self.seed}"

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_json(cls, obj: dict) -> "GeneratorSpec":
        return cls(**obj)


@dataclass
class GroundTruth:
    """Planted balls and assignment; cost upper-bounds the optimum."""
    balls: list[Ball]
    assignment: list[int]
    cost: float = field(init=False)

    def __post_init__(self):
        self.cost = solution_cost_of(self.balls)

    def as_solution(self) -> Solution:
        return Solution.build(self.balls, self.assignment)


def generate(spec: GeneratorSpec) -> tuple[Instance, GroundTruth | None]:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=spec.seed, spawn_key=(KINDS.index(spec.kind),)))
    if spec.kind == "planted-euclidean":
        return _planted_euclidean(spec, rng)
    if spec.kind == "planted-general":
        return _planted_general(spec, rng)
    if spec.kind == "uniform-random":
        return _uniform_random(spec, rng), None
    return clique_gadget(spec, rng), None


def _default_U(spec) -> int:
    return spec.U if spec.U is not None else math.ceil(spec.n / spec.k)


def _cluster_sizes(n: int, k: int, U: int, rng) -> list[int]:
    """Random sizes, each between 1 and U when possible, summing to n."""
    if n > k * U:
        raise ValueError(f"n={n} exceeds k*U={k * U}")
    parts = min(k, n)
    sizes = [1] * parts
    for _ in range(n - parts):
        open_ = [i for i in range(parts) if sizes[i] < U]
        sizes[open_[int(rng.integers(len(open_)))]] += 1
    return sizes


def _in_ball(rng, d: int, radius: float) -> np.ndarray:
    v = rng.normal(size=d)
    v /= np.linalg.norm(v) or 1.0
    return v * radius * rng.random() ** (1.0 / d)


def _planted_clusters(spec, rng, U):
    sizes = _cluster_sizes(spec.n, spec.k, U, rng)
    radii = [float(rng.uniform(0.2, 1.0)) for _ in sizes]
    top = max(radii)
    # centers at least 2*top + separation*top apart keep the clusters separated
    gap = (2 + spec.separation) * top
    centers: list[np.ndarray] = []
    spread = gap * max(1.0, len(sizes) ** (1 / spec.d))
    while len(centers) < len(sizes):
        c = rng.uniform(-spread, spread, size=spec.d)
        if all(np.linalg.norm(c - o) >= gap for o in centers):
            centers.append(c)
        else:
            spread *= 1.01
    points, labels = [], []
    for j, (c, r, s) in enumerate(zip(centers, radii, sizes)):
        for _ in range(s):
            points.append(c + _in_ball(rng, spec.d, r))
            labels.append(j)
    order = rng.permutation(len(points))
    pts = np.array([points[i] for i in order])
    labels = [labels[i] for i in order]
    return pts, labels, len(sizes)


def _planted_euclidean(spec, rng):
    U = _default_U(spec)
    pts, labels, m = _planted_clusters(spec, rng, U)
    inst = Instance.euclidean(pts, spec.k, U)
    balls = []
    for j in range(m):
        balls.append(meb_exact_small_d(pts[[p for p, lab in enumerate(labels) if lab == j]]))
    return inst, GroundTruth(balls, labels)


def _planted_general(spec, rng):
    uniform = spec.U is not None or spec.cap_range is None
    U = _default_U(spec) if uniform else spec.cap_range[1]
    pts, labels, m = _planted_clusters(spec, rng, U)
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    balls, centers = [], []
    for j in range(m):
        members = [p for p, lab in enumerate(labels) if lab == j]
        c = min(members, key=lambda q: (max(dist[q][p] for p in members), q))
        centers.append((c, len(members)))
        balls.append(Ball(c, float(max(dist[c][p] for p in members))))
    if uniform:
        caps = [U] * spec.n
    else:
        lo, hi = spec.cap_range
        caps = [int(x) for x in rng.integers(lo, hi + 1, size=spec.n)]
        for c, size in centers:
            caps[c] = max(caps[c], size)
    inst = Instance.general(dist, caps, spec.k, validate=False)
    return inst, GroundTruth(balls, labels)


def _uniform_random(spec, rng):
    pts = rng.random((spec.n, spec.d))
    if spec.metric == "euclidean":
        return Instance.euclidean(pts, spec.k, _default_U(spec))
    if spec.metric != "general":
        raise ValueError(f"unknown metric {spec.metric!r}")
    dist = random_metric(spec.n, rng)
    if spec.cap_range is None:
        return Instance.general(dist, [_default_U(spec)] * spec.n, spec.k, validate=False)
    lo, hi = spec.cap_range
    while True:
        caps = [int(x) for x in rng.integers(lo, hi + 1, size=spec.n)]
        inst = Instance.general(dist, caps, spec.k, validate=False)
        if not inst.trivially_infeasible:
            return inst
        if sum(sorted([hi] * spec.n)[: spec.k]) < spec.n:
            raise ValueError("capacity range cannot cover n points with k balls")


def random_metric(n: int, rng) -> np.ndarray:
    """Shortest-path closure of random positive edge weights."""
    w = rng.uniform(0.1, 1.0, size=(n, n))
    w = np.minimum(w, w.T)
    np.fill_diagonal(w, 0.0)
    for m in range(n):
        w = np.minimum(w, w[:, m:m + 1] + w[m:m + 1, :])
    return w


def clique_gadget(spec, rng) -> Instance:
    """Graph-to-points stress instance with k = 2.

    Each vertex becomes a 0/1 point with one coordinate per edge (1 when the
    vertex is an endpoint) and two trailing zero coordinates.  Four sentinel
    points sit at (+-D, +-D) in the trailing coordinates, far from the graph
    points.  The uniform capacity is n + 4 - clique.
    """
    n, q = spec.n, spec.clique
    if not 2 <= q <= max(2, n // 2):
        raise ValueError("clique size must be in [2, n/2]")
    verts = [int(v) for v in rng.permutation(n)[:q]]
    edges = {(min(a, b), max(a, b)) for a in verts for b in verts if a != b}
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < spec.edge_prob:
                edges.add((a, b))
    edges = sorted(edges)
    m = len(edges)
    pts = np.zeros((n + 4, m + 2))
    for e, (a, b) in enumerate(edges):
        pts[a, e] = pts[b, e] = 1.0
    span = max((float(np.linalg.norm(pts[a] - pts[b])) for a in range(n) for b in range(a + 1, n)),
               default=0.0)
    delta = span + 2 * math.sqrt(n)
    for s, (x, y) in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
        pts[n + s, m] = x * delta
        pts[n + s, m + 1] = y * delta
    return Instance.euclidean(pts, 2, n + 4 - q)
