"""Distance backends for the two instance kinds.

Both backends expose a dense ``matrix`` of point-to-point distances; the
Euclidean one also keeps coordinates so balls may be centered anywhere.
"""
from __future__ import annotations

import numpy as np

METRIC_RTOL = 1e-9


class MetricError(ValueError):
    pass


class MatrixMetric:
    """Explicit symmetric distance matrix, validated for the metric axioms."""

    kind = "general"

    def __init__(self, dist, validate: bool = True):
        m = np.array(dist, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise MetricError("distance matrix must be square")
        self.matrix = m
        self.matrix.setflags(write=False)
        if validate:
            self.validate()

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dist(self, p: int, q: int) -> float:
        return float(self.matrix[p, q])

    def validate(self, triples: int = 1000, seed: int = 0) -> None:
        m = self.matrix
        if not np.all(np.isfinite(m)):
            raise MetricError("distances must be finite")
        scale = max(1.0, float(m.max(initial=0.0)))
        tol = METRIC_RTOL * scale
        if np.any(m < -tol):
            raise MetricError("negative distance")
        if np.any(np.abs(np.diag(m)) > tol):
            raise MetricError("non-zero self distance")
        if np.any(np.abs(m - m.T) > tol):
            raise MetricError("asymmetric distances")
        n = self.n
        if n == 0:
            return
        if n <= 60:
            # full check: d(i,k) <= d(i,j) + d(j,k) for all triples
            viol = m[:, None, :] - (m[:, :, None] + m[None, :, :])
            if np.any(viol > tol):
                raise MetricError("triangle inequality violated")
        else:
            rng = np.random.default_rng(seed)
            i, j, k = rng.integers(0, n, size=(3, triples))
            if np.any(m[i, k] - m[i, j] - m[j, k] > tol):
                raise MetricError("triangle inequality violated")


class EuclideanMetric:
    """Points in R^d; distances materialized once (instances are small)."""

    kind = "euclidean"

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if pts.size else pts.reshape(0, 1)
        if pts.ndim != 2:
            raise MetricError("points must be an n x d array")
        if not np.all(np.isfinite(pts)):
            raise MetricError("coordinates must be finite")
        self.points = pts
        self.points.setflags(write=False)
        diff = pts[:, None, :] - pts[None, :, :]
        self.matrix = np.sqrt((diff * diff).sum(axis=-1))
        self.matrix.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def dist(self, p: int, q: int) -> float:
        diff = self.points[p] - self.points[q]
        return float(np.sqrt(diff @ diff))

    def distances_from(self, coord) -> np.ndarray:
        diff = self.points - np.asarray(coord, dtype=float)
        return np.sqrt((diff * diff).sum(axis=-1))


def pairwise_distance_set(inst) -> list[float]:
    """Sorted distinct pairwise distances, always including 0."""
    m = inst.metric.matrix
    iu = np.triu_indices(m.shape[0], k=1)
    vals = set(m[iu].tolist())
    vals.add(0.0)
    return sorted(vals)


def dist_point_to_ball(inst, p: int, ball) -> float:
    return max(0.0, inst.dist_to_center(p, ball.center) - ball.radius)
