"""Minimum enclosing balls: exact for small dimension, approximate for any d."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .model import Ball

_INSIDE_RTOL = 1e-10


def _circumball(support: np.ndarray):
    """Smallest ball with all support points on its boundary (center in their affine hull)."""
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    A = support[1:] - p0
    gram = 2.0 * A @ A.T
    rhs = (A * A).sum(axis=1)
    lam, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    c = p0 + lam @ A
    r = float(np.max(np.linalg.norm(support - c, axis=1)))
    return c, r


def _inside(p, c, r) -> bool:
    return float(np.linalg.norm(p - c)) <= r + _INSIDE_RTOL * max(1.0, r)


def _welzl(pts: np.ndarray, d: int):
    # iterative move-to-front variant driven by an explicit recursion on support size
    def mtf(n_pts: int, support: list):
        if support:
            c, r = _circumball(np.array(support))
        else:
            c, r = pts[0].copy(), -1.0
        if len(support) == d + 1:
            return c, r
        for i in range(n_pts):
            p = pts[i]
            if r < 0 or not _inside(p, c, r):
                c, r = mtf(i, support + [p])
        return c, max(r, 0.0)

    return mtf(len(pts), [])


def _brute_force(pts: np.ndarray, d: int):
    best = None
    for size in range(1, d + 2):
        for idx in itertools.combinations(range(len(pts)), size):
            c, r = _circumball(pts[list(idx)])
            if best is not None and r >= best[1]:
                continue
            if all(_inside(p, c, r) for p in pts):
                best = (c, r)
    return best


def meb_exact_small_d(points, seed: int = 0) -> Ball:
    """Exact minimum enclosing ball for dimension at most 4."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("empty point set")
    d = pts.shape[1]
    if d > 4:
        raise ValueError("exact MEB supports d <= 4")
    pts = np.unique(pts, axis=0)
    rng = np.random.default_rng(seed)
    pts = pts[rng.permutation(len(pts))]
    c, r = _welzl(pts, d)
    if not all(_inside(p, c, r) for p in pts):
        c, r = _brute_force(pts, d)
    # report the radius actually needed by the returned center
    r = float(np.max(np.linalg.norm(pts - c, axis=1)))
    return Ball(tuple(c.tolist()), r)


def meb_approx(points, epsilon: float) -> Ball:
    """(1+epsilon)-approximate MEB by farthest-point center averaging.

    Runs ceil(1/epsilon^2) updates; the returned radius is the exact distance
    from the final center to the farthest point, so every point is enclosed.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("empty point set")
    c = pts[0].copy()
    for t in range(1, math.ceil(1.0 / epsilon ** 2) + 1):
        far = pts[int(np.argmax(np.linalg.norm(pts - c, axis=1)))]
        c = c + (far - c) / (t + 1)
    r = float(np.max(np.linalg.norm(pts - c, axis=1)))
    return Ball(tuple(c.tolist()), r)


def meb(points, epsilon: float = 0.05) -> Ball:
    """Exact MEB when the dimension allows it, otherwise the approximation."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] <= 4:
        return meb_exact_small_d(pts)
    return meb_approx(pts, epsilon)


def cover_two_balls(b1: Ball, b2: Ball) -> Ball:
    """A ball of radius r1 + r2 containing two intersecting balls."""
    c1 = np.asarray(b1.center, dtype=float)
    c2 = np.asarray(b2.center, dtype=float)
    r1, r2 = b1.radius, b2.radius
    gap = float(np.linalg.norm(c2 - c1))
    if gap > r1 + r2 + 1e-9:
        raise ValueError("balls do not intersect")
    if gap == 0.0:
        return Ball(tuple(c1.tolist()), r1 + r2)
    # any center on the segment at offset t in [gap - r1, r2] works; take the middle
    lo, hi = max(0.0, gap - r1), min(gap, r2)
    t = 0.5 * (lo + hi) if lo <= hi else min(max(gap - r1, 0.0), gap)
    c = c1 + (c2 - c1) * (t / gap)
    return Ball(tuple(c.tolist()), r1 + r2)


def ball_contains_ball(outer: Ball, inner: Ball, tol: float = 1e-9) -> bool:
    gap = float(np.linalg.norm(np.asarray(outer.center, float) - np.asarray(inner.center, float)))
    return gap + inner.radius <= outer.radius + tol
