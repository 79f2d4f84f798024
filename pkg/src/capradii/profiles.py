"""Radius profiles: guessed non-increasing upper bounds on the optimal radii.

General metrics take the largest radius from the pairwise distances and
grid the rest below it; Euclidean inputs grid every radius relative to a
pair distance, because optimal radii there are not distances themselves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .metric import pairwise_distance_set


@dataclass(frozen=True)
class RadiusProfile:
    radii: tuple[float, ...]
    granularity: float

    def __post_init__(self):
        r = self.radii
        if any(x < 0 for x in r) or any(r[i] < r[i + 1] for i in range(len(r) - 1)):
            raise ValueError(f"profile must be non-negative and non-increasing: {r}")

    @property
    def k(self) -> int:
        return len(self.radii)

    @property
    def total(self) -> float:
        return math.fsum(self.radii)

    def __getitem__(self, i: int) -> float:
        return self.radii[i]


def _check_eps(epsilon: float) -> None:
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")


def _non_increasing(top: int, length: int) -> Iterator[tuple[int, ...]]:
    """All non-increasing tuples over 0..top, lexicographically ascending."""
    if length == 0:
        yield ()
        return

    def rec(prefix, bound, left):
        if left == 0:
            yield tuple(prefix)
            return
        for j in range(0, bound + 1):
            prefix.append(j)
            yield from rec(prefix, j, left - 1)
            prefix.pop()

    yield from rec([], top, length)


def general_grid_top(k: int, epsilon: float) -> int:
    return math.ceil(k / epsilon - 1e-12)


def enumerate_profiles_general(inst, epsilon: float) -> Iterator[RadiusProfile]:
    """Largest radius = a pairwise distance D (descending); the rest on the grid j*eps*D/k."""
    _check_eps(epsilon)
    k = inst.k
    top = general_grid_top(k, epsilon)
    # grid points that do not exceed D
    usable = max(j for j in range(top + 1) if j * epsilon <= k + 1e-12)
    for D in reversed(pairwise_distance_set(inst)):
        step = epsilon * D / k
        if D == 0.0:
            yield RadiusProfile((0.0,) * k, 0.0)
            continue
        for js in _non_increasing(usable, k - 1):
            yield RadiusProfile((D,) + tuple(min(D, j * step) for j in js), step)


def count_profiles_general(inst, epsilon: float) -> int:
    return sum(1 for _ in enumerate_profiles_general(inst, epsilon))


def sample_profile_general(inst, epsilon: float, rng) -> RadiusProfile:
    """Uniform D, then independent uniform grid values sorted non-increasingly."""
    _check_eps(epsilon)
    k = inst.k
    dists = pairwise_distance_set(inst)
    D = dists[int(rng.integers(len(dists)))]
    if D == 0.0:
        return RadiusProfile((0.0,) * k, 0.0)
    usable = max(j for j in range(general_grid_top(k, epsilon) + 1) if j * epsilon <= k + 1e-12)
    step = epsilon * D / k
    js = sorted((int(rng.integers(usable + 1)) for _ in range(k - 1)), reverse=True)
    return RadiusProfile((D,) + tuple(min(D, j * step) for j in js), step)


def euclidean_grid_top(k: int, epsilon: float) -> int:
    return math.ceil(2 * k / epsilon - 1e-12)


def enumerate_profiles_euclidean(inst, epsilon: float) -> Iterator[RadiusProfile]:
    """Every radius on the grid j*eps*d(x,y)/k, j <= ceil(2k/eps), per pair distance.

    Ordered pairs with equal distance produce identical grids, so each
    distinct distance is visited once (descending).
    """
    _check_eps(epsilon)
    k = inst.k
    top = euclidean_grid_top(k, epsilon)
    for dxy in reversed(pairwise_distance_set(inst)):
        if dxy == 0.0:
            yield RadiusProfile((0.0,) * k, 0.0)
            continue
        step = epsilon * dxy / k
        for js in _non_increasing(top, k):
            yield RadiusProfile(tuple(reversed(sorted(j * step for j in js))), step)


def sample_profile_euclidean(inst, epsilon: float, rng) -> RadiusProfile:
    _check_eps(epsilon)
    k = inst.k
    dists = pairwise_distance_set(inst)
    dxy = dists[int(rng.integers(len(dists)))]
    if dxy == 0.0:
        return RadiusProfile((0.0,) * k, 0.0)
    top = euclidean_grid_top(k, epsilon)
    step = epsilon * dxy / k
    js = sorted((int(rng.integers(top + 1)) for _ in range(k)), reverse=True)
    return RadiusProfile(tuple(j * step for j in js), step)


def unique_profiles(stream) -> Iterator[RadiusProfile]:
    seen = set()
    for prof in stream:
        if prof.radii not in seen:
            seen.add(prof.radii)
            yield prof
