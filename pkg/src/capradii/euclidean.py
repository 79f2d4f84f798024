"""Euclidean algorithms: the (2+eps) coreset algorithm, the grid scheme with
(1+eps) guarantee for fixed dimension, and the (1+eps, 1+eps) bi-criteria one.

Centers are free coordinates.  A coreset S_i is a handful of points whose
minimum enclosing ball, grown by eps * r_i, is meant to stand in for the
optimal ball i.  Sets are kept as bitmasks over the input points.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .guess import Chooser, Pruned, RandomChooser, TrialFailed
from .meb import meb
from .model import SLACK, Ball, BudgetExhausted, InfeasibleInstance, Solution, ext
from .profiles import (RadiusProfile, enumerate_profiles_euclidean, sample_profile_euclidean,
                       unique_profiles)
from .search import EXHAUSTIVE, CandidateCheck, run_search
from .uniform import set_partitions

TIE_TOL = 1e-12


def coreset_cap(epsilon: float) -> int:
    return math.ceil(32 / epsilon ** 2)


def _bits(mask: int) -> list[int]:
    out, p = [], 0
    while mask:
        if mask & 1:
            out.append(p)
        mask >>= 1
        p += 1
    return out


class _Space:
    """Point coordinates plus caches for enclosing balls and cover masks."""

    def __init__(self, inst):
        if inst.kind != "euclidean":
            raise ValueError("Euclidean instance required")
        if inst.uniform_capacity is None:
            raise ValueError("uniform capacity required")
        self.inst = inst
        self.pts = inst.points
        self.n = inst.n
        self.full = inst.full_mask
        self._meb: dict[int, Ball] = {}
        self._mask: dict = {}

    def meb_of(self, mask: int) -> Ball:
        b = self._meb.get(mask)
        if b is None:
            b = self._meb[mask] = meb(self.pts[_bits(mask)])
        return b

    def mask(self, ball: Ball) -> int:
        key = (ball.center, ball.radius)
        m = self._mask.get(key)
        if m is None:
            m = self._mask[key] = self.inst.cover_mask(ball)
        return m

    def extended(self, mask: int, grow: float) -> Ball:
        return ext(self.meb_of(mask), grow)


@dataclass(frozen=True)
class CoreSet:
    members: tuple[int, ...]
    ball: Ball          # minimum enclosing ball of the members

    @property
    def size(self) -> int:
        return len(self.members)

    def extended(self, grow: float) -> Ball:
        return ext(self.ball, grow)


def grow_coreset_trial(inst, i: int, profile: RadiusProfile, epsilon: float, rng,
                       threshold: float | None = None, space: _Space | None = None) -> CoreSet:
    """One sampling run for index ``i``.

    Start from a uniform point, then keep adding a uniform point from outside
    the grown enclosing ball.  Growth stops when at most ``threshold`` points
    lie outside (default U/2k), on a guessed stop, or at the size cap.
    """
    space = space or _Space(inst)
    ch = rng if isinstance(rng, Chooser) else RandomChooser(rng)
    r = profile[i]
    if threshold is None:
        threshold = inst.U / (2 * inst.k)
    S = 1 << ch.choose(space.n, "coreset:start")
    for _ in range(coreset_cap(epsilon)):
        outside = _bits(space.full & ~space.mask(space.extended(S, epsilon * r)))
        if len(outside) <= threshold or ch.coin("coreset:stop"):
            break
        S |= 1 << ch.pick(outside, "coreset:next")
    members = tuple(_bits(S))
    return CoreSet(members, space.meb_of(S))


def reachable_coresets(space: _Space, radius: float, epsilon: float) -> list[int]:
    """Every set the growth process can produce whose enclosing ball fits ``radius``."""
    cap = coreset_cap(epsilon) + 1
    seen: set[int] = set()
    stack = [1 << p for p in range(space.n)]
    while stack:
        S = stack.pop()
        if S in seen:
            continue
        seen.add(S)
        if bin(S).count("1") >= cap:
            continue
        outside = space.full & ~space.mask(space.extended(S, epsilon * radius))
        for y in _bits(outside):
            T = S | 1 << y
            if T not in seen and space.meb_of(T).radius <= radius + SLACK:
                stack.append(T)
    return sorted(seen, key=lambda m: (bin(m).count("1"), m))


class _CoresetSource:
    """Random-mode coreset runs for one profile."""

    def __init__(self, space, profile, epsilon, threshold=None):
        self.space, self.profile, self.epsilon = space, profile, epsilon
        self.threshold = threshold

    def __call__(self, ch: Chooser, i: int) -> int:
        cs = grow_coreset_trial(self.space.inst, i, self.profile, self.epsilon, ch,
                                self.threshold, self.space)
        return sum(1 << p for p in cs.members)


def cover_trial(space: _Space, profile: RadiusProfile, epsilon: float, ch: Chooser,
                source: _CoresetSource) -> dict[int, int]:
    """Heavy coresets followed by greedy completion; returns index -> coreset mask.

    Completion takes the smallest uncovered point, guesses its cluster and
    adds the point to that cluster's set.  A set whose enclosing ball outgrows
    the guessed radius cannot lie inside the optimal ball, so the trial fails.
    """
    k = profile.k
    code = ch.choose(1 << k, "heavy")
    sets: dict[int, int] = {}
    for i in range(k):
        if code >> i & 1:
            sets[i] = source(ch, i)
            if space.meb_of(sets[i]).radius > profile[i] + SLACK:
                raise TrialFailed("coreset too wide")
    cap = coreset_cap(epsilon) + 1
    covered = 0
    for i, S in sets.items():
        covered |= space.mask(space.extended(S, epsilon * profile[i]))
    while covered != space.full:
        x = next(p for p in range(space.n) if not covered >> p & 1)
        i = ch.choose(k, "complete:index")
        S = sets.get(i, 0) | 1 << x
        if bin(S).count("1") > cap:
            raise TrialFailed("coreset cap reached")
        if space.meb_of(S).radius > profile[i] + SLACK:
            raise TrialFailed("completion overgrows a coreset")
        sets[i] = S
        covered |= space.mask(space.extended(S, epsilon * profile[i]))
    return sets


def configuration_trial(space: _Space, profile: RadiusProfile, ch: Chooser, lists: dict,
                        grow: float, budget: float = math.inf) -> dict[int, int]:
    """Pick one reachable coreset (or none) per index; exhaustive counterpart of ``cover_trial``.

    Guessing every index with a set as heavy and growing it to its final
    state reaches any such tuple, so enumerating tuples covers every outcome
    of the sampling process without revisiting the same sets.  Sets of a
    correct trace hold points of distinct clusters, hence disjointness.
    Sets whose grown balls alone already cost ``budget`` are skipped.
    """
    sets: dict[int, int] = {}
    used = covered = 0
    spent = 0.0
    k = profile.k
    for i in range(k):
        room = budget - spent - TIE_TOL
        opts = [(S, m, c) for S, m, c in lists[profile[i]] if not S & used and c < room]
        if i == k - 1:
            need = space.full & ~covered
            opts = [o for o in opts if o[1] & need == need]
        S, m, c = ch.pick(opts, "coreset")
        if S:
            sets[i] = S
            used |= S
            covered |= m
            spent += c
    return sets


def _exhaustive_lists(space: _Space, profile: RadiusProfile, epsilon: float, cache: dict) -> dict:
    """Per radius: (coreset, grown-ball mask, grown radius), the empty set first."""
    U = space.inst.U
    out = {}
    for r in set(profile.radii):
        if r not in cache:
            grown = [(S, space.extended(S, epsilon * r)) for S in reachable_coresets(space, r, epsilon)
                     if bin(S).count("1") <= U]
            cache[r] = [(0, 0, 0.0)] + [(S, space.mask(b), b.radius) for S, b in grown]
        out[r] = cache[r]
    return out


def seeded_upper_bound(inst, max_seeds: int = 5000) -> float:
    """Cost of a valid solution from capacitated nearest-seed clustering.

    Tries k-subsets of input points as seeds, fills seeds greedily by distance
    and encloses each cluster.  Only used to bound which profiles are worth
    searching; never returned.
    """
    n, k, U = inst.n, inst.k, inst.U
    pts, D = inst.points, inst.matrix
    best = math.inf
    for t, seeds in enumerate(itertools.combinations(range(n), min(k, n))):
        if t >= max_seeds:
            break
        pairs = sorted((D[p][s], p, j) for p in range(n) for j, s in enumerate(seeds))
        load = [0] * len(seeds)
        label = [-1] * n
        for _, p, j in pairs:
            if label[p] < 0 and load[j] < U:
                label[p] = j
                load[j] += 1
        if min(label) < 0:
            continue
        cost = sum(meb(pts[[p for p in range(n) if label[p] == j]]).radius
                   for j in range(len(seeds)) if load[j])
        best = min(best, cost)
    return best


def _balls_intersect(a: Ball, b: Ball) -> bool:
    gap = float(np.linalg.norm(np.asarray(a.center) - np.asarray(b.center)))
    return gap <= a.radius + b.radius + SLACK


def _connected(nodes, adjacent) -> bool:
    nodes = list(nodes)
    if len(nodes) <= 1:
        return True
    seen, stack = {nodes[0]}, [nodes[0]]
    while stack:
        u = stack.pop()
        for v in nodes:
            if v not in seen and adjacent(u, v):
                seen.add(v)
                stack.append(v)
    return len(seen) == len(nodes)


@dataclass
class ComponentGraph:
    """Guessed components over [k] and the ext balls of the indices that have coresets."""
    k: int
    ext_balls: dict           # index in I -> ext(MEB(S_i), eps r_i)
    components: tuple         # partition of range(k)

    def adjacent(self, i: int, j: int) -> bool:
        if i in self.ext_balls and j in self.ext_balls:
            return _balls_intersect(self.ext_balls[i], self.ext_balls[j])
        return False

    def consistent(self) -> bool:
        """Guessed components never split two intersecting ext balls; all-known ones are connected."""
        where = {i: c for c, comp in enumerate(self.components) for i in comp}
        idx = sorted(self.ext_balls)
        for a in idx:
            for b in idx:
                if a < b and where[a] != where[b] and self.adjacent(a, b):
                    return False
        for comp in self.components:
            if all(i in self.ext_balls for i in comp) and not _connected(comp, self.adjacent):
                return False
        return True

    def first_kind(self) -> list[tuple]:
        """Components containing an index without a coreset."""
        return [c for c in self.components if any(i not in self.ext_balls for i in c)]

    def second_kind(self) -> list[tuple]:
        return [c for c in self.components if all(i in self.ext_balls for i in c)]


def _partitions(k: int) -> list[tuple]:
    return [tuple(sorted(tuple(sorted(b)) for b in p)) for p in set_partitions(range(k))]


def component_ball(space: _Space, members_mask: int) -> Ball:
    """Smallest ball around the points covered by a component's ext balls."""
    return space.meb_of(members_mask)


def _assemble_two_approx(space: _Space, profile, epsilon, sets: dict, components) -> list[Ball] | None:
    graph = ComponentGraph(profile.k, {i: space.extended(S, epsilon * profile[i])
                                       for i, S in sets.items()}, components)
    if not graph.consistent():
        return None
    balls = []
    for comp in graph.first_kind():
        known = [i for i in comp if i in sets]
        pts = 0
        for i in known:
            balls.append(graph.ext_balls[i])
            pts |= space.mask(graph.ext_balls[i])
        if pts:
            cover = component_ball(space, pts)
            if cover.radius > (1 + epsilon) * sum(profile[i] for i in comp) + SLACK:
                return None
            balls.append(cover)
    for comp in graph.second_kind():
        for i in comp:
            first = _bits(sets[i])[0]
            balls.append(Ball(tuple(space.pts[first].tolist()), 2 * profile[i]))
    if not balls or len(balls) > profile.k:
        return None
    return balls


def _check_eps(epsilon: float) -> None:
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")


def _prepare(inst):
    if inst.kind != "euclidean":
        raise ValueError("Euclidean instance required")
    if inst.trivially_infeasible:
        raise InfeasibleInstance("n exceeds k * U")


def two_approx_parameters(epsilon: float) -> tuple[float, float]:
    """(coreset eps, profile eps) keeping the end-to-end factor within 2 + 2 eps.

    Coresets with eps_c give 2 + 2 eps_c times the profile total; the profile
    grid overshoots the optimum by at most a factor 1 + 2 eps_g.
    """
    eps_c = epsilon / 4
    eps_g = ((2 + 2 * epsilon) / (2 + 2 * eps_c) - 1) / 2
    return eps_c, eps_g * (1 - 1e-9)


def _profiles_by_total(inst, eps_g):
    return sorted(unique_profiles(enumerate_profiles_euclidean(inst, eps_g)), key=lambda p: p.total)


def separation_lower_bound(inst) -> float:
    """Half the largest minimum pairwise distance among k+1 points (two must share a ball)."""
    if inst.n <= inst.k:
        return 0.0
    D = inst.rows
    return max(min(D[a][b] for a, b in itertools.combinations(Q, 2))
               for Q in itertools.combinations(range(inst.n), inst.k + 1)) / 2


def _profile_window(inst, profiles):
    """Profiles that may match an optimum, skipping those provably below OPT.

    A matching profile dominates the optimal radii, so its total is at least
    OPT and P is covered by k balls of radius 2 r_1 around uncovered points.
    """
    lo = separation_lower_bound(inst) - SLACK
    for p in profiles:
        if p.total < lo or greedy_cover(inst, 2 * p[0], inst.k) is None:
            continue
        yield p


def _exhaustive_profiles(inst, eps_g):
    return _profile_window(inst, _profiles_by_total(inst, eps_g))


def _window_stop(inst, cutoff: float, mode: str):
    """Stop once the profile total passes cutoff * (best known upper bound on OPT)."""
    bound = seeded_upper_bound(inst) if mode in EXHAUSTIVE else math.inf

    def stop(profile, best):
        limit = bound if best is None else min(bound, best)
        return profile.total > cutoff * limit
    return stop


def solve_euclid_2approx(inst, epsilon: float, trials: int | None = None, rng=None,
                         mode: str = "exh", seed: int = 0) -> Solution:
    """Cheapest verified coreset-based solution; within (2 + 2 eps) of optimal in exhaustive mode."""
    _check_eps(epsilon)
    _prepare(inst)
    if inst.n == 0:
        return Solution([], [], 0.0)
    space = _Space(inst)
    eps_c, eps_g = two_approx_parameters(epsilon)
    parts = _partitions(inst.k)
    reach: dict = {}

    def trial(profile, ch, incumbent, exhaustive):
        if exhaustive:
            sets = configuration_trial(space, profile, ch,
                                       _exhaustive_lists(space, profile, eps_c, reach), eps_c,
                                       math.inf if incumbent is None else incumbent)
        else:
            sets = cover_trial(space, profile, eps_c, ch, _CoresetSource(space, profile, eps_c))
        bound = sum(space.meb_of(S).radius + eps_c * profile[i] for i, S in sets.items())
        if incumbent is not None and bound >= incumbent - TIE_TOL:
            raise Pruned("coresets already too expensive")
        comps = ch.pick(parts, "components")
        balls = _assemble_two_approx(space, profile, eps_c, sets, comps)
        if balls is None:
            raise TrialFailed("inconsistent component guess")
        return balls

    return run_search(_exhaustive_profiles(inst, eps_g),
                      lambda r: sample_profile_euclidean(inst, eps_g, r), trial,
                      CandidateCheck(inst), mode=mode, trials=trials, rng=rng, seed=seed,
                      stop=_window_stop(inst, 1 + 2 * eps_g, mode))


def bicriteria_parameters(epsilon: float) -> tuple[float, float]:
    """(coreset eps, profile eps) with (1 + eps_c)(1 + 2 eps_g) <= 1 + 2 eps."""
    eps_c = epsilon / 2
    eps_g = ((1 + 2 * epsilon) / (1 + eps_c) - 1) / 2
    return eps_c, eps_g * (1 - 1e-9)


def solve_euclid_bicriteria(inst, epsilon: float, trials: int | None = None, rng=None,
                            mode: str = "exh", seed: int = 0) -> Solution:
    """All grown coreset balls, loads up to floor((1+eps)U)."""
    _check_eps(epsilon)
    _prepare(inst)
    if inst.n == 0:
        return Solution([], [], 0.0)
    space = _Space(inst)
    eps_c, eps_g = bicriteria_parameters(epsilon)
    scale = 1 + epsilon
    threshold = epsilon * inst.U / (2 * inst.k)
    reach: dict = {}

    def trial(profile, ch, incumbent, exhaustive):
        if exhaustive:
            sets = configuration_trial(space, profile, ch,
                                       _exhaustive_lists(space, profile, eps_c, reach), eps_c,
                                       math.inf if incumbent is None else incumbent)
        else:
            sets = cover_trial(space, profile, eps_c, ch,
                               _CoresetSource(space, profile, eps_c, threshold))
        balls = [space.extended(S, eps_c * profile[i]) for i, S in sorted(sets.items())]
        if incumbent is not None and sum(b.radius for b in balls) >= incumbent - TIE_TOL:
            raise Pruned("too expensive")
        return balls

    return run_search(_exhaustive_profiles(inst, eps_g),
                      lambda r: sample_profile_euclidean(inst, eps_g, r), trial,
                      CandidateCheck(inst, scale), mode=mode, trials=trials, rng=rng, seed=seed,
                      stop=_window_stop(inst, 1 + 2 * eps_g, mode), capacity_scale=scale)


# ---------------------------------------------------------------- grid scheme

def greedy_cover(inst, radius: float, limit: int) -> list[Ball] | None:
    """Balls of ``radius`` at the smallest uncovered point until all is covered; None past ``limit``."""
    covered, balls = 0, []
    while covered != inst.full_mask:
        if len(balls) >= limit:
            return None
        x = next(p for p in range(inst.n) if not covered >> p & 1)
        ball = Ball(x, radius)
        balls.append(ball)
        covered |= inst.cover_mask(ball)
    return balls


def cover_components(inst, cover: list[Ball], top: float) -> list[int]:
    """Masks of points grouped by chains of cover balls whose gap is at most 2 * top."""
    k = len(cover)
    pts = inst.points
    centers = [pts[b.center] for b in cover]
    link = lambda a, b: float(np.linalg.norm(centers[a] - centers[b])) <= 6 * top + SLACK
    label = list(range(k))
    for a in range(k):
        for b in range(a + 1, k):
            if link(a, b):
                old, new = label[b], label[a]
                label = [new if x == old else x for x in label]
    groups: dict[int, int] = {}
    seen = 0
    for b, ball in enumerate(cover):
        m = inst.cover_mask(ball) & ~seen
        seen |= m
        groups[label[b]] = groups.get(label[b], 0) | m
    return [groups[g] for g in sorted(groups)]


def grid_spacing(top: float, epsilon: float, k: int, d: int) -> float:
    return 2 * epsilon * top / (k * math.sqrt(d))


def grid_points(center, reach: float, top: float, epsilon: float, k: int) -> np.ndarray:
    """Grid of spacing 2 eps top / (k sqrt d) over the ball of radius ``reach``.

    Every point of that ball is within eps * top / k of a returned grid point.
    """
    c = np.asarray(center, dtype=float)
    d = c.shape[0]
    h = grid_spacing(top, epsilon, k, d)
    M = math.ceil(reach / h)
    axis = np.arange(-M, M + 1) * h
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d) + c
    keep = np.linalg.norm(mesh - c, axis=1) <= reach + epsilon * top / k + 1e-12
    return mesh[keep]


def grid_size_bound(reach: float, top: float, epsilon: float, k: int, d: int) -> int:
    h = grid_spacing(top, epsilon, k, d)
    return (2 * math.ceil(reach / h) + 1) ** d


def _maximal(masks_with_rep: dict) -> list[tuple[int, int]]:
    """Drop masks contained in another one; keeps (mask, representative) pairs."""
    ms = sorted(masks_with_rep, key=lambda m: -bin(m).count("1"))
    out = []
    for m in ms:
        if m and not any(m & o == m for o, _ in out):
            out.append((m, masks_with_rep[m]))
    return out


class _Grid:
    """Candidate centers and their distances to the input for one top radius."""

    def __init__(self, inst, top: float, epsilon: float, max_points: int):
        self.inst = inst
        k, pts = inst.k, inst.points
        if top == 0.0:
            self.centers = np.unique(pts, axis=0)
        else:
            cover = greedy_cover(inst, 2 * top, k)
            if cover is None:
                self.centers = None
                return
            chunks = []
            for comp in cover_components(inst, cover, top):
                R = meb(pts[_bits(comp)])
                size = grid_size_bound(R.radius + top, top, epsilon, k, inst.d)
                if size > max_points:
                    raise BudgetExhausted(f"grid of {size} points exceeds max_points={max_points}")
                chunks.append(grid_points(R.center, R.radius + top, top, epsilon, k))
            self.centers = np.unique(np.concatenate(chunks), axis=0)
        self.dist = np.linalg.norm(self.centers[:, None, :] - pts[None, :, :], axis=2)
        self._cands: dict[float, list] = {}

    def candidates(self, radius: float) -> list[tuple[int, int]]:
        c = self._cands.get(radius)
        if c is None:
            inside = self.dist <= radius + SLACK
            masks: dict[int, int] = {}
            for g, row in enumerate(inside):
                m = 0
                for p in np.flatnonzero(row).tolist():
                    m |= 1 << p
                masks.setdefault(m, g)
            c = self._cands[radius] = _maximal(masks)
        return c


def ptas_parameters(epsilon: float, k: int) -> tuple[float, float]:
    """(grid eps, profile eps) with 2 eps_g (1 + eps_p / k) + eps_p <= eps."""
    eps_p = epsilon / 2
    eps_g = (epsilon - eps_p) / (2 * (1 + eps_p / k))
    return eps_p, eps_g * (1 - 1e-9)


def solve_euclid_ptas(inst, epsilon: float, tighten: bool = False,
                      max_points: int = 2_000_000) -> Solution:
    """Deterministic grid search; the cheapest feasible profile is returned.

    The grid grows like (k sqrt(d) / eps)^d, so a component whose grid would
    exceed ``max_points`` candidate centers raises BudgetExhausted.

    Each guessed center is snapped to a grid fine enough that growing every
    radius by eps * r_1 / k keeps the optimal ball inside.  The candidate
    cost of a profile is sum(r) + eps * r_1, so profiles are tried in that
    order and the first feasible one is the answer.
    """
    _check_eps(epsilon)
    _prepare(inst)
    if inst.n == 0:
        return Solution([], [], 0.0)
    k = inst.k
    eps_p, eps_g = ptas_parameters(epsilon, k)
    profiles = list(unique_profiles(enumerate_profiles_euclidean(inst, eps_g)))
    slack = lambda prof: eps_p * prof[0] / k
    profiles.sort(key=lambda p: (p.total + k * slack(p), p.radii))
    grids: dict[float, _Grid] = {}
    verdict: dict = {}
    feasible = CandidateCheck(inst)
    for prof in profiles:
        top = prof[0]
        if top not in grids:
            grids[top] = _Grid(inst, top, eps_p, max_points)
        grid = grids[top]
        if grid.centers is None:
            continue
        radii = [prof[i] + slack(prof) for i in range(k)]
        cands = [grid.candidates(r) for r in radii]
        found = _pick_centers(inst, grid, radii, cands, feasible, verdict)
        if found is None:
            continue
        balls, assignment = found
        sol = Solution.build(balls, assignment, profile=prof.radii)
        return tighten_radii(inst, sol) if tighten else sol
    raise InfeasibleInstance("no profile admits a feasible grid placement")


def _pick_centers(inst, grid, radii, cands, feasible, verdict):
    k, full = len(radii), inst.full_mask
    chosen: list[tuple[int, int]] = []

    def rec(i, covered):
        if i == k:
            if covered != full:
                return None
            key = tuple(sorted(m for m, _ in chosen))
            if verdict.get(key) is False:
                return None
            balls = [Ball(tuple(grid.centers[g].tolist()), radii[j]) for j, (_, g) in enumerate(chosen)]
            assignment = feasible(balls)
            verdict[key] = assignment is not None
            return None if assignment is None else (balls, assignment)
        for m, g in cands[i]:
            chosen.append((m, g))
            res = rec(i + 1, covered | m)
            chosen.pop()
            if res is not None:
                return res
        return None

    return rec(0, 0)


def tighten_radii(inst, sol: Solution) -> Solution:
    """Shrink every ball to its farthest assigned point (unused balls are dropped)."""
    far = [0.0] * len(sol.balls)
    used = [False] * len(sol.balls)
    for p, b in enumerate(sol.assignment):
        used[b] = True
        far[b] = max(far[b], inst.dist_to_center(p, sol.balls[b].center))
    keep = [b for b in range(len(sol.balls)) if used[b]]
    index = {b: j for j, b in enumerate(keep)}
    balls = [Ball(sol.balls[b].center, min(sol.balls[b].radius, far[b])) for b in keep]
    return Solution.build(balls, [index[b] for b in sol.assignment], sol.trace, **sol.meta)
