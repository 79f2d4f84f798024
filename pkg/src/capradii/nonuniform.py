"""(15+eps)-approximation for non-uniform capacities in general metrics.

A trial grows a configuration (I1, I2, B1, B2):

* B1 holds enlarged stand-ins for optimal balls; each one's center has at least
  the capacity of the optimal center it replaces.
* B2 holds pairwise disjoint balls of the guessed radius, and it is reset
  whenever B1 gains an index.

Three step kinds drive it: cover an uncovered point, merge into a much larger
neighbour, or pick a far-apart replacement ball.  The final candidate extends
every B1 ball by ten times its radius guess and keeps B2 as is.  Max-flow then
decides whether that candidate admits an assignment.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .guess import Chooser, Pruned, TrialFailed
from .flow import find_assignment
from .model import SLACK, Ball, InfeasibleInstance, Solution, ext
from .profiles import RadiusProfile, enumerate_profiles_general, sample_profile_general
from .search import CandidateCheck, run_search

TIE_TOL = 1e-12


class ConfigurationError(AssertionError):
    pass


class _Geometry:
    """Cached point-set masks for balls centered at input points."""

    def __init__(self, inst):
        self.inst = inst
        self.n = inst.n
        self.rows = inst.rows
        self.full = (1 << inst.n) - 1
        self._masks: dict = {}

    def mask(self, center: int, radius: float) -> int:
        key = (center, radius)
        m = self._masks.get(key)
        if m is None:
            row, lim = self.rows[center], radius + SLACK
            m = 0
            for p in range(self.n):
                if row[p] <= lim:
                    m |= 1 << p
            self._masks[key] = m
        return m

    def ball_mask(self, ball: Ball) -> int:
        return self.mask(ball.center, ball.radius)


@dataclass
class Configuration:
    I1: dict = field(default_factory=dict)   # index -> Ball
    I2: dict = field(default_factory=dict)   # index -> Ball

    @property
    def used_centers(self) -> set:
        return {b.center for b in self.I1.values()} | {b.center for b in self.I2.values()}

    @property
    def assigned(self) -> set:
        return set(self.I1) | set(self.I2)

    def copy(self) -> "Configuration":
        return Configuration(dict(self.I1), dict(self.I2))

    def check(self, profile: RadiusProfile, geo: _Geometry | None = None) -> None:
        if set(self.I1) & set(self.I2):
            raise ConfigurationError("I1 and I2 overlap")
        centers = [b.center for b in self.I1.values()] + [b.center for b in self.I2.values()]
        if len(set(centers)) != len(centers):
            raise ConfigurationError("a center is used twice")
        for i, b in self.I1.items():
            if b.radius > 5 * profile[i] + SLACK:
                raise ConfigurationError(f"B1[{i}] radius {b.radius} exceeds 5 r_{i}")
        for i, b in self.I2.items():
            if abs(b.radius - profile[i]) > SLACK:
                raise ConfigurationError(f"B2[{i}] radius differs from r_{i}")
        if geo is not None:
            masks = [geo.ball_mask(b) for b in self.I2.values()]
            for a in range(len(masks)):
                for c in range(a + 1, len(masks)):
                    if masks[a] & masks[c]:
                        raise ConfigurationError("B2 balls intersect")


def _best_center(geo: _Geometry, inst, region: int, used: set) -> int:
    """Available center in ``region`` with the largest capacity (smallest id on ties)."""
    best, best_eta = -1, -1
    for c in range(geo.n):
        if region >> c & 1 and c not in used and inst.capacities[c] > best_eta:
            best, best_eta = c, inst.capacities[c]
    if best < 0:
        raise TrialFailed("no available center")
    return best


def _free_indices(k: int, taken) -> list[int]:
    return [i for i in range(k) if i not in taken]


def phase1_cover_step(inst, profile: RadiusProfile, cfg: Configuration, ch: Chooser,
                      geo: _Geometry | None = None) -> Configuration:
    """Cover the smallest uncovered point with a new B1 ball."""
    geo = geo or _Geometry(inst)
    if cfg.I2:
        raise ValueError("cover step expects an empty I2")
    covered = 0
    for b in cfg.I1.values():
        covered |= geo.ball_mask(b)
    if covered == geo.full:
        raise ValueError("B1 already covers every point")
    x = next(p for p in range(geo.n) if not covered >> p & 1)
    free = _free_indices(profile.k, cfg.I1)
    i = ch.pick(free, "cover:index")
    used = cfg.used_centers
    c = _best_center(geo, inst, geo.mask(x, profile[i]), used)
    out = cfg.copy()
    if ch.coin("cover:is-optimal-center"):
        j = ch.pick(free, "cover:center-index")
        out.I1[j] = Ball(c, profile[j])
    else:
        out.I1[i] = Ball(c, 3 * profile[i])
    return out


def phase2_merge_step(inst, profile: RadiusProfile, cfg: Configuration, ch: Chooser,
                      geo: _Geometry | None = None) -> Configuration:
    """Approximate an optimal ball at least five times larger than a touching B1 ball."""
    geo = geo or _Geometry(inst)
    if cfg.I2:
        raise ValueError("merge step expects an empty I2")
    i = ch.pick(sorted(cfg.I1), "merge:small")
    free = _free_indices(profile.k, cfg.I1)
    j = ch.pick(free, "merge:large")
    ri, rj = profile[i], profile[j]
    if rj < 5 * ri - SLACK:
        raise TrialFailed("merge needs r_j >= 5 r_i")
    reach = 5 * ri + rj
    x = _best_center(geo, inst, geo.mask(cfg.I1[i].center, reach), cfg.used_centers)
    out = cfg.copy()
    if ch.coin("merge:is-optimal-center"):
        j2 = ch.pick(free, "merge:center-index")
        out.I1[j2] = Ball(x, profile[j2])
    else:
        out.I1[j] = Ball(x, 2 * reach + rj)
    return out


def far_sequence(inst, profile: RadiusProfile, cfg: Configuration, i: int, region: int,
                 geo: _Geometry | None = None) -> list[int]:
    """Greedy centers in ``region``, pairwise >= 4 r_i apart, clear of B2.

    Each pick maximizes min(capacity, points of the region within r_i).
    """
    geo = geo or _Geometry(inst)
    ri = profile[i]
    used = cfg.used_centers
    b2 = [geo.ball_mask(b) for b in cfg.I2.values()]
    cands = []
    for c in range(geo.n):
        if not region >> c & 1 or c in used:
            continue
        m = geo.mask(c, ri)
        if any(m & o for o in b2):
            continue
        cands.append((c, min(inst.capacities[c], bin(m & region).count("1"))))
    seq: list[int] = []
    rows = geo.rows
    while len(seq) < profile.k + 1:
        best, best_s = -1, -1
        for c, s in cands:
            if s > best_s and all(rows[c][y] >= 4 * ri - SLACK for y in seq) and c not in seq:
                best, best_s = c, s
        if best < 0:
            break
        seq.append(best)
    return seq


def replacement_region(profile: RadiusProfile, cfg: Configuration, T, geo: _Geometry) -> int:
    """Points inside every ext(B1[j], 10 r_j), j in T, and outside the other B1 balls."""
    region = geo.full
    for j in T:
        b = cfg.I1[j]
        region &= geo.mask(b.center, b.radius + 10 * profile[j])
    for s, b in cfg.I1.items():
        if s not in T:
            region &= ~geo.ball_mask(b)
    return region & geo.full


def phase3_replace_step(inst, profile: RadiusProfile, cfg: Configuration, ch: Chooser,
                        geo: _Geometry | None = None) -> tuple[Configuration, bool]:
    """Either add an approximate ball to B1 (restart) or a replacement ball to B2."""
    geo = geo or _Geometry(inst)
    k = profile.k
    free = _free_indices(k, cfg.assigned)
    i = ch.pick(free, "replace:index")
    ones = sorted(cfg.I1)
    code = 1 + ch.choose((1 << len(ones)) - 1, "replace:touching-set")
    T = [j for b, j in enumerate(ones) if code >> b & 1]
    ri = profile[i]
    if any(ri > 5 * profile[j] + SLACK for j in T):
        raise TrialFailed("touching set violates r_i <= 5 r_j")
    region = replacement_region(profile, cfg, T, geo)
    if not region:
        raise TrialFailed("empty replacement region")
    seq = far_sequence(inst, profile, cfg, i, region, geo)
    if not seq:
        raise TrialFailed("no candidate replacement center")
    case = ch.choose(3, "replace:case")
    xs = ch.pick(seq, "replace:sequence-position")
    not_in_I1 = _free_indices(k, cfg.I1)
    out = Configuration(dict(cfg.I1), {})
    if case == 0:
        if ch.coin("replace:near-is-optimal-center"):
            j = ch.pick(not_in_I1, "replace:near-center-index")
            out.I1[j] = Ball(xs, profile[j])
        else:
            out.I1[i] = Ball(xs, 5 * ri)
        return out, True
    if case == 1:
        i2 = ch.pick(not_in_I1, "replace:big-index")
        rb = profile[i2]
        if rb < ri - SLACK:
            raise TrialFailed("big neighbour must have r >= r_i")
        used = {b.center for b in cfg.I1.values()}
        x = _best_center(geo, inst, geo.mask(xs, ri + rb), used)
        if ch.coin("replace:big-is-optimal-center"):
            j = ch.pick(not_in_I1, "replace:big-center-index")
            out.I1[j] = Ball(x, profile[j])
        else:
            out.I1[i2] = Ball(x, 2 * (ri + rb) + rb)
        return out, True
    out.I2 = dict(cfg.I2)
    out.I2[i] = Ball(xs, ri)
    return out, False


def final_balls(profile: RadiusProfile, cfg: Configuration) -> list[Ball]:
    balls = []
    for i in range(profile.k):
        if i in cfg.I1:
            balls.append(ext(cfg.I1[i], 10 * profile[i]))
        elif i in cfg.I2:
            balls.append(cfg.I2[i])
        else:
            raise ValueError(f"index {i} is in neither I1 nor I2")
    return balls


def assemble_and_check(inst, profile: RadiusProfile, cfg: Configuration, trace=()) -> Solution | None:
    balls = final_balls(profile, cfg)
    assignment = find_assignment(inst, balls)
    if assignment is None:
        return None
    return Solution.build(balls, assignment, trace)


def _lower_bound(profile: RadiusProfile, cfg: Configuration) -> float:
    lb = 0.0
    for i in range(profile.k):
        if i in cfg.I1:
            lb += cfg.I1[i].radius + 10 * profile[i]
        else:
            lb += profile[i]
    return lb


def run_trial(inst, profile: RadiusProfile, ch: Chooser, incumbent: float | None = None,
              geo: _Geometry | None = None, debug: bool = False):
    """One guess-driven pass; returns (configuration, balls) ready for the flow check."""
    geo = geo or _Geometry(inst)
    k = profile.k
    cfg = Configuration()
    steps = 0

    def bound_check():
        if debug:
            cfg.check(profile, geo)
        if incumbent is not None and _lower_bound(profile, cfg) >= incumbent - TIE_TOL:
            raise Pruned("cannot beat incumbent")

    while True:
        covered = 0
        for b in cfg.I1.values():
            covered |= geo.ball_mask(b)
        if covered == geo.full:
            break
        if len(cfg.I1) == k:
            raise TrialFailed("every index used but points remain uncovered")
        cfg = phase1_cover_step(inst, profile, cfg, ch, geo)
        steps += 1
        bound_check()
    while len(cfg.assigned) < k:
        if not cfg.I2 and ch.coin("step:merge"):
            cfg = phase2_merge_step(inst, profile, cfg, ch, geo)
        else:
            cfg, _ = phase3_replace_step(inst, profile, cfg, ch, geo)
        steps += 1
        if steps > k * k + k:
            raise AssertionError("step cap exceeded")
        bound_check()
    return cfg, final_balls(profile, cfg)


def solve_nonuniform(inst, epsilon: float, trials: int | None = None, rng=None, mode: str = "exh",
                     seed: int = 0, debug: bool = False) -> Solution:
    """Cheapest feasible candidate over radius profiles and guess sequences.

    ``mode="exh"`` enumerates every guess for every profile (``trials`` caps
    the enumeration); the profile grid is refined to epsilon/15 so the fully
    enumerated search stays within (15 + epsilon) of optimal.
    ``mode="rand"`` runs ``trials`` random trials.
    """
    if inst.kind != "general":
        raise ValueError("non-uniform solver works on general-metric instances")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if inst.trivially_infeasible:
        raise InfeasibleInstance("sum of the k largest capacities is below n")
    if inst.n == 0:
        return Solution([], [], 0.0)
    geo = _Geometry(inst)
    grid_eps = epsilon / 15

    def trial(profile, ch, incumbent, exhaustive):
        return run_trial(inst, profile, ch, incumbent, geo, debug)[1]

    return run_search(enumerate_profiles_general(inst, grid_eps),
                      lambda r: sample_profile_general(inst, grid_eps, r), trial,
                      CandidateCheck(inst), mode=mode, trials=trials, rng=rng, seed=seed)
