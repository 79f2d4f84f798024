"""Uniform capacities in general metrics: the (4+eps) algorithm and the
(2+eps, 1+eps) bi-criteria variant.

Heavy optimal clusters (many assigned points) are hit by uniform sampling and
approximated by balls of twice the guessed radius.  Light clusters that touch a
heavy one are swallowed by a component ball of radius 2 * (sum of the
component's radii).  The remaining light clusters are covered greedily.

A few guessed extensions then make room for light clusters that no ball
approximates.  The L4 balls use profile radii in place of the unknown optimal
ones, which can only make them larger.

Centers must be distinct input points, but a component ball or an L4 ball
sits on the sample of a heavy cluster.  When that happens, the heavy
cluster's own ball moves to a second guessed point; guessing the sample
itself means the heavy ball is dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .flow import find_assignment
from .guess import Chooser, Pruned, RandomChooser, TrialFailed
from .model import Ball, InfeasibleInstance, Solution, ext
from .profiles import RadiusProfile, enumerate_profiles_general, sample_profile_general
from .search import CandidateCheck, run_search

TIE_TOL = 1e-12


def set_partitions(items):
    """All partitions of ``items`` (restricted-growth order)."""
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield ((first,),) + part
        for b in range(len(part)):
            yield part[:b] + ((first,) + part[b],) + part[b + 1:]


def _canonical(partition) -> tuple:
    return tuple(sorted(tuple(sorted(block)) for block in partition))


@dataclass(frozen=True)
class PartitionGuess:
    heavy: frozenset
    components: tuple   # tuple of sorted index tuples

    def __post_init__(self):
        flat = sorted(i for c in self.components for i in c)
        if len(flat) != len(set(flat)):
            raise ValueError("components overlap")
        if not set(self.heavy) <= set(flat):
            raise ValueError("heavy indices must belong to a component")

    @property
    def mixed(self) -> list[tuple]:
        return [c for c in self.components if any(i in self.heavy for i in c)
                and any(i not in self.heavy for i in c)]

    @property
    def heavy_only(self) -> list[tuple]:
        return [c for c in self.components if all(i in self.heavy for i in c)]

    @property
    def light_only(self) -> list[tuple]:
        return [c for c in self.components if not any(i in self.heavy for i in c)]

    def component_of(self, i: int) -> tuple:
        return next(c for c in self.components if i in c)


def all_partition_guesses(k: int):
    parts = [_canonical(p) for p in set_partitions(range(k))]
    for code in range(1 << k):
        heavy = frozenset(i for i in range(k) if code >> i & 1)
        for comps in parts:
            yield PartitionGuess(heavy, comps)


def component_radius(profile: RadiusProfile, comp) -> float:
    return sum(profile[i] for i in comp)


@dataclass
class ListBundle:
    L1: dict = field(default_factory=dict)      # heavy index -> Ball
    L2: dict = field(default_factory=dict)      # component -> Ball
    L3: list = field(default_factory=list)      # (associated index, Ball)
    L4: dict = field(default_factory=dict)      # heavy index -> Ball
    extended: dict = field(default_factory=dict)  # position in L2+L3 -> extension amount

    def covered_mask(self, inst) -> int:
        m = 0
        for b in list(self.L1.values()) + list(self.L2.values()) + [b for _, b in self.L3]:
            m |= inst.cover_mask(b)
        return m


def _as_chooser(src) -> Chooser:
    if isinstance(src, Chooser):
        return src
    return RandomChooser(src)


def sample_heavy_hit(inst, rng) -> int:
    """A uniformly random point; it lands in any cluster of >= U/k points w.p. >= 1/k^2."""
    if inst.n == 0:
        raise ValueError("empty instance")
    if isinstance(rng, Chooser):
        return rng.choose(inst.n, "sample")
    return int(rng.integers(inst.n))


def build_L1_L2(inst, profile: RadiusProfile, guess: PartitionGuess, rng) -> tuple[dict, dict]:
    """One sampled point per heavy index; component balls on the least heavy index's sample."""
    ch = _as_chooser(rng)
    L1, samples = {}, {}
    for i in sorted(guess.heavy):
        x = sample_heavy_hit(inst, ch)
        samples[i] = x
        L1[i] = Ball(x, 2 * profile[i])
    L2 = {}
    for comp in guess.mixed:
        lead = min(i for i in comp if i in guess.heavy)
        L2[comp] = Ball(samples[lead], 2 * component_radius(profile, comp))
    return L1, L2


def build_L3(inst, profile: RadiusProfile, L1: dict, L2: dict, rng,
             indices=None, budget: int | None = None) -> list:
    """Greedy cover of what L1 and L2 miss, each ball tied to a guessed index."""
    ch = _as_chooser(rng)
    indices = list(range(profile.k)) if indices is None else list(indices)
    budget = profile.k if budget is None else budget
    covered = 0
    for b in list(L1.values()) + list(L2.values()):
        covered |= inst.cover_mask(b)
    full = inst.full_mask
    L3, used = [], set()
    while covered != full:
        if len(L3) >= budget:
            raise TrialFailed("greedy cover needs too many balls")
        x = next(p for p in range(inst.n) if not covered >> p & 1)
        free = [i for i in indices if i not in used]
        i = ch.pick(free, "L3:index")
        used.add(i)
        ball = Ball(x, 2 * profile[i])
        L3.append((i, ball))
        covered |= inst.cover_mask(ball)
    return L3


def _assembled_balls(inst, profile: RadiusProfile, bundle: ListBundle, extension,
                     relocation) -> list[Ball] | None:
    grow: dict[int, float] = {}
    assoc: dict[int, list[int]] = {}
    for t, choice in extension.items():
        if choice is None:
            continue
        kind, where = choice
        if kind == "ext":
            grow[where] = max(grow.get(where, 0.0), 2 * profile[t])
        else:
            assoc.setdefault(where, []).append(t)
    L23 = list(bundle.L2.values()) + [b for _, b in bundle.L3]
    balls = [ext(b, grow.get(pos, 0.0)) for pos, b in enumerate(L23)]
    bundle.L4 = {}
    for j, ts in sorted(assoc.items()):
        x = bundle.L1[j].center
        bundle.L4[j] = Ball(x, 2 * (profile[j] + sum(profile[t] for t in ts)))
        balls.append(bundle.L4[j])
    hosts = {b.center for b in list(bundle.L2.values()) + list(bundle.L4.values())}
    for i, b in sorted(bundle.L1.items()):
        if b.center in hosts:
            if relocation is None:
                continue            # cost bound only: treat as dropped
            y = relocation.get(i)
            if y is None:
                return None
            if y != b.center:
                balls.append(Ball(y, b.radius))
        else:
            balls.append(b)
    if not balls or len(balls) > inst.k:
        return None
    if len({b.center for b in balls}) != len(balls):
        return None
    return balls


def assemble_uniform(inst, profile: RadiusProfile, guess: PartitionGuess, bundle: ListBundle,
                     extension, relocation=None) -> Solution | None:
    """Apply extension guesses, build L4, relocate clashing heavy balls, run the flow.

    ``extension`` maps an untouched light index to ``None``, ``("ext", pos)``
    (grow ball ``pos`` of L2+L3 by 2 r) or ``("assoc", j)`` (charge it to the
    heavy index ``j`` of a heavy-only component).  ``relocation`` maps a heavy
    index whose sample hosts another ball to its new center (equal to the
    sample: drop the heavy ball).
    """
    balls = _assembled_balls(inst, profile, bundle, extension, relocation or {})
    if balls is None:
        return None
    assignment = find_assignment(inst, balls)
    if assignment is None:
        return None
    return Solution.build(balls, assignment, profile=profile.radii)


def _extension_options(profile, guess: PartitionGuess, bundle: ListBundle):
    touched = {i for i, _ in bundle.L3}
    untouched = [i for c in guess.light_only for i in c if i not in touched]
    n23 = len(bundle.L2) + len(bundle.L3)
    pure = [j for c in guess.heavy_only for j in c]
    opts = [None] + [("ext", pos) for pos in range(n23)] + [("assoc", j) for j in pure]
    return untouched, opts


def _uniform_trial(inst, profile, ch: Chooser, guesses, incumbent):
    guess = ch.pick(guesses, "partition")
    L1, L2 = build_L1_L2(inst, profile, guess, ch)
    if len(set(b.center for b in L1.values())) != len(L1):
        raise TrialFailed("two heavy samples coincide")
    fixed = sum(b.radius for b in L2.values())
    fixed += sum(b.radius for i, b in L1.items()
                 if all(b.center != h.center for h in L2.values())
                 and guess.component_of(i) not in guess.heavy_only)
    if incumbent is not None and fixed >= incumbent - TIE_TOL:
        raise Pruned("L1/L2 already too expensive")
    light = [i for c in guess.light_only for i in c]
    L3 = build_L3(inst, profile, L1, L2, ch, indices=light, budget=len(light))
    if incumbent is not None and fixed + sum(b.radius for _, b in L3) >= incumbent - TIE_TOL:
        raise Pruned("L3 too expensive")
    bundle = ListBundle(L1, L2, L3)
    untouched, opts = _extension_options(profile, guess, bundle)
    extension = {t: ch.pick(opts, "extension") for t in untouched}
    bound = _assembled_balls(inst, profile, bundle, extension, None)
    if bound is None:
        raise TrialFailed("too many balls")
    if incumbent is not None and sum(b.radius for b in bound) >= incumbent - TIE_TOL:
        raise Pruned("extensions too expensive")
    hosts = {b.center for b in L2.values()} | {b.center for b in bundle.L4.values()}
    used = {b.center for b in L2.values()} | {b.center for _, b in L3} | {b.center for b in L1.values()}
    relocation = {}
    for i, b in sorted(L1.items()):
        if b.center in hosts:
            opts_y = [b.center] + [y for y in range(inst.n) if y not in used]
            y = ch.pick(opts_y, "relocate")
            used.add(y)
            relocation[i] = y
    balls = _assembled_balls(inst, profile, bundle, extension, relocation)
    if balls is None:
        raise TrialFailed("inconsistent relocation")
    return balls


def solve_uniform(inst, epsilon: float, trials: int | None = None, rng=None, mode: str = "exh",
                  seed: int = 0) -> Solution:
    """Cheapest verified candidate over profiles and guesses.

    Exhaustive mode enumerates every guess with the profile grid refined to
    epsilon/4, so the result is within (4 + epsilon) of optimal.  Profiles are
    visited by increasing total; once the total exceeds (1 + grid eps) times
    the incumbent, no later profile can be the one matching an optimum.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    inst = _general_view(inst)
    if inst.trivially_infeasible:
        raise InfeasibleInstance("n exceeds k * U")
    if inst.n == 0:
        return Solution([], [], 0.0)
    grid_eps = epsilon / 4
    guesses = list(all_partition_guesses(inst.k))

    def trial(profile, ch, incumbent, exhaustive):
        return _uniform_trial(inst, profile, ch, guesses, incumbent)

    return run_search(_by_total(inst, grid_eps), lambda r: sample_profile_general(inst, grid_eps, r),
                      trial, CandidateCheck(inst), mode=mode, trials=trials, rng=rng, seed=seed,
                      stop=_window(grid_eps))


def _by_total(inst, grid_eps):
    return sorted(enumerate_profiles_general(inst, grid_eps), key=lambda p: p.total)


def _window(grid_eps):
    return lambda profile, best: best is not None and profile.total > (1 + grid_eps) * best


def _general_view(inst):
    if inst.uniform_capacity is None:
        raise ValueError("uniform capacities required")
    return inst if inst.kind == "general" else inst.as_general()


def _bicriteria_trial(inst, profile, ch: Chooser, incumbent):
    k = profile.k
    code = ch.choose(1 << k, "heavy")
    heavy = [i for i in range(k) if code >> i & 1]
    light = [i for i in range(k) if not code >> i & 1]
    L1 = []
    for i in heavy:
        x = sample_heavy_hit(inst, ch)
        L1.append(Ball(x, 2 * profile[i]))
    if len({b.center for b in L1}) != len(L1):
        raise TrialFailed("two heavy samples coincide")
    cost = sum(b.radius for b in L1)
    if incumbent is not None and cost >= incumbent - TIE_TOL:
        raise Pruned("L1 too expensive")
    covered = 0
    for b in L1:
        covered |= inst.cover_mask(b)
    L2, used = [], set()
    while covered != inst.full_mask:
        if len(L2) >= len(light):
            raise TrialFailed("residual needs too many balls")
        p = next(q for q in range(inst.n) if not covered >> q & 1)
        j = ch.pick([i for i in light if i not in used], "residual:index")
        used.add(j)
        ball = Ball(p, 2 * profile[j])
        L2.append(ball)
        covered |= inst.cover_mask(ball)
    balls = L1 + L2
    if len({b.center for b in balls}) != len(balls):
        raise TrialFailed("centers collide")
    return balls


def solve_bicriteria_general(inst, epsilon: float, trials: int | None = None, rng=None,
                             mode: str = "exh", seed: int = 0) -> Solution:
    """At most (2+eps) times optimal while loading each ball with up to (1+eps)U points."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    inst = _general_view(inst)
    if inst.trivially_infeasible:
        raise InfeasibleInstance("n exceeds k * U")
    if inst.n == 0:
        return Solution([], [], 0.0)
    scale = 1 + epsilon
    grid_eps = epsilon / 2

    def trial(profile, ch, incumbent, exhaustive):
        return _bicriteria_trial(inst, profile, ch, incumbent)

    return run_search(_by_total(inst, grid_eps), lambda r: sample_profile_general(inst, grid_eps, r),
                      trial, CandidateCheck(inst, scale), mode=mode, trials=trials, rng=rng,
                      seed=seed, stop=_window(grid_eps), capacity_scale=scale)
