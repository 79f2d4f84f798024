"""Shared outer loop: profiles x guess trials, keeping the cheapest feasible candidate."""
from __future__ import annotations

import math

from .flow import find_assignment, find_assignment_with_capacity_scale
from .guess import RandomChooser, TrialFailed, enumerate_trials, trial_rng
from .model import BudgetExhausted, Solution

TIE_TOL = 1e-12
EXHAUSTIVE = ("exh", "exhaustive")
RANDOMIZED = ("rand", "randomized")


class CandidateCheck:
    """Flow feasibility with memoization.

    With a capacity shared by every ball, feasibility depends only on the
    multiset of cover masks; otherwise centers and radii form the key.
    """

    def __init__(self, inst, scale: float = 1.0):
        self.inst, self.scale = inst, scale
        self.by_mask = inst.uniform_capacity is not None
        self.memo: dict = {}
        self._masks: dict = {}

    def _mask(self, ball) -> int:
        key = (ball.center, ball.radius)
        m = self._masks.get(key)
        if m is None:
            m = self._masks[key] = self.inst.cover_mask(ball)
        return m

    def __call__(self, balls) -> list[int] | None:
        if self.by_mask:
            key = tuple(sorted(self._mask(b) for b in balls))
        else:
            key = tuple((b.center, b.radius) for b in balls)
        if self.memo.get(key) is False:
            return None
        if self.scale == 1.0:
            res = find_assignment(self.inst, balls)
        else:
            res = find_assignment_with_capacity_scale(self.inst, balls, self.scale)
        self.memo[key] = res is not None
        return res


def run_search(profiles, sample_profile, trial, check: CandidateCheck, *, mode: str = "exh",
               trials: int | None = None, rng=None, seed: int = 0, stop=None, **meta) -> Solution:
    """Drive ``trial(profile, chooser, incumbent_cost, exhaustive)`` over profiles.

    Exhaustive mode enumerates every decision sequence of every profile from
    ``profiles``; ``trials`` then caps the number of enumerated trials, and
    ``stop(profile, incumbent_cost)`` may end the profile sweep early.
    Randomized mode samples ``trials`` profiles and decision sequences, each
    from its own stream derived from ``seed`` (or from ``rng`` if given).
    A trial returns a list of balls or raises TrialFailed.
    """
    best: list = [None, None]
    used = 0

    def consider(balls, trace, profile):
        cost = math.fsum(b.radius for b in balls)
        if best[0] is not None and cost >= best[0] - TIE_TOL:
            return
        assignment = check(balls)
        if assignment is not None:
            best[0] = cost
            best[1] = Solution.build(balls, assignment, trace, profile=profile.radii, **meta)

    if mode in EXHAUSTIVE:
        budget = math.inf if trials is None else trials
        for profile in profiles:
            if used >= budget or (stop is not None and stop(profile, best[0])):
                break
            run = lambda ch, profile=profile: trial(profile, ch, best[0], True)
            for balls, trace in enumerate_trials(run):
                used += 1
                if balls is not None:
                    consider(balls, trace, profile)
                if used >= budget:
                    break
    elif mode in RANDOMIZED:
        for t in range(1000 if trials is None else trials):
            r = trial_rng(seed, t) if rng is None else rng
            profile = sample_profile(r)
            ch = RandomChooser(r)
            used += 1
            try:
                balls = trial(profile, ch, best[0], False)
            except TrialFailed:
                continue
            consider(balls, tuple(ch.trace), profile)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if best[1] is None:
        raise BudgetExhausted(f"no feasible candidate in {used} trials")
    best[1].meta["trials"] = used
    return best[1]
