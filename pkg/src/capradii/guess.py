"""Decision sources for guess-driven trials.

Every randomized algorithm here is written as a trial that asks a chooser for
each guess.  The same trial code runs with random draws, with a recorded
trace replayed verbatim, or under exhaustive depth-first enumeration of all
decision sequences (replaying the prefix of each path).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TrialFailed(Exception):
    """A guess turned out inconsistent (empty candidate set and the like)."""


class Pruned(TrialFailed):
    """The partial solution can no longer beat the incumbent."""


@dataclass(frozen=True)
class Decision:
    label: str
    choice: int
    arity: int


class Chooser:
    def __init__(self):
        self.trace: list[Decision] = []

    def _pick(self, arity: int) -> int:
        raise NotImplementedError

    def choose(self, arity: int, label: str = "") -> int:
        if arity <= 0:
            raise TrialFailed(f"no options for {label or 'decision'}")
        c = self._pick(arity) if arity > 1 else 0
        self.trace.append(Decision(label, c, arity))
        return c

    def pick(self, options, label: str = ""):
        options = list(options)
        return options[self.choose(len(options), label)]

    def coin(self, label: str = "") -> bool:
        return bool(self.choose(2, label))


class RandomChooser(Chooser):
    def __init__(self, rng: np.random.Generator):
        super().__init__()
        self.rng = rng

    def _pick(self, arity: int) -> int:
        return int(self.rng.integers(arity))


class ReplayChooser(Chooser):
    """Replays a list of choices; decisions past its end take option 0."""

    def __init__(self, choices):
        super().__init__()
        self.choices = [d.choice if isinstance(d, Decision) else int(d) for d in choices]

    def _pick(self, arity: int) -> int:
        i = len(self.trace)
        c = self.choices[i] if i < len(self.choices) else 0
        if not 0 <= c < arity:
            raise TrialFailed(f"replayed choice {c} out of range {arity}")
        return c


def enumerate_trials(run):
    """Depth-first over every decision sequence of ``run(chooser)``.

    Yields ``(result, trace)``; ``result`` is None when the trial raised
    TrialFailed.  A trial that stops early (failure or pruning) cuts off the
    whole subtree below its last decision.
    """
    prefix: list[int] = []
    while True:
        ch = ReplayChooser(prefix)
        try:
            result = run(ch)
        except TrialFailed:
            result = None
        trace = ch.trace
        yield result, tuple(trace)
        path = [(d.choice, d.arity) for d in trace]
        while path and path[-1][0] + 1 >= path[-1][1]:
            path.pop()
        if not path:
            return
        c, _ = path.pop()
        prefix = [p[0] for p in path] + [c + 1]


def trial_rng(seed: int, counter: int) -> np.random.Generator:
    """Independent stream for trial ``counter`` under a global seed."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(counter,)))


def subset_from_code(items, code: int) -> list:
    return [x for b, x in enumerate(items) if code >> b & 1]
