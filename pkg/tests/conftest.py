import itertools
import os

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def brute_force_assignment(inst, balls, scale=1.0):
    """Try every map point -> ball; True iff some map is covering and within capacity."""
    caps = []
    for b in balls:
        c = inst.capacity_of(b.center)
        caps.append(int(np.floor(scale * c + 1e-9)) if scale != 1.0 else c)
    options = []
    for p in range(inst.n):
        opts = [i for i, b in enumerate(balls)
                if inst.dist_to_center(p, b.center) <= b.radius + 1e-9]
        if not opts:
            return False
        options.append(opts)
    for choice in itertools.product(*options):
        load = [0] * len(balls)
        for i in choice:
            load[i] += 1
        if all(load[i] <= caps[i] for i in range(len(balls))):
            return True
    return False


def random_general(rng, n, k, cap_lo=1, cap_hi=None):
    from capradii.generators import random_metric
    from capradii.model import Instance
    cap_hi = cap_hi or n
    dist = random_metric(n, rng)
    while True:
        caps = rng.integers(cap_lo, cap_hi + 1, size=n)
        inst = Instance.general(dist, caps, k, validate=False)
        if not inst.trivially_infeasible:
            return inst


from capradii.guess import Chooser  # noqa: E402


class Scripted(Chooser):
    """Answers decisions by label; a value may be an option, an int, or a callable on the options.

    Unscripted decisions take the first option.
    """

    def __init__(self, **script):
        super().__init__()
        self.script = {k.replace("__", ":"): list(v) if isinstance(v, (list, tuple)) else [v]
                       for k, v in script.items()}
        self._forced = None

    def _pick(self, arity):
        c, self._forced = self._forced, None
        return 0 if c is None else c

    def _next(self, label):
        q = self.script.get(label)
        if q:
            return q.pop(0) if len(q) > 1 else q[0]
        return None

    def pick(self, options, label=""):
        options = list(options)
        v = self._next(label)
        if v is not None:
            if callable(v):
                v = v(options)
            self._forced = options.index(v)
        return options[self.choose(len(options), label)]

    def choose(self, arity, label=""):
        if self._forced is None:
            v = self._next(label)
            if v is not None and not callable(v):
                self._forced = int(v)
        try:
            return super().choose(arity, label)
        finally:
            self._forced = None
