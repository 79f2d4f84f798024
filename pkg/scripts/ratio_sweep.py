"""Observed ratio versus oracle as eps varies, for one solver on seeded random instances.

    python3 scripts/ratio_sweep.py --algo uniform --count 30 --eps 0.3 0.5 0.9
"""
import argparse

import numpy as np

from capradii.bench import ALGORITHMS, view_for
from capradii.generators import GeneratorSpec, generate
from capradii.model import verify_solution
from capradii.oracle import solve_exact


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--algo", choices=sorted(ALGORITHMS), default="uniform")
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.3, 0.5, 0.9])
    args = ap.parse_args()

    algo = ALGORITHMS[args.algo]
    kind = "planted-euclidean" if algo.euclidean else "planted-general"
    instances = []
    for seed in range(args.count):
        cap = {} if algo.uniform_only else {"cap_range": (1, args.n)}
        inst, _ = generate(GeneratorSpec(kind=kind, n=args.n, k=args.k, seed=seed, **cap))
        view = view_for(algo, inst)
        instances.append((view, solve_exact(view).cost))
    for eps in args.eps:
        ratios = []
        for view, opt in instances:
            sol = algo.run(view, eps)
            assert verify_solution(view, sol, algo.capacity_scale(eps)).ok
            ratios.append(sol.cost / opt if opt > 0 else 1.0)
        print(f"eps {eps:<5} mean {np.mean(ratios):.3f} max {max(ratios):.3f}")


if __name__ == "__main__":
    main()
