"""Run a bench config and print per-algorithm ratio statistics.

    python3 scripts/ratio_table.py scripts/configs/desk.json --threads 4 --csv rows.csv
"""
import argparse
from collections import defaultdict

import numpy as np

from capradii.bench import bench_run, load_config, rows_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    rows = bench_run(load_config(args.config), args.threads)
    if args.csv:
        rows_to_csv(rows, args.csv)
    by_algo = defaultdict(list)
    statuses = defaultdict(lambda: defaultdict(int))
    for r in rows:
        statuses[r.algorithm][r.status] += 1
        if r.ratio is not None:
            by_algo[(r.algorithm, r.epsilon)].append(r.ratio)
    print(f"{'algorithm':<20}{'eps':>6}{'runs':>6}{'mean':>9}{'max':>9}")
    for (algo, eps), ratios in sorted(by_algo.items()):
        print(f"{algo:<20}{eps:>6}{len(ratios):>6}{np.mean(ratios):>9.3f}{max(ratios):>9.3f}")
    print()
    for algo, counts in sorted(statuses.items()):
        print(algo, dict(counts))


if __name__ == "__main__":
    main()
