"""Experiment harness: generators x algorithms x eps x seeds, written as CSV."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

from .euclidean import solve_euclid_2approx, solve_euclid_bicriteria, solve_euclid_ptas
from .generators import GeneratorSpec, generate
from .model import BudgetExhausted, InfeasibleInstance, verify_solution
from .nonuniform import solve_nonuniform
from .oracle import OracleBudget, OracleBudgetExceeded, solve_exact
from .uniform import solve_bicriteria_general, solve_uniform

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Algorithm:
    solve: object
    euclidean: bool                  # needs coordinates (free centers)
    bicriteria: bool = False
    randomized: bool = True          # accepts trials / mode / seed
    uniform_only: bool = True

    def capacity_scale(self, epsilon: float) -> float:
        return 1 + epsilon if self.bicriteria else 1.0

    def run(self, inst, epsilon, trials=None, mode="exh", seed=0):
        if self.randomized:
            return self.solve(inst, epsilon, trials=trials, mode=mode, seed=seed)
        return self.solve(inst, epsilon)


ALGORITHMS = {
    "nonuniform": Algorithm(solve_nonuniform, euclidean=False, uniform_only=False),
    "uniform": Algorithm(solve_uniform, euclidean=False),
    "bicriteria-general": Algorithm(solve_bicriteria_general, euclidean=False, bicriteria=True),
    "euclid2": Algorithm(solve_euclid_2approx, euclidean=True),
    "euclid-ptas": Algorithm(solve_euclid_ptas, euclidean=True, randomized=False),
    "bicriteria-euclid": Algorithm(solve_euclid_bicriteria, euclidean=True, bicriteria=True),
}


def view_for(algo: Algorithm, inst):
    """The instance as the algorithm sees it, or None if it does not apply."""
    if algo.uniform_only and inst.uniform_capacity is None:
        return None
    if algo.euclidean:
        return inst if inst.kind == "euclidean" else None
    return inst.as_general() if inst.kind == "euclidean" else inst


@dataclass
class BenchRow:
    schema_version: int
    instance_id: str
    generator: str
    n: int
    k: int
    algorithm: str
    epsilon: float
    seed: int
    cost: float | None
    oracle_cost: float | None
    ratio: float | None
    wall_time: float | None
    trials: int | None
    status: str          # ok | infeasible | budget-exhausted | invalid | not-applicable


COLUMNS = tuple(f.name for f in fields(BenchRow))


@dataclass
class BenchConfig:
    generators: list
    algorithms: list
    epsilons: list
    seeds: list
    trials: int | None = None
    mode: str = "exh"
    oracle: OracleBudget | None = OracleBudget()

    @classmethod
    def from_json(cls, obj) -> "BenchConfig":
        if isinstance(obj, list):       # bare list of generator specs
            obj = {"generators": obj}
        obj = dict(obj or {})
        gens = [GeneratorSpec.from_json(g) for g in obj.pop("generators", [])]
        algos = obj.pop("algorithms", [])
        for a in algos:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        budget = obj.pop("oracle", {})
        budget = None if budget is None else OracleBudget(**budget)
        return cls(gens, algos, obj.pop("epsilons", [0.5]), obj.pop("seeds", [0]),
                   oracle=budget, **obj)


def _oracle_cost(view, budget, cache):
    key = view.kind
    if key not in cache:
        try:
            cache[key] = None if budget is None else solve_exact(view, budget).cost
        except (OracleBudgetExceeded, InfeasibleInstance):
            cache[key] = None
    return cache[key]


def _rows_for(job) -> list[BenchRow]:
    spec, cfg = job
    inst, _ = generate(spec)
    oracle_cache: dict = {}
    rows = []
    for name in cfg.algorithms:
        algo = ALGORITHMS[name]
        view = view_for(algo, inst)
        for eps in cfg.epsilons:
            for seed in cfg.seeds:
                base = dict(schema_version=SCHEMA_VERSION, instance_id=spec.instance_id,
                            generator=spec.kind, n=inst.n, k=inst.k, algorithm=name,
                            epsilon=eps, seed=seed)
                if view is None:
                    rows.append(BenchRow(**base, cost=None, oracle_cost=None, ratio=None,
                                         wall_time=None, trials=None, status="not-applicable"))
                    continue
                oracle = _oracle_cost(view, cfg.oracle, oracle_cache)
                t0 = time.perf_counter()
                try:
                    sol = algo.run(view, eps, cfg.trials, cfg.mode, seed)
                except InfeasibleInstance:
                    status, sol = "infeasible", None
                except BudgetExhausted:
                    status, sol = "budget-exhausted", None
                wall = time.perf_counter() - t0
                cost = ratio = trials = None
                if sol is not None:
                    ok = verify_solution(view, sol, algo.capacity_scale(eps)).ok
                    status = "ok" if ok else "invalid"
                    cost, trials = sol.cost, sol.meta.get("trials")
                    if oracle is not None:
                        ratio = cost / oracle if oracle > 0 else (1.0 if cost == 0 else float("inf"))
                rows.append(BenchRow(**base, cost=cost, oracle_cost=oracle, ratio=ratio,
                                     wall_time=wall, trials=trials, status=status))
    return rows


def bench_run(config, threads: int = 1) -> list[BenchRow]:
    """Rows in input order: generator, algorithm, epsilon, seed."""
    cfg = config if isinstance(config, BenchConfig) else BenchConfig.from_json(config)
    jobs = [(g, cfg) for g in cfg.generators]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_rows_for, jobs))
    else:
        chunks = [_rows_for(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows, out=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_cell(v) for v in astuple(r)])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read().strip()
    return BenchConfig.from_json(json.loads(text) if text else {})
