"""Command-line entry point: gen, solve, oracle, verify, bench."""
from __future__ import annotations

import json
import sys

import click

from .bench import ALGORITHMS, bench_run, load_config, rows_to_csv, view_for
from .generators import KINDS, GeneratorSpec, generate
from .model import (BudgetExhausted, InfeasibleInstance, load_instance, load_solution,
                    save_instance, save_solution, verify_solution)
from .oracle import OracleBudget, OracleBudgetExceeded, solve_exact

EXIT_OK, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_INVALID = 0, 2, 3, 4


def _emit(obj, out):
    text = json.dumps(obj)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text)


@click.group()
def main():
    """Capacitated sum-of-radii clustering."""


@main.command()
@click.option("--kind", type=click.Choice(KINDS), default="uniform-random")
@click.option("--n", "n", type=int, default=8)
@click.option("--k", "k", type=int, default=2)
@click.option("--d", "d", type=int, default=2)
@click.option("--U", "U", type=int, default=None, help="Uniform capacity.")
@click.option("--cap-range", nargs=2, type=int, default=None, help="Per-point capacity range lo hi.")
@click.option("--separation", type=float, default=2.0)
@click.option("--metric", type=click.Choice(["euclidean", "general"]), default="euclidean")
@click.option("--clique", type=int, default=3)
@click.option("--edge-prob", type=float, default=0.3)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--truth", type=click.Path(dir_okay=False), default=None,
              help="Write the planted solution here (planted kinds).")
def gen(kind, n, k, d, U, cap_range, separation, metric, clique, edge_prob, seed, out, truth):
    """Generate an instance JSON."""
    spec = GeneratorSpec(kind=kind, n=n, k=k, d=d, U=U, cap_range=cap_range or None,
                         separation=separation, seed=seed, metric=metric, clique=clique,
                         edge_prob=edge_prob)
    inst, planted = generate(spec)
    if out:
        save_instance(inst, out)
    else:
        click.echo(json.dumps(inst.to_json()))
    if truth and planted is not None:
        save_solution(planted.as_solution(), truth)


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--algo", type=click.Choice(sorted(ALGORITHMS)), required=True)
@click.option("--eps", type=float, default=0.5)
@click.option("--trials", type=int, default=None, help="Trial budget (cap in exhaustive mode).")
@click.option("--seed", type=int, default=0)
@click.option("--mode", type=click.Choice(["exh", "rand"]), default="exh")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def solve(instance, algo, eps, trials, seed, mode, out):
    """Run an approximation algorithm."""
    alg = ALGORITHMS[algo]
    view = view_for(alg, load_instance(instance))
    if view is None:
        raise click.UsageError(f"{algo} does not apply to this instance")
    try:
        sol = alg.run(view, eps, trials, mode, seed)
    except InfeasibleInstance as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except BudgetExhausted as exc:
        click.echo(f"budget exhausted: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    rep = verify_solution(view, sol, alg.capacity_scale(eps))
    _emit(sol.to_json(), out)
    click.echo(f"cost {sol.cost!r} trials {sol.meta.get('trials')}", err=True)
    if not rep.ok:
        click.echo(str(rep), err=True)
        sys.exit(EXIT_INVALID)


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-n", type=int, default=10)
@click.option("--max-k", type=int, default=3)
@click.option("--time-limit", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def oracle(instance, max_n, max_k, time_limit, out):
    """Exact optimum of a tiny instance."""
    inst = load_instance(instance)
    try:
        sol = solve_exact(inst, OracleBudget(max_n, max_k, time_limit))
    except InfeasibleInstance as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except OracleBudgetExceeded as exc:
        click.echo(f"oracle budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    click.echo(f"cost {sol.cost!r}")
    _emit(sol.to_json(), out)


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.argument("solution", type=click.Path(exists=True, dir_okay=False))
@click.option("--capacity-scale", type=float, default=1.0)
def verify(instance, solution, capacity_scale):
    """Check a solution; exit 4 on any violation."""
    inst = load_instance(instance)
    try:
        sol = load_solution(solution)
    except (ValueError, KeyError, TypeError) as exc:
        click.echo(f"malformed: {exc}")
        sys.exit(EXIT_INVALID)
    rep = verify_solution(inst, sol, capacity_scale)
    click.echo(str(rep))
    sys.exit(EXIT_OK if rep.ok else EXIT_INVALID)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--threads", type=int, default=1)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def bench(config, threads, out):
    """Run a benchmark config and write the CSV."""
    text = rows_to_csv(bench_run(load_config(config), threads), out)
    if not out:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
