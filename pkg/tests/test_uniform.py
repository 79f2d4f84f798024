import numpy as np
import pytest

from capradii.generators import GeneratorSpec, generate
from capradii.model import Ball, Instance, verify_solution
from capradii.oracle import solve_exact
from capradii.profiles import RadiusProfile
from capradii.uniform import (ListBundle, PartitionGuess, _bicriteria_trial, all_partition_guesses,
                              assemble_uniform, build_L1_L2, build_L3, component_radius,
                              sample_heavy_hit, set_partitions, solve_bicriteria_general,
                              solve_uniform)

from conftest import Scripted


def line_instance(xs, U, k):
    xs = np.asarray(xs, dtype=float)
    return Instance.general(np.abs(xs[:, None] - xs[None, :]), [U] * len(xs), k)


def test_set_partition_counts():
    assert [sum(1 for _ in set_partitions(range(m))) for m in range(6)] == [1, 1, 2, 5, 15, 52]
    assert sum(1 for _ in all_partition_guesses(2)) == 4 * 2


def test_partition_guess_rejects_bad_shapes():
    with pytest.raises(ValueError):
        PartitionGuess(frozenset({0}), ((0, 1), (1,)))
    with pytest.raises(ValueError):
        PartitionGuess(frozenset({2}), ((0, 1),))


def test_component_radius_additive():
    profile = RadiusProfile((3.0, 3.0, 1.0), 0.5)
    assert 2 * component_radius(profile, (1, 2)) == 8.0


def test_sample_heavy_hit_basics():
    inst = line_instance([0.0], 1, 1)
    assert sample_heavy_hit(inst, np.random.default_rng(0)) == 0
    big = line_instance(range(8), 4, 2)
    a = [sample_heavy_hit(big, np.random.default_rng(3)) for _ in range(5)]
    b = [sample_heavy_hit(big, np.random.default_rng(3)) for _ in range(5)]
    assert a == b


def test_sample_heavy_hit_rate():
    # one heavy planted ball of U/k points among n = kU
    k, U = 3, 6
    inst, truth = generate(GeneratorSpec(kind="planted-general", n=k * U, k=k, U=U, seed=2))
    sizes = np.bincount(truth.assignment)
    heavy = int(np.argmax(sizes))
    assert sizes[heavy] >= U / k
    rng = np.random.default_rng(0)
    hits = sum(truth.assignment[sample_heavy_hit(inst, rng)] == heavy for _ in range(10_000))
    assert hits / 10_000 >= 1 / k ** 2


def heavy_light_fixture():
    # heavy optimal ball B(0.4, 0.5) with 5 points; light B(1.0, 0.1) with 3 points; they touch
    xs = [0.0, 0.2, 0.4, 0.6, 0.8, 0.95, 1.0, 1.05]
    return line_instance(xs, 8, 2), RadiusProfile((0.5, 0.1), 0.05)


@pytest.mark.parametrize("sample", range(5))
def test_L1_L2_forced_sample_in_heavy_ball(sample):
    inst, profile = heavy_light_fixture()
    guess = PartitionGuess(frozenset({0}), ((0, 1),))
    L1, L2 = build_L1_L2(inst, profile, guess, Scripted(sample=sample))
    assert L1[0] == Ball(sample, 1.0)
    assert all(inst.cover_mask(L1[0]) >> p & 1 for p in range(5))
    (ball,) = L2.values()
    assert ball.radius == pytest.approx(2 * 0.6)
    assert inst.cover_mask(ball) == inst.full_mask


def test_single_heavy_ball_covers_everything():
    inst = line_instance([0.0, 0.3, 0.5, 1.0], 4, 1)
    profile = RadiusProfile((0.5,), 0.1)
    for x in range(4):
        L1, L2 = build_L1_L2(inst, profile, PartitionGuess(frozenset({0}), ((0,),)), Scripted(sample=x))
        assert L2 == {} and inst.cover_mask(L1[0]) == inst.full_mask


def light_fixture():
    xs = [0.0, 0.1, 5.0, 5.2, 5.3, 10.0, 10.05]
    inst = line_instance(xs, 7, 3)
    profile = RadiusProfile((0.15, 0.1, 0.05), 0.05)
    clusters = [(2, 3, 4), (0, 1), (5, 6)]   # index -> members
    return inst, profile, clusters


def test_L3_forced_trace_covers_with_doubled_balls():
    inst, profile, clusters = light_fixture()
    # smallest uncovered point order: cluster 1, then 0, then 2
    L3 = build_L3(inst, profile, {}, {}, Scripted(L3__index=[1, 0, 2]))
    assert [i for i, _ in L3] == [1, 0, 2]
    covered = 0
    for i, ball in L3:
        assert ball.radius == 2 * profile[i]
        assert not covered >> ball.center & 1
        assert all(inst.cover_mask(ball) >> p & 1 for p in clusters[i])
        covered |= inst.cover_mask(ball)
    assert covered == inst.full_mask


def test_L3_empty_when_already_covered():
    inst, profile = heavy_light_fixture()
    assert build_L3(inst, profile, {0: Ball(0, 2.0)}, {}, Scripted()) == []


def test_assembly_without_extensions_keeps_lists():
    inst, profile, clusters = light_fixture()
    L3 = build_L3(inst, profile, {}, {}, Scripted(L3__index=[1, 0, 2]))
    bundle = ListBundle({}, {}, L3)
    sol = assemble_uniform(inst, profile, PartitionGuess(frozenset(), ((0,), (1,), (2,))), bundle, {})
    assert sol is not None
    assert sorted(sol.balls, key=lambda b: b.center) == sorted((b for _, b in L3), key=lambda b: b.center)
    assert sol.cost <= 4 * profile.total + 1e-12


def test_k1_heavy_only():
    inst = line_instance([0.0, 0.3, 0.5], 3, 1)
    profile = RadiusProfile((0.5,), 0.1)
    guess = PartitionGuess(frozenset({0}), ((0,),))
    L1, L2 = build_L1_L2(inst, profile, guess, Scripted(sample=2))
    sol = assemble_uniform(inst, profile, guess, ListBundle(L1, L2, []), {})
    assert [b.radius for b in sol.balls] == [1.0] and sol.cost <= 4 * profile.total


def test_component_ball_covers_planted_component():
    inst, profile = heavy_light_fixture()
    comp_pts = range(inst.n)
    for x in comp_pts:
        ball = Ball(x, 2 * component_radius(profile, (0, 1)))
        assert inst.cover_mask(ball) == inst.full_mask


def test_bicriteria_residual_after_correct_heavy_balls():
    eps, k = 0.5, 3
    inst, truth = generate(GeneratorSpec(kind="planted-general", n=9, k=k, U=4, seed=5))
    sizes = np.bincount(truth.assignment, minlength=k)
    U = inst.U
    heavy = [j for j in range(k) if sizes[j] >= eps * U / k]
    order = sorted(range(k), key=lambda j: -truth.balls[j].radius)
    profile = RadiusProfile(tuple(truth.balls[j].radius for j in order), 0.0)
    code = sum(1 << order.index(j) for j in heavy)
    samples = [next(p for p in range(inst.n) if truth.assignment[p] == order[i])
               for i in range(k) if code >> i & 1]
    ch = Scripted(heavy=code, sample=samples, residual__index=lambda opts: opts[0])
    balls = _bicriteria_trial(inst, profile, ch, None)
    L1 = balls[:len(heavy)]
    covered = 0
    for b in L1:
        covered |= inst.cover_mask(b)
    residual = inst.n - bin(covered).count("1")
    assert residual <= eps * U


def test_bicriteria_huge_scale_is_pure_covering():
    # with U = n only coverage binds, so any single covering ball is accepted
    inst = line_instance([0.0, 0.1, 0.2, 0.3], 4, 1)
    sol = solve_bicriteria_general(inst, 0.5)
    assert verify_solution(inst, sol, 1.5).ok
    assert sol.cost <= 3 * 0.2 + 1e-9


def test_k_equals_n_costs_zero():
    inst = line_instance([0, 1, 2], 1, 3)
    assert solve_uniform(inst, 0.5).cost == 0.0


@pytest.mark.parametrize("seed", range(6))
def test_ratios_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    k = int(rng.integers(1, 3))
    U = int(rng.integers(-(-n // k), n + 1))
    inst, _ = generate(GeneratorSpec(kind="uniform-random", n=n, k=k, U=U, metric="general", seed=seed))
    opt = solve_exact(inst).cost
    sol = solve_uniform(inst, 0.5)
    assert verify_solution(inst, sol).ok and sol.cost <= 4.5 * opt + 1e-9
    bi = solve_bicriteria_general(inst, 0.5)
    assert verify_solution(inst, bi, 1.5).ok and bi.cost <= 3 * opt + 1e-9


def test_seed_determinism():
    inst, _ = generate(GeneratorSpec(kind="uniform-random", n=7, k=2, U=4, metric="general", seed=9))
    runs = [solve_uniform(inst, 0.5, mode="rand", trials=300, seed=2) for _ in range(2)]
    assert runs[0].balls == runs[1].balls and runs[0].trace == runs[1].trace
    runs = [solve_bicriteria_general(inst, 0.5, mode="rand", trials=300, seed=2) for _ in range(2)]
    assert runs[0].balls == runs[1].balls


def test_euclidean_input_viewed_as_points():
    inst, _ = generate(GeneratorSpec(kind="uniform-random", n=5, k=2, U=3, seed=1))
    sol = solve_uniform(inst, 0.5)
    assert all(b.is_point_centered for b in sol.balls) and verify_solution(inst, sol).ok


def test_nonuniform_capacities_rejected():
    with pytest.raises(ValueError):
        solve_uniform(Instance.general([[0, 1], [1, 0]], [1, 2], 1), 0.5)
