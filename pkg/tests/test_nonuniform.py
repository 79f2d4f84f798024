import numpy as np
import pytest

from capradii.generators import GeneratorSpec, generate
from capradii.guess import RandomChooser, ReplayChooser, TrialFailed
from capradii.model import Ball, Instance, InfeasibleInstance, verify_solution
from capradii.nonuniform import (Configuration, ConfigurationError, _Geometry,
                                 assemble_and_check, far_sequence, final_balls,
                                 phase1_cover_step, phase2_merge_step, phase3_replace_step,
                                 replacement_region, run_trial, solve_nonuniform)
from capradii.oracle import solve_exact
from capradii.profiles import RadiusProfile

from conftest import Scripted, random_general


def line_instance(xs, caps, k):
    xs = np.asarray(xs, dtype=float)
    return Instance.general(np.abs(xs[:, None] - xs[None, :]), caps, k)


def planted(seed, n=6, k=2):
    inst, truth = generate(GeneratorSpec(kind="planted-general", n=n, k=k, cap_range=(1, n),
                                         seed=seed, separation=3.0))
    order = sorted(range(len(truth.balls)), key=lambda j: -truth.balls[j].radius)
    profile = RadiusProfile(tuple(truth.balls[j].radius for j in order), 0.0)
    index_of = {j: order.index(j) for j in range(len(order))}
    return inst, truth, profile, index_of


def covered_by(inst, balls):
    m = 0
    for b in balls:
        m |= inst.cover_mask(b)
    return m


# ---- cover step

def test_cover_step_singleton():
    inst = Instance.general([[0.0]], [1], 1)
    cfg = phase1_cover_step(inst, RadiusProfile((0.0,), 0.0), Configuration(), ReplayChooser([]))
    assert set(cfg.I1) == {0} and cfg.I1[0] == Ball(0, 0.0)


def test_cover_step_takes_largest_capacity():
    inst = line_instance([0, 0.1, 0.2, 0.3], [1, 3, 5, 2], 1)
    cfg = phase1_cover_step(inst, RadiusProfile((0.3,), 0.1), Configuration(), ReplayChooser([]))
    assert cfg.I1[0].center == 2 and cfg.I1[0].radius == pytest.approx(0.9)


@pytest.mark.parametrize("seed", range(5))
def test_cover_phase_random_traces_reach_planted_bound(seed):
    inst, _, profile, _ = planted(seed)
    geo = _Geometry(inst)
    bound = 3 * profile.total
    hits = 0
    for t in range(200):
        ch = RandomChooser(np.random.default_rng([seed, t]))
        cfg = Configuration()
        try:
            while covered_by(inst, cfg.I1.values()) != inst.full_mask and len(cfg.I1) < profile.k:
                cfg = phase1_cover_step(inst, profile, cfg, ch, geo)
        except TrialFailed:
            continue
        if covered_by(inst, cfg.I1.values()) == inst.full_mask and \
                sum(b.radius for b in cfg.I1.values()) <= bound + 1e-9:
            hits += 1
    assert hits > 0


@pytest.mark.parametrize("seed", range(10))
def test_cover_phase_forced_trace(seed):
    """Guess each uncovered point's own cluster and the 'not optimal center' branch."""
    inst, truth, profile, index_of = planted(seed)
    cfg = Configuration()
    while True:
        cov = covered_by(inst, cfg.I1.values())
        if cov == inst.full_mask:
            break
        x = next(p for p in range(inst.n) if not cov >> p & 1)
        ch = Scripted(cover__index=index_of[truth.assignment[x]], cover__is_optimal_center=0)
        cfg = phase1_cover_step(inst, profile, cfg, ch)
        i = index_of[truth.assignment[x]]
        members = [p for p in range(inst.n) if truth.assignment[p] == truth.assignment[x]]
        assert all(inst.cover_mask(cfg.I1[i]) >> p & 1 for p in members)
    assert sum(b.radius for b in cfg.I1.values()) <= 3 * profile.total + 1e-9
    cfg.check(profile, _Geometry(inst))


# ---- merge step

def merge_fixture():
    # small cluster near 0 (r=0.2 grid), big cluster on [1, 3] with radius 1
    xs = [0.0, 0.1, 0.2, 1.0, 1.5, 2.0, 2.5, 3.0]
    caps = [3, 3, 3, 1, 6, 2, 1, 1]
    inst = line_instance(xs, caps, 2)
    profile = RadiusProfile((1.0, 0.2), 0.1)
    cfg = Configuration(I1={1: Ball(1, 5 * 0.2)})
    return inst, profile, cfg


def test_merge_step_second_branch_radius_and_containment():
    inst, profile, cfg = merge_fixture()
    out = phase2_merge_step(inst, profile, cfg, Scripted(merge__small=1, merge__large=0,
                                                          merge__is_optimal_center=0))
    ri, rj = profile[1], profile[0]
    ball = out.I1[0]
    assert ball.radius == pytest.approx(2 * (5 * ri + rj) + rj)
    # boundary r_j = 5 r_i: the radius lands exactly on 5 r_j
    assert ball.radius <= 5 * rj + 1e-12
    assert ball.center == 4          # largest capacity within 5 r_i + r_j of the small center
    big = [3, 4, 5, 6, 7]
    assert all(inst.cover_mask(ball) >> p & 1 for p in big)
    out.check(profile, _Geometry(inst))


def test_merge_step_requires_ratio():
    inst, _, cfg = merge_fixture()
    with pytest.raises(TrialFailed):
        phase2_merge_step(inst, RadiusProfile((0.5, 0.2), 0.1), cfg,
                          Scripted(merge__small=1, merge__large=0))


# ---- replacement step

def replace_fixture():
    # B1[0] is a big approximate ball around 0; small optimal clusters at 3 and 6 lie inside
    # ext(B1[0], 10 r_0) but outside B1[0]; B2 already holds the one at 6.
    xs = [0.0, 0.5, 1.0, 3.0, 3.1, 6.0, 6.1]
    caps = [3, 1, 1, 2, 2, 2, 2]
    inst = line_instance(xs, caps, 3)
    profile = RadiusProfile((1.0, 0.1, 0.1), 0.05)
    cfg = Configuration(I1={0: Ball(1, 1.0)}, I2={2: Ball(5, 0.1)})
    return inst, profile, cfg


def test_replace_step_adds_disjoint_ball_inside_extended_region():
    inst, profile, cfg = replace_fixture()
    geo = _Geometry(inst)
    ch = Scripted(replace__index=1, replace__touching_set=0, replace__case=2,
                  replace__sequence_position=3)
    out, restarted = phase3_replace_step(inst, profile, cfg, ch, geo)
    assert not restarted
    new = out.I2[1]
    assert new.radius == profile[1]
    for i, b in out.I2.items():
        if i != 1:
            assert not inst.cover_mask(b) & inst.cover_mask(new)
    big = cfg.I1[0]
    assert inst.dist(new.center, big.center) + new.radius <= big.radius + 10 * profile[0] + 1e-9
    out.check(profile, geo)


def test_replace_region_and_sequence():
    inst, profile, cfg = replace_fixture()
    geo = _Geometry(inst)
    region = replacement_region(profile, cfg, [0], geo)
    assert region == inst.full_mask          # every point is within 11 of the B1 center
    two = Configuration(I1={0: Ball(1, 1.0), 1: Ball(3, 0.1)})
    assert replacement_region(profile, two, [0], geo) == inst.full_mask & ~0b11000
    seq = far_sequence(inst, profile, cfg, 1, region, geo)
    assert 5 not in seq and 6 not in seq      # their balls would meet B2
    assert len(seq) <= profile.k + 1
    for a in seq:
        for b in seq:
            assert a == b or inst.dist(a, b) >= 4 * profile[1] - 1e-9


def test_sequence_capped_at_k_plus_one():
    xs = [10.0 * i for i in range(8)]
    inst = line_instance(xs, [1] * 8, 2)
    profile = RadiusProfile((1.0, 1.0), 0.5)
    seq = far_sequence(inst, profile, Configuration(), 0, inst.full_mask)
    assert len(seq) == 3


def test_restart_clears_I2():
    inst, profile, cfg = replace_fixture()
    ch = Scripted(replace__index=1, replace__touching_set=0, replace__case=0,
                  replace__near_is_optimal_center=0)
    out, restarted = phase3_replace_step(inst, profile, cfg, ch)
    assert restarted and out.I2 == {} and out.I1[1].radius == pytest.approx(5 * profile[1])


# ---- assembly and invariants

def test_assembly_extends_B1_by_ten_radii():
    inst = line_instance([0.0, 1.0], [2, 2], 1)
    profile = RadiusProfile((0.1,), 0.05)
    cfg = Configuration(I1={0: Ball(0, 0.5)})
    balls = final_balls(profile, cfg)
    assert balls == [Ball(0, 1.5)]
    sol = assemble_and_check(inst, profile, cfg)
    assert sol is not None and verify_solution(inst, sol).ok


def test_zero_profile_on_coincident_points():
    inst = Instance.general(np.zeros((3, 3)), [3, 3, 3], 1)
    sol = solve_nonuniform(inst, 0.5)
    assert sol.cost == 0.0


def test_configuration_check_catches_violations():
    profile = RadiusProfile((1.0, 0.5), 0.1)
    with pytest.raises(ConfigurationError):
        Configuration(I1={0: Ball(0, 6.0)}).check(profile)
    with pytest.raises(ConfigurationError):
        Configuration(I1={0: Ball(0, 1.0)}, I2={0: Ball(1, 1.0)}).check(profile)
    with pytest.raises(ConfigurationError):
        Configuration(I1={0: Ball(0, 1.0)}, I2={1: Ball(0, 0.5)}).check(profile)


def test_singletons_cost_zero():
    inst = line_instance([0, 1, 2], [1, 1, 1], 3)
    assert solve_nonuniform(inst, 0.5).cost == 0.0


def test_infeasible_reported():
    with pytest.raises(InfeasibleInstance):
        solve_nonuniform(line_instance([0, 1, 2], [1, 1, 1], 2), 0.5)


@pytest.mark.parametrize("seed", range(6))
def test_debug_runs_keep_invariants_and_ratio(seed):
    rng = np.random.default_rng(seed)
    inst = random_general(rng, int(rng.integers(2, 7)), int(rng.integers(1, 3)))
    sol = solve_nonuniform(inst, 0.5, debug=True)
    assert verify_solution(inst, sol).ok
    assert sol.cost <= 15.5 * solve_exact(inst).cost + 1e-9


def test_step_cap_respected_in_random_trials():
    rng = np.random.default_rng(3)
    inst = random_general(rng, 7, 3)
    profile = RadiusProfile(tuple(sorted(rng.choice(inst.matrix.ravel(), 3), reverse=True)), 0.1)
    for t in range(300):
        try:
            run_trial(inst, profile, RandomChooser(np.random.default_rng(t)), debug=True)
        except TrialFailed:
            pass


def test_seed_determinism_and_permutation():
    rng = np.random.default_rng(11)
    inst = random_general(rng, 6, 2)
    a = solve_nonuniform(inst, 0.5, mode="rand", trials=200, seed=4)
    b = solve_nonuniform(inst, 0.5, mode="rand", trials=200, seed=4)
    assert a.balls == b.balls and a.assignment == b.assignment and a.trace == b.trace
    perm = rng.permutation(inst.n)
    m = inst.matrix[np.ix_(perm, perm)]
    other = Instance.general(m, [inst.capacities[p] for p in perm], inst.k)
    assert solve_nonuniform(other, 0.5).cost == pytest.approx(solve_nonuniform(inst, 0.5).cost)


def test_trace_replay_reproduces_trial():
    rng = np.random.default_rng(5)
    inst = random_general(rng, 6, 2)
    sol = solve_nonuniform(inst, 0.5, mode="rand", trials=300, seed=1)
    profile = RadiusProfile(sol.meta["profile"], 0.0)
    _, balls = run_trial(inst, profile, ReplayChooser(sol.trace))
    assert balls == sol.balls


def test_cost_monotone_in_budget():
    rng = np.random.default_rng(8)
    inst = random_general(rng, 6, 2)
    costs = []
    for budget in (200, 2000, None):
        try:
            costs.append(solve_nonuniform(inst, 0.5, trials=budget).cost)
        except Exception:
            costs.append(float("inf"))
    assert costs == sorted(costs, reverse=True)
