"""Acceptance criteria, one test per criterion (criterion 9 is split by property).

Each test prints a ``[PASS]``/``[FAIL]`` line with the measured numbers; the
lines are also collected into the pytest terminal summary.
"""
import time

import numpy as np
import pytest

from perchopt.constrained import (
    cantilever_problem,
    gear_train_exhaustive_oracle,
    gear_train_problem,
    three_bar_truss_problem,
)
from perchopt.core import DerivedEta, EpoConfig, SearchSpace, iterate, run
from perchopt.harness import (
    ExperimentPlan,
    ExperimentStats,
    convergence_probability_study,
    eta_sweep,
    first_reach,
    run_experiment,
)
from perchopt.objectives import make_objective

pytestmark = pytest.mark.acceptance

DEFAULTS = EpoConfig()


def test_c1_sphere_dim30_quality(criterion):
    start = time.perf_counter()
    result = run_experiment(ExperimentPlan("F1", DEFAULTS, runs=30, base_seed=1, dims=30))
    wall = time.perf_counter() - start
    s = result.stats
    ok = s.y_median <= 1e-12 and s.y_min <= 1e-20 and wall <= 60
    criterion("1", ok, f"F1 dim 30: median {s.y_median:.3e} (<= 1e-12), best {s.y_min:.3e} (<= 1e-20), "
                       f"{wall:.1f} s (<= 60 s)")


def test_c2_g1_exactness(criterion):
    result = run_experiment(ExperimentPlan("g1", DEFAULTS, runs=30, base_seed=2, dims=4))
    worst_coord = max(float(np.max(np.abs(r.x_best + 2.0))) for r in result.records)
    avg = result.stats.y_avg
    ok = 2.0 <= avg <= 2.0 + 1e-6 and worst_coord <= 1e-3
    criterion("2", ok, f"g1 dim 4: avg {avg!r} in [2, 2+1e-6], max |x_j + 2| {worst_coord:.3e} (<= 1e-3)")


def test_c3_elite_averaging_trend(criterion):
    start = time.perf_counter()
    avgs = {}
    for n in (2, 10):
        plan = ExperimentPlan("g3", DEFAULTS.replace(elite_count=n), runs=30, base_seed=3, dims=4)
        avgs[n] = run_experiment(plan).stats.y_avg
    wall = time.perf_counter() - start
    ok = avgs[2] * 1e6 <= avgs[10] and wall <= 300
    criterion("3", ok, f"g3 dim 4: avg n=2 {avgs[2]:.3e}, n=10 {avgs[10]:.3e} "
                       f"(need >= 6 orders apart), {wall:.1f} s (<= 300 s)")


def test_c4_ackley_dim2(criterion):
    result = run_experiment(ExperimentPlan("F10", DEFAULTS, runs=30, base_seed=4, dims=2))
    med = result.stats.y_median
    criterion("4", med <= 1e-6, f"F10 dim 2: median {med:.3e} (<= 1e-6)")


def _constrained(problem, runs, base_seed):
    start = time.perf_counter()
    result = run_experiment(ExperimentPlan(problem, DEFAULTS, runs=runs, base_seed=base_seed))
    return result, time.perf_counter() - start


def test_c5_cantilever(criterion):
    problem = cantilever_problem()
    result, wall = _constrained(problem, 10, 5)
    best = min(r.final_y_best for r in result.records)
    worst_violation = max(problem.max_violation(r.x_best) for r in result.records)
    ok = 13.30 <= best <= 13.50 and worst_violation <= 1e-6 and wall <= 30
    criterion("5", ok, f"cantilever: best {best:.6f} in [13.30, 13.50], max violation "
                       f"{worst_violation:.2e} (<= 1e-6), {wall:.1f} s (<= 30 s)")


def test_c6_three_bar_truss(criterion):
    problem = three_bar_truss_problem(l=1.0, P=2.0, sigma=2.0)
    result, _ = _constrained(problem, 10, 6)
    feasible = [r.final_y_best for r in result.records if problem.is_feasible(r.x_best)]
    best = min(feasible) if feasible else float("inf")
    criterion("6", 2.6389 <= best <= 2.66, f"three-bar truss: best feasible {best:.6f} in [2.6389, 2.66]")


def test_c7_gear_train(criterion):
    value, tuples = gear_train_exhaustive_oracle()
    result, _ = _constrained(gear_train_problem(), 10, 7)
    hits = sum(r.final_y_best <= 1e-8 for r in result.records)
    ok = abs(value - 2.7009e-12) <= 1e-15 and (49, 19, 16, 43) in tuples and hits >= 5
    criterion("7", ok, f"gear train: oracle {value:.6e} (2.7009e-12 +- 1e-15), "
                       f"(49,19,16,43) attaining: {(49, 19, 16, 43) in tuples}, "
                       f"EPO runs <= 1e-8: {hits}/10 (>= 5)")


def test_c8_eta_sensitivity(criterion):
    config = DEFAULTS.replace(l_scale0=100.0, res=0.05)
    constant, ramp = eta_sweep("F1", config, [(0.9, 0.9), (0.9, 0.8)], runs=1, base_seed=8, dims=2)
    level = constant.median_trace[500]
    hit = first_reach(ramp.median_trace, level)
    ok = hit is not None and hit <= 200
    criterion("8", ok, f"F1 dim 2: constant-eta level at t=500 {level:.3e}; 0.9->0.8 reaches it at "
                       f"t={hit} (<= 200)")


# criterion 9: property suites

def _random_config(rng):
    schedule = DerivedEta() if rng.random() < 0.5 else None
    kw = dict(
        particles=int(rng.integers(1, 12)),
        iterations=int(rng.integers(1, 60)),
        l_scale0=float(rng.uniform(0.5, 50.0)),
        elite_count=0,
        shrink_mode=str(rng.choice(["every", "improvement"])),
        perturb_center=str(rng.choice(["best", "self"])),
        perturb_dist=str(rng.choice(["uniform", "gaussian"])),
        scale_offset=float(rng.choice([0.0, rng.uniform(0, 0.5)])),
        seed=int(rng.integers(0, 2**63)),
    )
    kw["res"] = float(kw["l_scale0"] * rng.uniform(1e-4, 0.5))
    kw["elite_count"] = int(rng.integers(0, kw["particles"] + 1))
    if schedule is not None:
        kw["eta_schedule"] = schedule
    return EpoConfig(**kw)


def test_c9a_monotone_traces(criterion):
    rng = np.random.default_rng(90)
    names = ["F1", "F5", "F8", "F9", "g4", "g6"]
    bad = 0
    for i in range(100):
        config = _random_config(rng)
        obj = make_objective(names[i % len(names)], int(rng.integers(2, 6)))
        trace = run(config, obj.space, obj).trace[:, 1]
        bad += bool(np.any(np.diff(trace) > 0))
    criterion("9a", bad == 0, f"monotone y_best traces: {100 - bad}/100 random configs")


def test_c9b_scale_reaches_resolution(criterion):
    worst = 0.0
    for res, l0, ts in [(0.05, 500.0, 500), (1e-3, 10.0, 37), (0.5, 2.0, 3), (1e-6, 100.0, 1000)]:
        config = EpoConfig(particles=3, iterations=ts, l_scale0=l0, res=res, eta_schedule=DerivedEta(), seed=9)
        obj = make_objective("F1", 2)
        final = run(config, obj.space, obj).trace[-1, 2]
        worst = max(worst, abs(final - res) / res)
    criterion("9b", worst <= 1e-9, f"l_scale(t_s) = res: worst relative error {worst:.2e} (<= 1e-9)")


def test_c9c_clamping_every_step(criterion):
    rng = np.random.default_rng(91)
    violations = 0
    steps = 0
    for _ in range(30):
        config = _random_config(rng).replace(l_scale0=1e3, res=1.0)
        obj = make_objective("F9", 3)
        space = obj.space
        for state, _ in iterate(config, space, obj):
            steps += 1
            violations += not space.contains(state.positions)
    criterion("9c", violations == 0, f"positions inside the box after {steps} steps: {violations} violations")


def test_c9d_same_seed_identical(criterion):
    obj = make_objective("F8", 5)
    config = DEFAULTS.replace(iterations=200, seed=1234)
    a = run(config, obj.space, obj).trace
    b = run(config, obj.space, obj).trace
    differing = sum(
        not np.array_equal(run(config.replace(seed=s), obj.space, obj).trace,
                           run(config.replace(seed=s + 1), obj.space, obj).trace)
        for s in range(10)
    )
    ok = np.array_equal(a, b) and differing == 10
    criterion("9d", ok, f"same seed bit-identical: {np.array_equal(a, b)}; distinct seed pairs differing: "
                        f"{differing}/10")


def test_c9e_elite_one_identity(criterion):
    same = 0
    for s in range(10):
        obj = make_objective("F5", 4)
        base = DEFAULTS.replace(iterations=150, seed=s)
        r0 = run(base, obj.space, obj)
        r1 = run(base.replace(elite_count=1), obj.space, obj)
        same += np.array_equal(r0.trace, r1.trace) and r1.evaluations == r0.evaluations + base.iterations
    criterion("9e", same == 10, f"elite_count=1 trace identical to elite_count=0: {same}/10 seeds")


def test_c9f_statistics_oracle(criterion):
    result = run_experiment(ExperimentPlan("F4", DEFAULTS.replace(iterations=50), runs=7, base_seed=11, dims=3))
    ys = [r.final_y_best for r in result.records]
    mean = 0.0
    for y in ys:
        mean += y
    mean /= len(ys)
    var = 0.0
    for y in ys:
        var += (y - mean) ** 2
    std = (var / len(ys)) ** 0.5
    s = result.stats
    ok = s.y_avg == pytest.approx(mean, rel=1e-12) and s.y_std == pytest.approx(std, rel=1e-12, abs=1e-300)
    rebuilt = ExperimentStats.from_records(result.records)
    criterion("9f", ok and rebuilt == s, f"avg {s.y_avg:.6e} vs two-pass {mean:.6e}; std {s.y_std:.6e} "
                                        f"vs two-pass {std:.6e}")


def test_c9g_convergence_study(criterion):
    rates = convergence_probability_study("F1", 0.5, [50, 150, 500], trials=100, base_seed=12,
                                          space=SearchSpace.box(2, -100.0, 100.0))
    r50, r150, r500 = rates[50], rates[150], rates[500]
    ok = r50 <= r150 <= r500 and r500 >= 0.95 >= r50
    criterion("9g", ok, f"2-D sphere, delta 0.5, 100 trials: rate(50)={r50:.2f}, rate(150)={r150:.2f}, "
                        f"rate(500)={r500:.2f} (non-decreasing, rate(500) >= 0.95 >= rate(50))")
