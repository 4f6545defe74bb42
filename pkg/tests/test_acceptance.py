"""Exit criteria for the package, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line that is printed in the pytest
terminal summary (see conftest). Tolerances are fixed here, not tuned.
"""

import dataclasses
import itertools
import json
import math
import random
import statistics
import time

import numpy as np
import pytest
from scipy import ndimage

from tailorsat import ce3, compiler, dynamics, oracle
from tailorsat.ce3 import levels
from tailorsat.compiler import flip_delta, total_energy
from tailorsat._kernels import metropolis_accept
from tailorsat.formula import Formula, evaluate, gen_random, parse_dimacs

from .conftest import ACCEPTANCE_LINES, TWO_CLAUSE_CNF, all_patterns_formula

D = 1.0


def record(label: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="module")
def region():
    t0 = time.perf_counter()
    grid = ce3.scan_region(0.01, 1.0, 0.1, 3.0, 100, 100, gap_min=0.2)
    return grid, time.perf_counter() - t0


def test_c1_tailoring_condition(region):
    grid, elapsed = region
    worst_degen, worst_gap, feasible = 0.0, math.inf, 0
    for row in grid.cells:
        for cell in row:
            if cell.feasible:
                feasible += 1
                u = levels(cell.best.params)
                worst_degen = max(worst_degen, abs(u[1] - u[2]), abs(u[2] - u[3]))
                worst_gap = min(worst_gap, u[0] - u[1])
    ok = feasible > 0 and worst_degen <= 1e-9 * D and worst_gap >= 0.2 * D and elapsed < 10.0
    record("C1 tailoring U1=U2=U3<=U0-0.2D", ok,
           f"{feasible} feasible cells, max spread {worst_degen:.2e}, min gap {worst_gap:.4f}, "
           f"scan {elapsed:.2f}s")
    assert ok


def _second_difference_max(f: float) -> float:
    # independent of the package: dense grid around E = F of the raw radicals
    E = np.linspace(f - 50.0, f + 50.0, 400001)
    r = lambda s: np.sqrt(D * D + (E + f * s) ** 2)  # noqa: E731
    return float(np.max(r(1) - 2 * r(-1) + r(-3)))


def test_c2_region_shape(region):
    grid, _ = region
    mask = grid.feasible
    labels, ncomp = ndimage.label(mask)  # 4-connectivity by default
    frac = mask.mean()
    i, j = grid.nearest(0.3, 1.0)
    inside = True
    for jj, f in enumerate(grid.f_axis):
        b_max = _second_difference_max(f) / 4.0
        col = mask[:, jj]
        inside &= bool(np.all((grid.b_axis[col] > 0) & (grid.b_axis[col] < b_max)))
    ok = ncomp == 1 and frac >= 0.05 and bool(mask[i, j]) and inside
    record("C2 feasibility region", ok,
           f"{ncomp} component(s), coverage {frac:.1%}, cell nearest (0.3,1.0) = "
           f"({grid.b_axis[i]:.3f},{grid.f_axis[j]:.3f}) feasible={bool(mask[i, j])}, "
           f"inside analytic bound={inside}")
    assert ok


def test_c3_ground_state_encoding():
    rng = random.Random(2024)
    sol = ce3.best_solution(ce3.solve(0.3, D, 1.0))
    t0 = time.perf_counter()
    cases = [parse_dimacs(TWO_CLAUSE_CNF), all_patterns_formula()]
    for k in range(200):
        m = rng.randint(3, 12)
        cases.append(gen_random(m, rng.randint(1, 5 * m), 10_000 + k))
    failures = 0
    unsat = 0
    for f in cases:
        rep = oracle.check_encoding(f, compiler.compile(f, sol))
        failures += not rep.ok
        unsat += rep.sat_count == 0
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60.0
    record("C3 ground state <=> satisfied", ok,
           f"{len(cases)} instances ({unsat} unsatisfiable), {failures} failures, {elapsed:.1f}s")
    assert ok


def test_c4_two_clause_example():
    f = parse_dimacs(TWO_CLAUSE_CNF)
    sat = sum(evaluate(f, a).satisfied for a in itertools.product((0, 1), repeat=4))
    model = compiler.compile(f, ce3.best_solution(ce3.solve(0.3, D, 1.0)))
    spec = oracle.enumerate_spectrum(model)
    degs = [lv.degeneracy for lv in spec.levels]
    split = spec.levels[1].energy - spec.levels[0].energy if len(spec.levels) > 1 else math.nan
    ok = (sat == 12 and degs == [12, 4]
          and abs(split - model.gap) <= 1e-9 * model.n * D)
    record("C4 two-clause example spectrum", ok,
           f"{sat} satisfying, degeneracies {degs}, split-gap {split - model.gap:.1e}")
    assert ok


def test_c5_affine_law():
    rng = random.Random(77)
    sol = ce3.best_solution(ce3.solve(0.3, D, 1.0))
    worst_affine = worst_flip = 0.0
    models = {}
    for _ in range(10_000):
        key = rng.randrange(200)
        if key not in models:
            m = 3 + key % 18
            f = gen_random(m, 1 + (key * 7919) % (5 * m), key)
            models[key] = compiler.compile(f, sol)
        model = models[key]
        f = model.formula
        a = [rng.randint(0, 1) for _ in range(f.m)]
        e = total_energy(model, a)
        u = evaluate(f, a).unsat_count
        worst_affine = max(worst_affine, abs(e - model.e_floor - model.gap * u) / (f.n * D))
        v = rng.randint(1, f.m)
        b = list(a)
        b[v - 1] ^= 1
        touched = max(len(model.occurrence[v - 1]), 1)
        err = abs(flip_delta(model, a, v) - (total_energy(model, b) - e))
        worst_flip = max(worst_flip, err / (touched * D))
    ok = worst_affine <= 1e-9 and worst_flip <= 1e-12
    record("C5 affine law + flip_delta", ok,
           f"10^4 pairs, max affine err {worst_affine:.1e}*n*D, max flip err "
           f"{worst_flip:.1e}*touched*D")
    assert ok


def test_c6_metropolis_correctness():
    # downhill: every non-uphill proposal must be accepted
    single = Formula.from_ints(3, [(1, 2, 3)])
    sol = ce3.best_solution(ce3.solve(0.3, D, 1.0))
    # levels snapped so every uphill proposal costs exactly d = 1
    model = dataclasses.replace(compiler.compile(single, sol), levels=(1.0, 0.0, 0.0, 0.0))
    # ten fixed seeds pooled into one binomial sample
    runs = [dynamics.metropolis_run(model, dynamics.RunConfig(seed=s, max_steps=1_000_000),
                                    dynamics.Constant(1.0)) for s in range(10)]
    downhill_ok = all(r.accept_count - r.uphill_accepted
                      == (r.accept_count + r.reject_count) - r.uphill_proposed for r in runs)
    trials = sum(r.uphill_proposed for r in runs)
    accepted = sum(r.uphill_accepted for r in runs)
    p = math.exp(-1.0)
    engine_dev = abs(accepted / trials - p) / math.sqrt(p * (1 - p) / trials)
    # rule in isolation at another (d, T)
    rng = np.random.default_rng(6)
    d, T = 0.7, 0.5
    u = rng.random(100_000)
    acc = sum(metropolis_accept(d, T, x) for x in u) / len(u)
    q = math.exp(-d / T)
    rule_dev = abs(acc - q) / math.sqrt(q * (1 - q) / len(u))
    downhill_ok &= all(metropolis_accept(-x, T, 0.999999) for x in (0.0, 1e-3, 5.0))
    # byte-exact determinism
    f = gen_random(20, 80, 5)
    m2 = compiler.compile(f, sol)
    cfg = dynamics.RunConfig(seed=2**63 + 17, max_steps=200_000, record_every=50)
    a, b = dynamics.metropolis_run(m2, cfg), dynamics.metropolis_run(m2, cfg)
    blob = lambda r: (json.dumps(r.summary()) + r.trace_csv()).encode()  # noqa: E731
    det = blob(a) == blob(b) and a.best_assignment == b.best_assignment
    ok = downhill_ok and trials >= 100_000 and engine_dev <= 3 and rule_dev <= 3 and det
    record("C6 Metropolis", ok,
           f"downhill always accepted={downhill_ok}, engine {trials} uphill trials "
           f"at {engine_dev:.2f} sigma, rule 1e5 trials at {rule_dev:.2f} sigma, "
           f"deterministic={det}")
    assert ok


def _satisfiable_instances(m, n, count, seed0):
    out, seed = [], seed0
    while len(out) < count:
        f = gen_random(m, n, seed)
        seed += 1
        if (oracle.unsat_counts(f) == 0).any():
            out.append(f)
    return out


def _relax(instances, sol):
    runs = []
    for f in instances:
        model = compiler.compile(f, sol)
        rep = dynamics.multi_restart(
            model, 20, dynamics.RunConfig(seed=0, max_steps=10**6, target_energy=model.e_floor,
                                          record_every=10**6),
            workers=4)
        for r in rep.per_run:
            if r.reached:
                assert evaluate(f, r.best_assignment).satisfied
        runs += rep.per_run
    hits = [r.steps_to_target for r in runs if r.reached]
    return len(hits) / len(runs), (statistics.median(hits) if hits else None), len(runs)


@pytest.mark.slow
def test_c7_relaxation_harness():
    sol = ce3.best_solution(ce3.solve(0.3, D, 1.0))
    rate40, med40, runs40 = _relax(_satisfiable_instances(20, 40, 20, 0), sol)
    ok = rate40 >= 0.9
    record("C7 relaxation m=20 n=40", ok,
           f"{runs40} runs, success {rate40:.1%}, median steps to ground {med40}")
    # recorded only: ratio 4.0 shows the slowdown
    rate80, med80, runs80 = _relax(_satisfiable_instances(20, 80, 20, 0), sol)
    record("C7 relaxation m=20 n=80 (recorded, not asserted)", True,
           f"{runs80} runs, success {rate80:.1%}, median steps to ground {med80}")
    assert ok
