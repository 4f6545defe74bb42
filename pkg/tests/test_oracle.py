import itertools
import json

import numpy as np
import pytest

from tailorsat import compiler, oracle
from tailorsat.ce3 import solve
from tailorsat.errors import NoSolution, TooLarge
from tailorsat.formula import Assignment, Formula, evaluate, gen_random


def test_example_spectrum(example_model):
    rep = oracle.enumerate_spectrum(example_model)
    assert [lv.degeneracy for lv in rep.levels] == [12, 4]
    assert rep.ground_energy == pytest.approx(example_model.e_floor, abs=1e-12)
    assert rep.levels[1].energy - rep.levels[0].energy == pytest.approx(example_model.gap, abs=1e-12)
    sat = {a for a in itertools.product((0, 1), repeat=4) if evaluate(example_model.formula, a).satisfied}
    assert {a.bits for a in rep.ground_assignments} == sat
    assert sum(lv.degeneracy for lv in rep.levels) == 16


def test_patterns_spectrum(patterns, solution):
    model = compiler.compile(patterns, solution)
    rep = oracle.enumerate_spectrum(model)
    assert len(rep.levels) == 1
    assert rep.levels[0].degeneracy == 8
    assert rep.ground_energy == pytest.approx(8 * solution.u_sat + solution.gap, abs=8e-9)


def test_empty_model_spectrum(solution):
    model = compiler.compile(Formula(5, ()), solution)
    rep = oracle.enumerate_spectrum(model)
    assert [(lv.energy, lv.degeneracy) for lv in rep.levels] == [(0.0, 32)]


def test_too_large(solution):
    model = compiler.compile(gen_random(13, 20, 0), solution)
    with pytest.raises(TooLarge):
        oracle.enumerate_spectrum(model, limit=12)
    with pytest.raises(TooLarge):
        oracle.check_encoding(model.formula, model, limit=12)


@pytest.mark.parametrize("seed", range(8))
def test_gray_walk_matches_naive(seed, solution):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 11))
    f = gen_random(m, int(rng.integers(1, 5 * m + 1)), seed)
    model = compiler.compile(f, solution)
    fast = oracle.all_energies(model)
    slow = oracle.naive_energies(model)
    assert np.max(np.abs(fast - slow)) <= 1e-9 * f.n


def test_partitioned_walk_is_identical(solution):
    model = compiler.compile(gen_random(14, 50, 1), solution)
    serial = oracle.all_energies(model)
    for w in (2, 3, 8):
        assert np.array_equal(oracle.all_energies(model, workers=w), serial)


def test_unsat_counts_match_evaluate():
    f = gen_random(8, 30, 4)
    counts = oracle.unsat_counts(f)
    for x in range(1 << 8):
        assert counts[x] == evaluate(f, Assignment.from_int(x, 8)).unsat_count


def test_check_encoding_examples(example, patterns, single, solution):
    def rep(f):
        r = oracle.check_encoding(f, compiler.compile(f, solution))
        return r.ok, r.sat_count, r.ground_degeneracy, r.min_unsat

    assert rep(example) == (True, 12, 12, 0)
    assert rep(patterns) == (True, 0, 8, 1)
    assert rep(single) == (True, 7, 7, 0)


def test_check_encoding_random_solutions():
    # randomized feasible solver outputs on random instances
    rng = np.random.default_rng(5)
    done = 0
    while done < 15:
        B, F = rng.uniform(0.01, 1.0), rng.uniform(0.1, 3.0)
        try:
            sol = solve(B, 1.0, F)[0]
        except NoSolution:
            continue
        m = int(rng.integers(3, 11))
        f = gen_random(m, int(rng.integers(1, 5 * m + 1)), int(rng.integers(1 << 32)))
        assert oracle.check_encoding(f, compiler.compile(f, sol)).ok
        done += 1


def test_report_json(example_model):
    d = json.loads(json.dumps(oracle.enumerate_spectrum(example_model).to_dict(max_ground=3)))
    assert d["ground_degeneracy"] == 12
    assert len(d["ground_assignments"]) == 3
    assert all(len(s) == 4 and set(s) <= {"0", "1"} for s in d["ground_assignments"])
    for s in d["ground_assignments"]:
        assert evaluate(example_model.formula, Assignment.from_str(s)).satisfied
