"""Brute-force ground truth over all 2^m register states.

The fast path walks each subcube in Gray order through the jitted flip
kernel; :func:`naive_energies` re-sums every state from scratch and exists
only to cross-check it. Satisfiability counts never look at energies.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .compiler import EnergyModel, total_energy
from .errors import TooLarge
from .formula import Assignment, Formula

DEFAULT_LIMIT = 24
BUCKET_TOL = 1e-9  # in units of D


@dataclass(frozen=True)
class Level:
    energy: float
    degeneracy: int


@dataclass
class SpectrumReport:
    m: int
    levels: list[Level]
    ground_energy: float
    ground_indices: np.ndarray = field(repr=False)
    energies: np.ndarray = field(repr=False)  # energies[x], x packs the assignment

    @property
    def ground_degeneracy(self) -> int:
        return len(self.ground_indices)

    @property
    def ground_assignments(self) -> list[Assignment]:
        return [Assignment.from_int(int(x), self.m) for x in self.ground_indices]

    def to_dict(self, max_ground: int | None = None) -> dict:
        idx = self.ground_indices if max_ground is None else self.ground_indices[:max_ground]
        return {
            "m": self.m,
            "levels": [{"energy": lv.energy, "degeneracy": lv.degeneracy} for lv in self.levels],
            "ground_energy": self.ground_energy,
            "ground_degeneracy": self.ground_degeneracy,
            "ground_assignments": [Assignment.from_int(int(x), self.m).to_str() for x in idx],
        }


@dataclass(frozen=True)
class EncodingReport:
    ok: bool
    sat_count: int
    ground_degeneracy: int
    min_unsat: int
    ground_energy: float = math.nan
    expected_ground_energy: float = math.nan

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "sat_count": self.sat_count,
            "ground_degeneracy": self.ground_degeneracy,
            "min_unsat": self.min_unsat,
            "ground_energy": self.ground_energy,
            "expected_ground_energy": self.expected_ground_energy,
        }


def _guard(m: int, limit: int) -> None:
    if m > limit:
        raise TooLarge(f"m={m} exceeds enumeration limit {limit}")


def all_energies(model: EnergyModel, workers: int = 1) -> np.ndarray:
    """Energy of every assignment, indexed by its packed integer.

    With ``workers > 1`` the cube is split on its high bits into prefix-fixed
    subcubes, each walked independently; the result does not depend on the
    split.
    """
    m = model.m
    prefix_bits = 0
    while (1 << prefix_bits) < workers and prefix_bits < m:
        prefix_bits += 1
    m_low = m - prefix_bits
    out = np.empty(1 << m, dtype=np.float64)
    lv = model.level_array()
    args = (model.lit_var, model.lit_neg, model.occ_ptr, model.occ_clause,
            model.occ_slot, lv)

    def walk(prefix: int) -> None:
        chunk = out[prefix << m_low:(prefix + 1) << m_low]
        _kernels.gray_walk(prefix, m_low, m, *args, chunk)

    if workers > 1 and prefix_bits:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(walk, range(1 << prefix_bits)))
    else:
        for p in range(1 << prefix_bits):
            walk(p)
    return out


def naive_energies(model: EnergyModel) -> np.ndarray:
    """Slow independent path: full resummation per assignment."""
    m = model.m
    return np.array([total_energy(model, Assignment.from_int(x, m)) for x in range(1 << m)])


def bucket_levels(energies: np.ndarray, tol: float) -> list[tuple[float, float, int]]:
    """Group sorted energies into levels; returns (anchor, upper, count).

    A level starts at its lowest energy and absorbs every value within ``tol``
    of that anchor.
    """
    vals, counts = np.unique(energies, return_counts=True)
    out: list[list] = []
    for v, c in zip(vals.tolist(), counts.tolist()):
        if out and v - out[-1][0] <= tol:
            out[-1][1] = v
            out[-1][2] += c
        else:
            out.append([v, v, c])
    return [tuple(x) for x in out]


def enumerate_spectrum(model: EnergyModel, limit: int = DEFAULT_LIMIT,
                       workers: int = 1) -> SpectrumReport:
    _guard(model.m, limit)
    energies = all_energies(model, workers)
    tol = BUCKET_TOL * model.solution.params.D
    groups = bucket_levels(energies, tol)
    ground, upper, _ = groups[0]
    levels = [Level(anchor, count) for anchor, _, count in groups]
    ground_idx = np.flatnonzero(energies <= upper)
    return SpectrumReport(model.m, levels, ground, ground_idx, energies)


def unsat_counts(f: Formula, limit: int = DEFAULT_LIMIT) -> np.ndarray:
    """Number of violated clauses for every assignment, by direct Boolean evaluation."""
    _guard(f.m, limit)
    xs = np.arange(1 << f.m, dtype=np.int64)
    bits = [((xs >> v) & 1).astype(bool) for v in range(f.m)]
    counts = np.zeros(1 << f.m, dtype=np.int32)
    for clause in f.clauses:
        # a clause fails only when every literal is false
        fail = np.ones(1 << f.m, dtype=bool)
        for lit in clause.lits:
            b = bits[lit.var - 1]
            fail &= b if lit.negated else ~b
        counts += fail
    return counts


def check_encoding(f: Formula, model: EnergyModel, limit: int = DEFAULT_LIMIT,
                   workers: int = 1) -> EncodingReport:
    """Does the ground set of the landscape coincide with the satisfying set?

    For unsatisfiable formulas the ground energy must instead equal
    ``e_floor + gap * min_unsat``.
    """
    _guard(f.m, limit)
    spec = enumerate_spectrum(model, limit, workers)
    unsat = unsat_counts(f, limit)
    sat_idx = np.flatnonzero(unsat == 0)
    min_unsat = int(unsat.min())
    expected = model.e_floor + model.gap * min_unsat
    if len(sat_idx):
        ok = np.array_equal(sat_idx, spec.ground_indices)
    else:
        ok = abs(spec.ground_energy - expected) <= model.energy_tolerance()
    return EncodingReport(bool(ok), len(sat_idx), spec.ground_degeneracy, min_unsat,
                          spec.ground_energy, expected)
