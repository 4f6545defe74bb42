"""Compile a 3SAT formula into a search-machine netlist and an energy landscape.

Register wires, transmission branches and inverters are treated as exact
degeneracy preservers and contribute no energy; every clause is served by an
identical 3CE whose level depends only on the clause class.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ce3 import DEFAULT_GAP_MIN, DEGENERACY_TOL, CE3Solution, levels
from .errors import IndexOutOfRange, InvalidSolution, LengthMismatch
from .formula import Formula, clause_class


# netlist ------------------------------------------------------------------


@dataclass(frozen=True)
class RegisterWire:
    var: int
    fanout: int


@dataclass(frozen=True)
class Branch:
    clause_index: int  # 1-based, like slot
    slot: int
    source_var: int
    inverter: bool


@dataclass(frozen=True)
class CE3Node:
    clause_index: int
    branches: tuple[int, int, int]  # indices into Netlist.branches


@dataclass(frozen=True)
class Netlist:
    m: int
    register_wires: tuple[RegisterWire, ...]
    branches: tuple[Branch, ...]
    ce3_nodes: tuple[CE3Node, ...]

    @property
    def n(self) -> int:
        return len(self.ce3_nodes)

    @property
    def inverter_count(self) -> int:
        return sum(b.inverter for b in self.branches)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "branches": [
                {"clause": b.clause_index, "slot": b.slot, "var": b.source_var,
                 "inverter": b.inverter}
                for b in self.branches
            ],
            "fanout": [w.fanout for w in self.register_wires],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def build_netlist(f: Formula) -> Netlist:
    branches = []
    nodes = []
    fanout = [0] * f.m
    for ci, clause in enumerate(f.clauses, 1):
        ids = []
        for slot, lit in enumerate(clause.lits, 1):
            ids.append(len(branches))
            branches.append(Branch(ci, slot, lit.var, lit.negated))
            fanout[lit.var - 1] += 1
        nodes.append(CE3Node(ci, tuple(ids)))
    wires = tuple(RegisterWire(v + 1, k) for v, k in enumerate(fanout))
    return Netlist(f.m, wires, tuple(branches), tuple(nodes))


# energy model -------------------------------------------------------------


@dataclass(frozen=True)
class EnergyModel:
    """Compiled landscape; immutable and safe to share between workers.

    ``occurrence[v]`` lists ``(clause_index, slot)`` pairs (both 0-based) for
    variable ``v + 1``. ``levels[k]`` is the 3CE energy of a clause in class
    ``k``. The flat numpy arrays mirror the same data for the jitted kernels.
    """

    formula: Formula
    solution: CE3Solution
    occurrence: tuple[tuple[tuple[int, int], ...], ...]
    levels: tuple[float, float, float, float]
    e_floor: float
    lit_var: np.ndarray = field(repr=False)  # (n, 3) 0-based variable
    lit_neg: np.ndarray = field(repr=False)  # (n, 3) 1 if negated
    occ_ptr: np.ndarray = field(repr=False)  # CSR offsets, length m + 1
    occ_clause: np.ndarray = field(repr=False)
    occ_slot: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.formula.m

    @property
    def n(self) -> int:
        return self.formula.n

    @property
    def gap(self) -> float:
        return self.levels[0] - self.levels[1]

    @property
    def u_sat(self) -> float:
        return self.levels[1]

    def level_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.float64)

    def energy_tolerance(self) -> float:
        """Slack for comparing sums of clause levels, 1e-9 * n * D."""
        return DEGENERACY_TOL * max(self.n, 1) * self.solution.params.D


def compile(f: Formula, s: CE3Solution, gap_min: float | None = None) -> EnergyModel:  # noqa: A001
    """Attach one tailored 3CE to every clause of ``f``.

    The solution's level energies are recomputed from its parameters; stale or
    hand-edited ``u_sat``/``gap`` fields are not trusted.
    """
    p = s.params
    if gap_min is None:
        gap_min = DEFAULT_GAP_MIN * p.D
    u = levels(p)
    degen = max(abs(u[1] - u[2]), abs(u[2] - u[3]))
    if degen > DEGENERACY_TOL * p.D:
        raise InvalidSolution(f"satisfied levels not degenerate: spread {degen:.3g} > 1e-9 D")
    if u[0] - u[1] < gap_min:
        raise InvalidSolution(f"gap {u[0] - u[1]:.6g} below required minimum {gap_min:.6g}")
    s = CE3Solution.from_params(p)

    occ: list[list[tuple[int, int]]] = [[] for _ in range(f.m)]
    lit_var = np.zeros((f.n, 3), dtype=np.int64)
    lit_neg = np.zeros((f.n, 3), dtype=np.int8)
    for ci, clause in enumerate(f.clauses):
        for slot, lit in enumerate(clause.lits):
            occ[lit.var - 1].append((ci, slot))
            lit_var[ci, slot] = lit.var - 1
            lit_neg[ci, slot] = lit.negated
    ptr = np.zeros(f.m + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(o) for o in occ])
    flat = [pair for o in occ for pair in o]
    occ_clause = np.array([c for c, _ in flat], dtype=np.int64)
    occ_slot = np.array([sl for _, sl in flat], dtype=np.int64)

    return EnergyModel(
        formula=f,
        solution=s,
        occurrence=tuple(tuple(o) for o in occ),
        levels=u,
        e_floor=f.n * u[1],
        lit_var=lit_var,
        lit_neg=lit_neg,
        occ_ptr=ptr,
        occ_clause=occ_clause,
        occ_slot=occ_slot,
    )


def _check(model: EnergyModel, a: Sequence[int]) -> None:
    if len(a) != model.m:
        raise LengthMismatch(f"assignment has length {len(a)}, model has m={model.m}")


def total_energy(model: EnergyModel, a: Sequence[int]) -> float:
    """Sum of clause 3CE levels under ``a`` (compensated summation)."""
    _check(model, a)
    lv = model.levels
    return math.fsum(lv[clause_class(c, a)] for c in model.formula.clauses)


def flip_delta(model: EnergyModel, a: Sequence[int], v: int) -> float:
    """Energy change from flipping variable ``v`` (1-based); ``a`` is untouched.

    Only the clauses listed in ``occurrence[v - 1]`` are visited.
    """
    _check(model, a)
    if not 1 <= v <= model.m:
        raise IndexOutOfRange(f"variable {v} outside 1..{model.m}")
    lv = model.levels
    clauses = model.formula.clauses
    terms = []
    for ci, slot in model.occurrence[v - 1]:
        c = clauses[ci]
        k = clause_class(c, a)
        # the flipped literal was true -> one fewer true literal, else one more
        k_new = k - 1 if c.lits[slot].value(a) else k + 1
        terms.append(lv[k_new])
        terms.append(-lv[k])
    return math.fsum(terms)
