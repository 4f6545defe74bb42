"""Thermal relaxation of a compiled landscape by single-flip Metropolis moves.

Each step proposes a uniformly random variable, computes the energy change
through its occurrence list and accepts by the Metropolis rule at the current
temperature (Boltzmann constant 1, energies and temperatures in the same
units).

Randomness: a ``numpy.random.SeedSequence(seed)`` is split into three PCG64
streams (initial state, proposals, acceptance uniforms). Random numbers are
drawn in fixed blocks, so a run truncated after ``k`` steps is an exact prefix
of a longer run with the same seed.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import _kernels as K
from .compiler import EnergyModel
from .errors import MissingTarget
from .formula import Assignment

BLOCK = 1 << 14


@dataclass(frozen=True)
class Constant:
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"temperature must be positive, got {self.T}")

    def temperature(self, step: int) -> float:
        return self.T

    def _kernel_args(self):
        return self.T, 1.0, 1


@dataclass(frozen=True)
class Geometric:
    T0: float
    ratio: float
    stage_length: int

    def __post_init__(self):
        if not self.T0 > 0:
            raise ValueError(f"T0 must be positive, got {self.T0}")
        if not 0 < self.ratio < 1:
            raise ValueError(f"ratio must lie in (0, 1), got {self.ratio}")
        if self.stage_length < 1:
            raise ValueError(f"stage_length must be >= 1, got {self.stage_length}")

    def temperature(self, step: int) -> float:
        """Temperature used for the step with 0-based index ``step``."""
        return self.T0 * self.ratio ** (step // self.stage_length)

    def _kernel_args(self):
        return self.T0, self.ratio, self.stage_length


Schedule = Constant | Geometric


def default_schedule(model: EnergyModel) -> Geometric:
    return Geometric(2.0 * model.gap, 0.97, 10 * model.m)


def parse_schedule(text: str) -> Schedule:
    """``const:T`` or ``geo:T0,r,stage``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            return Constant(float(rest))
        if kind == "geo":
            t0, r, stage = rest.split(",")
            return Geometric(float(t0), float(r), int(stage))
    except ValueError as exc:
        raise ValueError(f"bad schedule {text!r}: {exc}") from None
    raise ValueError(f"bad schedule {text!r}; use const:T or geo:T0,r,stage")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    max_steps: int = 10**6
    target_energy: float | None = None
    record_every: int = 1000

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class RunResult:
    seed: int
    best_energy: float
    best_assignment: Assignment
    steps_to_target: int | None
    trace: list[tuple[int, float]]
    accept_count: int
    reject_count: int
    final_energy: float
    final_assignment: Assignment
    steps: int
    uphill_proposed: int = 0
    uphill_accepted: int = 0

    @property
    def reached(self) -> bool:
        return self.steps_to_target is not None

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "best_energy": self.best_energy,
            "steps_to_target": self.steps_to_target,
            "accepts": self.accept_count,
            "rejects": self.reject_count,
        }

    def trace_csv(self) -> str:
        return "step,energy\n" + "".join(f"{s},{e!r}\n" for s, e in self.trace)


@dataclass
class RestartReport:
    success_rate: float
    median_steps_to_target: float | None
    per_run: list[RunResult] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "success_rate": self.success_rate,
            "median_steps_to_target": self.median_steps_to_target,
            "per_run": [r.summary() for r in self.per_run],
        }


def _streams(seed: int):
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF)
    return [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(3)]


def metropolis_run(model: EnergyModel, cfg: RunConfig, sch: Schedule | None = None,
                   initial: Sequence[int] | None = None) -> RunResult:
    """One annealing run; stops at ``cfg.max_steps`` or on reaching the target.

    ``initial`` overrides the random starting state (the seeded initial-state
    stream is still created, so proposals are unaffected). The target counts
    as reached when the energy is within ``model.energy_tolerance()`` of it.
    """
    if sch is None:
        sch = default_schedule(model)
    m = model.m
    rng_init, rng_prop, rng_acc = _streams(cfg.seed)
    x0 = rng_init.integers(0, 2, size=m, dtype=np.int8)
    if initial is not None:
        if len(initial) != m:
            raise ValueError(f"initial state has length {len(initial)}, need {m}")
        x0 = np.array([int(bool(b)) for b in initial], dtype=np.int8)

    x = x0.copy()
    tc = K.true_counts(x, model.lit_var, model.lit_neg)
    lv = model.level_array()
    energy = math.fsum(lv[tc].tolist())
    best_x = x.copy()
    fstate = np.array([energy, energy])
    istate = np.zeros(8, dtype=np.int64)
    istate[K.HIT] = -1

    if cfg.target_energy is None:
        target = -np.inf
    else:
        target = cfg.target_energy + model.energy_tolerance()
    trace: list[tuple[int, float]] = [(0, energy)]
    if energy <= target:
        istate[K.HIT] = 0
        istate[K.DONE] = 1
    T0, ratio, stage = sch._kernel_args()

    while not istate[K.DONE]:
        props = rng_prop.integers(0, m, size=BLOCK, dtype=np.int64)
        unif = rng_acc.random(BLOCK)
        tsteps = np.empty(BLOCK // cfg.record_every + 2, dtype=np.int64)
        tvals = np.empty(len(tsteps))
        istate[K.NTRACE] = 0
        K.metropolis_block(props, unif, cfg.max_steps, x, tc, best_x, fstate, istate,
                           model.lit_neg, model.occ_ptr, model.occ_clause, model.occ_slot,
                           lv, T0, ratio, stage, target, cfg.record_every, tsteps, tvals)
        k = istate[K.NTRACE]
        trace.extend(zip(tsteps[:k].tolist(), tvals[:k].tolist()))

    hit = int(istate[K.HIT])
    return RunResult(
        seed=cfg.seed,
        best_energy=float(fstate[1]),
        best_assignment=Assignment(tuple(best_x.tolist())),
        steps_to_target=hit if hit >= 0 else None,
        trace=trace,
        accept_count=int(istate[K.ACCEPTS]),
        reject_count=int(istate[K.REJECTS]),
        final_energy=float(fstate[0]),
        final_assignment=Assignment(tuple(x.tolist())),
        steps=int(istate[K.STEP]),
        uphill_proposed=int(istate[K.UP_PROPOSED]),
        uphill_accepted=int(istate[K.UP_ACCEPTED]),
    )


def multi_restart(model: EnergyModel, restarts: int, cfg_template: RunConfig,
                  sch: Schedule | None = None, workers: int = 1) -> RestartReport:
    """Independent runs with seeds ``cfg_template.seed + i``, i = 0..restarts-1."""
    if cfg_template.target_energy is None:
        raise MissingTarget("multi_restart needs cfg_template.target_energy")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    cfgs = [replace(cfg_template, seed=cfg_template.seed + i) for i in range(restarts)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            runs = list(ex.map(lambda c: metropolis_run(model, c, sch), cfgs))
    else:
        runs = [metropolis_run(model, c, sch) for c in cfgs]
    hits = [r.steps_to_target for r in runs if r.reached]
    return RestartReport(
        success_rate=len(hits) / restarts,
        median_steps_to_target=statistics.median(hits) if hits else None,
        per_run=runs,
    )
