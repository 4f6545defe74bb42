"""3SAT instances: literals, clauses, DIMACS CNF I/O and random generation."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import (
    ClauseCountMismatch,
    InvalidSize,
    LengthMismatch,
    MalformedClause,
    MalformedHeader,
    NotThreeSat,
    VariableOutOfRange,
)

log = logging.getLogger(__name__)


def max_clauses(m: int) -> int:
    """Largest clause count accepted for ``m`` variables, binom(2m, 3)."""
    return comb(2 * m, 3)


@dataclass(frozen=True)
class Literal:
    var: int  # 1-based
    negated: bool = False

    def value(self, bits: Sequence[int]) -> int:
        return int(bool(bits[self.var - 1]) != self.negated)

    def to_int(self) -> int:
        return -self.var if self.negated else self.var

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit < 0)

    def __str__(self) -> str:
        return f"~x{self.var}" if self.negated else f"x{self.var}"


@dataclass(frozen=True)
class Clause:
    lits: tuple[Literal, Literal, Literal]

    def __post_init__(self):
        if len(self.lits) != 3:
            raise NotThreeSat(f"clause has {len(self.lits)} literals, need exactly 3")
        vs = [lit.var for lit in self.lits]
        if len(set(vs)) != 3:
            raise NotThreeSat(f"clause repeats a variable: {self.to_ints()}")

    @classmethod
    def from_ints(cls, ints: Sequence[int]) -> "Clause":
        return cls(tuple(Literal.from_int(i) for i in ints))

    def to_ints(self) -> tuple[int, ...]:
        return tuple(lit.to_int() for lit in self.lits)

    @property
    def vars(self) -> tuple[int, int, int]:
        return tuple(lit.var for lit in self.lits)

    def __str__(self) -> str:
        return "(" + " v ".join(str(lit) for lit in self.lits) + ")"


@dataclass(frozen=True)
class Assignment:
    """Truth values for variables 1..m; ``bits[i]`` is variable ``i + 1``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(bool(b)) for b in self.bits))

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def flipped(self, var: int) -> "Assignment":
        bits = list(self.bits)
        bits[var - 1] ^= 1
        return Assignment(tuple(bits))

    def to_str(self) -> str:
        """Render as a 0/1 string, variable 1 leftmost."""
        return "".join(str(b) for b in self.bits)

    @classmethod
    def from_str(cls, s: str) -> "Assignment":
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"assignment must be a 0/1 string, got {s!r}")
        return cls(tuple(int(c) for c in s))

    def to_int(self) -> int:
        """Pack into an integer; bit ``i`` holds variable ``i + 1``."""
        return sum(b << i for i, b in enumerate(self.bits))

    @classmethod
    def from_int(cls, x: int, m: int) -> "Assignment":
        return cls(tuple((x >> i) & 1 for i in range(m)))


@dataclass(frozen=True)
class Formula:
    m: int
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.m < 1:
            raise InvalidSize(f"need at least one variable, got m={self.m}")
        for i, c in enumerate(self.clauses):
            for v in c.vars:
                if not 1 <= v <= self.m:
                    raise VariableOutOfRange(
                        f"clause {i + 1} uses variable {v}, outside 1..{self.m}")
        if self.n > max_clauses(self.m):
            raise InvalidSize(
                f"n={self.n} exceeds binom(2m,3)={max_clauses(self.m)} for m={self.m}")

    @property
    def n(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_ints(cls, m: int, clauses: Iterable[Sequence[int]]) -> "Formula":
        return cls(m, tuple(Clause.from_ints(c) for c in clauses))

    def duplicate_clauses(self) -> list[tuple[int, ...]]:
        counts = Counter(c.to_ints() for c in self.clauses)
        return [c for c, k in counts.items() if k > 1]

    def __str__(self) -> str:
        return " & ".join(str(c) for c in self.clauses) or "TRUE"


class Evaluation(NamedTuple):
    satisfied: bool
    unsat_count: int


def _check_length(f: Formula, a: Sequence[int]) -> None:
    if len(a) != f.m:
        raise LengthMismatch(f"assignment has length {len(a)}, formula has m={f.m}")


def clause_class(c: Clause, a: Sequence[int]) -> int:
    """Number of true literals of ``c`` under ``a``; 0 means unsatisfied."""
    return sum(lit.value(a) for lit in c.lits)


def evaluate(f: Formula, a: Sequence[int]) -> Evaluation:
    _check_length(f, a)
    unsat = sum(1 for c in f.clauses if clause_class(c, a) == 0)
    return Evaluation(unsat == 0, unsat)


# DIMACS -------------------------------------------------------------------


def parse_dimacs(text: str) -> Formula:
    """Parse strict 3SAT DIMACS CNF text.

    Comment lines are logged at debug level and otherwise dropped. Clauses may
    span lines; a final clause missing its ``0`` terminator is accepted. A
    ``%`` line (SATLIB convention) ends the clause section.
    """
    header: tuple[int, int] | None = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            log.debug("dimacs comment (line %d): %s", lineno, line[1:].strip())
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise MalformedHeader(f"line {lineno}: second problem line")
            if clauses or current:
                raise MalformedHeader(f"line {lineno}: problem line after clauses")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: expected 'p cnf <m> <n>', got {line!r}")
            try:
                m, n = int(parts[2]), int(parts[3])
            except ValueError:
                raise MalformedHeader(f"line {lineno}: non-integer counts in {line!r}") from None
            if m < 1 or n < 0:
                raise MalformedHeader(f"line {lineno}: invalid counts m={m} n={n}")
            header = (m, n)
            continue
        if header is None:
            raise MalformedHeader(f"line {lineno}: clause data before 'p cnf' line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise MalformedClause(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise VariableOutOfRange(
                        f"line {lineno}: literal {lit} outside 1..{header[0]}")
                current.append(lit)
    if current:
        clauses.append(tuple(current))

    if header is None:
        raise MalformedHeader("missing 'p cnf <m> <n>' line")
    m, n = header
    if len(clauses) != n:
        raise ClauseCountMismatch(f"header declares {n} clauses, found {len(clauses)}")
    for i, c in enumerate(clauses):
        if len(c) != 3:
            raise NotThreeSat(f"clause {i + 1} has {len(c)} literals: {list(c)}")
        if len({abs(x) for x in c}) != 3:
            raise NotThreeSat(f"clause {i + 1} repeats a variable: {list(c)}")

    f = Formula.from_ints(m, clauses)
    for dup in f.duplicate_clauses():
        log.warning("duplicate clause %s (energies add; kept)", list(dup))
    return f


def read_dimacs(path) -> Formula:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_dimacs(fh.read())


def serialize_dimacs(f: Formula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.m} {f.n}")
    lines += [" ".join(map(str, c.to_ints())) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


# generation ---------------------------------------------------------------


def gen_random(m: int, n: int, seed: int) -> Formula:
    """Uniform random 3SAT: distinct variables per clause, fair sign flips.

    Uses numpy's PCG64 seeded with ``seed``; variables within a clause are
    listed in increasing order.
    """
    if m < 3 or n < 1 or n > max_clauses(m):
        raise InvalidSize(f"need m >= 3 and 1 <= n <= binom(2m,3); got m={m}, n={n}")
    rng = np.random.Generator(np.random.PCG64(seed & 0xFFFFFFFFFFFFFFFF))
    clauses = []
    for _ in range(n):
        vs = np.sort(rng.choice(m, size=3, replace=False)) + 1
        neg = rng.integers(0, 2, size=3)
        clauses.append(tuple(int(-v if s else v) for v, s in zip(vs, neg)))
    return Formula.from_ints(m, clauses)
