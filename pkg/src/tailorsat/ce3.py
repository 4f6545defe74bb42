"""Three-literal clause evaluator (3CE): level energies and parameter tailoring.

A 3CE couples three literals through one-body bias ``A``, pairwise coupling
``B`` and a two-level responser with half-splitting ``D`` that sits in the
field ``E + F * S``.  Written with spins ``s_i = 1 - 2 l_i`` and
``S = s_1 + s_2 + s_3 = 3 - 2k`` (``k`` = number of true literals)::

    U(S) = A*S + B*(S**2 - 3)/2 - sqrt(D**2 + (E + F*S)**2)

which gives the class energies

    U0 =  3A + 3B - g(3)     U1 =  A - B - g(1)
    U2 = -A - B - g(-1)      U3 = -3A + 3B - g(-3)

with ``g(S) = sqrt(D**2 + (E + F*S)**2)``.  Tailoring asks for
``U1 = U2 = U3 <= U0 - gap_min``.  ``U1 = U2`` fixes ``A`` in closed form and
``U2 = U3`` leaves one equation in ``E`` which is solved by bracketing and
bisection.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidRange, NoSolution

DEFAULT_GAP_MIN = 0.2  # in units of D
DEGENERACY_TOL = 1e-9  # in units of D
ROOT_TOL = 1e-12  # |phi| target, in units of D
MAX_BISECT = 200
DEFAULT_BRACKETS = 2048


@dataclass(frozen=True)
class CE3Params:
    A: float
    B: float
    D: float
    E: float
    F: float

    def __post_init__(self):
        vals = (self.A, self.B, self.D, self.E, self.F)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite 3CE parameter in {vals}")
        if not self.D > 0:
            raise ValueError(f"D must be positive, got {self.D}")

    def scaled(self, factor: float) -> "CE3Params":
        return CE3Params(self.A * factor, self.B * factor, self.D * factor,
                         self.E * factor, self.F * factor)


@dataclass(frozen=True)
class CE3Solution:
    params: CE3Params
    u_sat: float
    u_unsat: float
    gap: float

    @classmethod
    def from_params(cls, p: CE3Params) -> "CE3Solution":
        u = levels(p)
        return cls(p, u[1], u[0], u[0] - u[1])

    def degeneracy_error(self) -> float:
        """max(|U1 - U2|, |U2 - U3|) recomputed from the parameters."""
        u = levels(self.params)
        return max(abs(u[1] - u[2]), abs(u[2] - u[3]))

    def is_valid(self, gap_min: float | None = None) -> bool:
        D = self.params.D
        if gap_min is None:
            gap_min = DEFAULT_GAP_MIN * D
        u = levels(self.params)
        return (self.degeneracy_error() <= DEGENERACY_TOL * D
                and u[0] - u[1] >= gap_min)

    def as_dict(self) -> dict:
        p = self.params
        return {
            "a": p.A, "b": p.B, "d": p.D, "e": p.E, "f": p.F,
            "u_sat": self.u_sat, "u_unsat": self.u_unsat, "gap": self.gap,
            "a_over_d": p.A / p.D, "b_over_d": p.B / p.D, "e_over_d": p.E / p.D,
            "f_over_d": p.F / p.D, "gap_over_d": self.gap / p.D,
        }


def responser_energy(p: CE3Params, S: int) -> float:
    """g(S): magnitude of the responser level in field E + F*S (dipole 1)."""
    return math.hypot(p.D, p.E + p.F * S)


def level_energy(p: CE3Params, k: int) -> float:
    """Energy of class ``k`` (``k`` true literals out of three)."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"class index must be 0..3, got {k}")
    S = 3 - 2 * k
    return p.A * S + p.B * (S * S - 3) / 2 - responser_energy(p, S)


def levels(p: CE3Params) -> tuple[float, float, float, float]:
    """(U0, U1, U2, U3)."""
    return tuple(level_energy(p, k) for k in range(4))


def spin_hamiltonian(p: CE3Params, l1: int, l2: int, l3: int) -> float:
    """The 3CE energy for an explicit literal triple, before class collapse."""
    s = [1 - 2 * l for l in (l1, l2, l3)]
    S = sum(s)
    pair = s[0] * s[1] + s[0] * s[2] + s[1] * s[2]
    return p.A * S + p.B * pair - math.hypot(p.D, p.E + p.F * S)


# solver -------------------------------------------------------------------


def phi(E, B: float, D: float, F: float):
    """Residual of U2 = U3 once A is fixed by U1 = U2.

    ``g(1) - 2 g(-1) + g(-3) - 4B``: the second difference of the convex
    responser magnitude with spacing 2F, centred at E - F, minus 4B.
    Accepts scalars or numpy arrays for ``E``.
    """
    return (np.hypot(D, E + F) - 2.0 * np.hypot(D, E - F)
            + np.hypot(D, E - 3.0 * F) - 4.0 * B)


def _phi_scalar(E: float, B: float, D: float, F: float) -> float:
    return (math.hypot(D, E + F) - 2.0 * math.hypot(D, E - F)
            + math.hypot(D, E - 3.0 * F) - 4.0 * B)


def bias_for(E: float, D: float, F: float) -> float:
    """One-body bias ``A`` making U1 = U2 for given E."""
    return 0.5 * (math.hypot(D, E + F) - math.hypot(D, E - F))


def default_window(B: float, D: float, F: float) -> float:
    f_eff = max(abs(F), 1e-12 * D)
    return min(10.0 * (abs(F) + abs(B) + D) / min(f_eff / D, 1.0), 1e3 * D)


def _bisect(fn, lo: float, hi: float, flo: float, tol: float) -> float:
    mid = lo
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if abs(fm) <= tol or mid in (lo, hi):
            break
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return mid


def find_roots(B: float, D: float, F: float, window: float | None = None,
               brackets: int = DEFAULT_BRACKETS) -> list[float]:
    """All sign-change roots of ``phi`` on ``[F - window, F + window]``."""
    if window is None:
        window = default_window(B, D, F)
    grid = np.linspace(F - window, F + window, brackets + 1)
    vals = phi(grid, B, D, F)
    tol = ROOT_TOL * D
    fn = lambda e: _phi_scalar(e, B, D, F)  # noqa: E731
    roots = [float(e) for e in grid[vals == 0.0]]
    for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
        roots.append(_bisect(fn, float(grid[i]), float(grid[i + 1]), float(vals[i]), tol))
    return sorted(roots)


def solve(B: float, D: float = 1.0, F: float = 1.0, gap_min: float | None = None,
          window: float | None = None, brackets: int = DEFAULT_BRACKETS) -> list[CE3Solution]:
    """Tailor (A, E) for fixed couplings (B, D, F).

    Returns every solution with ``U0 - U1 >= gap_min`` (default ``0.2 D``),
    ordered by increasing E. Raises :class:`NoSolution` when there is none.
    """
    if not D > 0:
        raise ValueError(f"D must be positive, got {D}")
    if gap_min is None:
        gap_min = DEFAULT_GAP_MIN * D
    if gap_min < 0:
        raise ValueError(f"gap_min must be >= 0, got {gap_min}")
    # solve in units of D
    b, f, gmin = B / D, F / D, gap_min / D
    w = None if window is None else window / D

    out = []
    for e in find_roots(b, 1.0, f, w, brackets):
        p = CE3Params(bias_for(e, 1.0, f), b, 1.0, e, f)
        sol = CE3Solution.from_params(p)
        if sol.gap >= gmin and sol.degeneracy_error() <= DEGENERACY_TOL:
            out.append(sol)
    if not out:
        raise NoSolution(f"no 3CE tailoring for B/D={b:g}, F/D={f:g} with gap >= {gmin:g} D")
    if D != 1.0:
        out = [CE3Solution.from_params(s.params.scaled(D)) for s in out]
    return out


def best_solution(solutions: Sequence[CE3Solution]) -> CE3Solution:
    """Largest gap; ties go to the smaller E."""
    return min(solutions, key=lambda s: (-s.gap, s.params.E))


def max_second_difference(D: float, F: float) -> float:
    """sup over E of g(1) - 2 g(-1) + g(-3), attained at E = F."""
    return 2.0 * (math.hypot(D, 2.0 * F) - D)


# region scan --------------------------------------------------------------


class Cell(NamedTuple):
    feasible: bool
    best: CE3Solution | None


@dataclass
class RegionGrid:
    b_axis: np.ndarray
    f_axis: np.ndarray
    cells: list[list[Cell]]  # cells[i][j] <-> (b_axis[i], f_axis[j])
    gap_min: float = DEFAULT_GAP_MIN

    @property
    def feasible(self) -> np.ndarray:
        return np.array([[c.feasible for c in row] for row in self.cells], dtype=bool)

    def nearest(self, b: float, f: float) -> tuple[int, int]:
        return int(np.argmin(abs(self.b_axis - b))), int(np.argmin(abs(self.f_axis - f)))

    def to_csv(self) -> str:
        lines = ["b_over_d,f_over_d,feasible,a_over_d,e_over_d,gap_over_d"]
        for i, b in enumerate(self.b_axis):
            for j, f in enumerate(self.f_axis):
                c = self.cells[i][j]
                if c.feasible:
                    p = c.best.params
                    tail = f"1,{p.A!r},{p.E!r},{c.best.gap!r}"
                else:
                    tail = "0,,,"
                lines.append(f"{float(b)!r},{float(f)!r},{tail}")
        return "\n".join(lines) + "\n"

    def to_pgm(self) -> str:
        """Plain PGM (P2): black = feasible; f grows rightward, b downward."""
        mask = self.feasible
        rows = [" ".join("0" if x else "255" for x in row) for row in mask]
        return f"P2\n{len(self.f_axis)} {len(self.b_axis)}\n255\n" + "\n".join(rows) + "\n"


def _scan_row(args) -> list[Cell]:
    b, f_axis, gap_min, brackets = args
    row = []
    for f in f_axis:
        try:
            sols = solve(float(b), 1.0, float(f), gap_min, brackets=brackets)
        except NoSolution:
            row.append(Cell(False, None))
        else:
            row.append(Cell(True, best_solution(sols)))
    return row


def scan_region(b_min: float, b_max: float, f_min: float, f_max: float,
                nb: int, nf: int, gap_min: float = DEFAULT_GAP_MIN,
                brackets: int = DEFAULT_BRACKETS, workers: int = 1) -> RegionGrid:
    """Map where good 3CE solutions exist over a (B/D, F/D) grid.

    Axes are ``linspace`` samples including both endpoints. With
    ``workers > 1`` rows are farmed out to a process pool; the grid does not
    depend on the schedule.
    """
    vals = (b_min, b_max, f_min, f_max)
    if not all(math.isfinite(v) for v in vals) or b_min > b_max or f_min > f_max:
        raise InvalidRange(f"bad scan ranges {vals}")
    if nb < 2 or nf < 2:
        raise InvalidRange(f"grid sizes must be >= 2, got {nb}x{nf}")
    if gap_min < 0:
        raise InvalidRange(f"gap_min must be >= 0, got {gap_min}")
    b_axis = np.linspace(b_min, b_max, nb)
    f_axis = np.linspace(f_min, f_max, nf)
    jobs = [(b, f_axis, gap_min, brackets) for b in b_axis]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            cells = list(ex.map(_scan_row, jobs))
    else:
        cells = [_scan_row(j) for j in jobs]
    return RegionGrid(b_axis, f_axis, cells, gap_min)
