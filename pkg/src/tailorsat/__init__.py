"""Encode 3SAT in the ground state of a tailored many-body energy landscape.

Modules: ``formula`` (instances, DIMACS), ``ce3`` (clause-evaluator levels and
parameter tailoring), ``compiler`` (netlist and energy model), ``oracle``
(exhaustive spectrum), ``dynamics`` (Metropolis relaxation), ``cli``.
"""

from .ce3 import CE3Params, CE3Solution, level_energy, scan_region, solve
from .compiler import EnergyModel, build_netlist, compile, flip_delta, total_energy
from .dynamics import Constant, Geometric, RunConfig, metropolis_run, multi_restart
from .formula import Assignment, Clause, Formula, Literal, evaluate, gen_random, parse_dimacs
from .oracle import check_encoding, enumerate_spectrum

__version__ = "0.1.0"
