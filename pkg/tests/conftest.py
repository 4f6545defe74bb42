import itertools

import pytest

from tailorsat import ce3, compiler
from tailorsat.formula import Formula, parse_dimacs

TWO_CLAUSE_CNF = "p cnf 4 2\n-1 2 4 0\n1 -3 4 0\n"


def all_patterns_formula() -> Formula:
    """The 8 sign patterns over x1, x2, x3: unsatisfiable, every state breaks one clause."""
    clauses = [tuple(s * v for s, v in zip(signs, (1, 2, 3)))
               for signs in itertools.product((1, -1), repeat=3)]
    return Formula.from_ints(3, clauses)


@pytest.fixture
def example():
    return parse_dimacs(TWO_CLAUSE_CNF)


@pytest.fixture
def patterns():
    return all_patterns_formula()


@pytest.fixture
def single():
    return Formula.from_ints(3, [(1, 2, 3)])


@pytest.fixture(scope="session")
def solution():
    return ce3.best_solution(ce3.solve(0.3, 1.0, 1.0))


@pytest.fixture
def example_model(example, solution):
    return compiler.compile(example, solution)


# acceptance summary ---------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
