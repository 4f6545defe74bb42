"""Exception hierarchy shared by all tailorsat modules.

Every exception carries a short ``code`` (its class name) so the command line
front end can print ``error: <code>: <message>`` without a lookup table.
"""


class TailorSatError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# formula / DIMACS ---------------------------------------------------------


class FormulaError(TailorSatError, ValueError):
    pass


class MalformedHeader(FormulaError):
    pass


class MalformedClause(FormulaError):
    pass


class ClauseCountMismatch(FormulaError):
    pass


class VariableOutOfRange(FormulaError):
    pass


class NotThreeSat(FormulaError):
    pass


class LengthMismatch(FormulaError):
    pass


class InvalidSize(FormulaError):
    pass


# ce3 ----------------------------------------------------------------------


class NoSolution(TailorSatError):
    """No tailoring (A, E) exists for the given couplings.

    This marks an infeasible parameter cell, not a fault.
    """


class InvalidRange(TailorSatError, ValueError):
    pass


# compiler -----------------------------------------------------------------


class InvalidSolution(TailorSatError, ValueError):
    pass


class IndexOutOfRange(TailorSatError, IndexError):
    pass


# oracle / dynamics --------------------------------------------------------


class TooLarge(TailorSatError, ValueError):
    pass


class MissingTarget(TailorSatError, ValueError):
    pass
