"""Exception hierarchy.

Each class carries the CLI exit code it maps to: 3 for data problems,
4 for numerical or convergence failures.
"""


class PfbError(Exception):
    exit_code = 1


class DataError(PfbError, ValueError):
    exit_code = 3


class SchemaError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class IntegrityError(DataError):
    pass


class DataGapError(DataError):
    def __init__(self, message, date=None):
        super().__init__(message)
        self.date = date


class InsufficientDataError(DataError):
    pass


class NumericalError(PfbError, ArithmeticError):
    exit_code = 4


class DegenerateVarianceError(NumericalError):
    pass


class CollinearityError(NumericalError):
    pass


class DegenerateFitError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """Optimizer hit its iteration cap; ``best`` holds the best-so-far result."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DivergenceError(NumericalError):
    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class UsageError(PfbError):
    """Bad command-line or config-file input."""

    exit_code = 2
