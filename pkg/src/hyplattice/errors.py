"""Exception hierarchy.

Errors derived from :class:`ValidationError` signal bad input (CLI exit
code 2); errors derived from :class:`NumericError` signal a computation that
could not be completed (CLI exit code 3).
"""


class HypLatticeError(Exception):
    pass


class ValidationError(HypLatticeError, ValueError):
    pass


class NumericError(HypLatticeError, ArithmeticError):
    pass


class UnsupportedField(ValidationError):
    pass


class InvalidBox(ValidationError):
    pass


class InvalidStrip(ValidationError):
    pass


class InvalidBump(ValidationError):
    pass


class InvalidTau(ValidationError):
    pass


class EmptyGrid(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DivisionStuck(NumericError):
    pass


class DegenerateDirection(NumericError):
    pass


class OverflowGuard(NumericError):
    pass


class CostGuard(NumericError):
    pass


class QuadratureFail(NumericError):
    pass


class SeriesDiverged(NumericError):
    pass


class IterationCap(NumericError):
    pass


class DegenerateFit(NumericError):
    pass
