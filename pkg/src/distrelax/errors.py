"""Exception hierarchy shared by all modules."""


class DistRelaxError(Exception):
    """Base class; ``code`` is the machine-readable name used by the CLI."""

    code = "DistRelaxError"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message


class MeasureError(DistRelaxError, ValueError):
    code = "MeasureError"


class NonPositiveWeight(MeasureError):
    code = "NonPositiveWeight"


class AtomOutOfRange(MeasureError):
    code = "AtomOutOfRange"


class MassAtZeroOnly(MeasureError):
    code = "MassAtZeroOnly"


class InfiniteMass(MeasureError):
    code = "InfiniteMass"


class EmptyMeasure(MeasureError):
    code = "EmptyMeasure"


class DomainError(DistRelaxError, ValueError):
    code = "DomainError"


class QuadratureFailure(DistRelaxError, ArithmeticError):
    code = "QuadratureFailure"


class NonMonotoneOutput(DistRelaxError, ArithmeticError):
    code = "NonMonotoneOutput"


class GridMismatch(DistRelaxError, ValueError):
    code = "GridMismatch"


class EmptyWindow(DistRelaxError, ValueError):
    code = "EmptyWindow"
