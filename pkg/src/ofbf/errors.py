"""Exception hierarchy shared by every module."""


class OfbfError(Exception):
    """Base class for all package errors."""


class InvalidInput(OfbfError, ValueError):
    pass


class SingularInput(InvalidInput):
    pass


class ZeroVector(InvalidInput):
    pass


class SingularPoint(InvalidInput):
    pass


class NotFinite(InvalidInput):
    pass


class AntipodesEverywhere(InvalidInput):
    pass


class DuplicateOrbit(InvalidInput):
    pass


class PivotOnAntipode(InvalidInput):
    pass


class UnsupportedDimension(InvalidInput):
    pass


class UnsupportedSpec(InvalidInput):
    pass


class DegenerateSpec(InvalidInput):
    pass


class IncompatibleSpec(InvalidInput):
    pass


class NotMaximal(InvalidInput):
    pass


class InadmissiblePair(InvalidInput):
    pass


class GridNotInvariant(InvalidInput):
    pass


class ConstructionFailure(OfbfError):
    pass


class UseAbsolutelyContinuous(ConstructionFailure):
    pass


class RecipeInvalid(ConstructionFailure):
    pass


class NumericalFailure(OfbfError, ArithmeticError):
    pass


class QuadratureFailure(NumericalFailure):
    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class NotPSD(NumericalFailure):
    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
