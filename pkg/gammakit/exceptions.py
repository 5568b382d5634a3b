class GammaKitError(Exception):
    pass


class DimensionMismatchError(GammaKitError, ValueError):
    pass


class NotSymmetricError(GammaKitError, ValueError):
    pass


class PreconditionError(GammaKitError):
    """
    Raised when a documented precondition of an operation does not hold. The ``check`` attribute names the
    precondition, e.g. ``"commuting"`` or ``"gamma-unitary"``.
    """

    def __init__(self, check: str, message: str = None) -> None:
        super().__init__(message or "precondition failed: %s" % check)
        self.check = check


class DecompositionError(PreconditionError):
    pass


class ConvergenceError(GammaKitError):
    pass


class SingularSymbolError(GammaKitError):
    pass


class AnalyticityError(GammaKitError):
    def __init__(self, degree: int, norm: float) -> None:
        super().__init__("Fourier coefficient of degree %d has norm %.3e" % (degree, norm))
        self.degree = degree
        self.norm = norm


class InconsistencyError(GammaKitError):
    pass
