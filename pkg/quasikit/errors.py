class QuasikitError(Exception):
    pass


class DomainError(QuasikitError, ValueError):
    pass


class ResolutionError(QuasikitError):
    pass


class ConsistencyError(QuasikitError):
    pass


class NodeCollisionError(QuasikitError):
    pass


class BoundaryRegularityError(QuasikitError):
    pass


class DecompositionQualityError(QuasikitError):
    pass


class UndersamplingError(QuasikitError):
    pass


class PairingError(QuasikitError):
    pass


class IncompatibleReportsError(QuasikitError):
    pass


class ConfigError(QuasikitError, ValueError):
    pass


class InversionError(QuasikitError):
    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message)
        self.residual = residual


class ConditioningError(QuasikitError):
    def __init__(self, message: str, estimate: float) -> None:
        super().__init__(message)
        self.estimate = estimate


class ConvergenceError(QuasikitError):
    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message)
        self.residual = residual
