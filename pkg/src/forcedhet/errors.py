class ForcedHetError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ForcedHetError, ValueError):
    pass


class NonPositiveImageError(DomainError):
    """The map image left the half-cylinder y > 0."""


class DegenerateGridError(ForcedHetError):
    pass


class NotAFixedPointError(ForcedHetError):
    pass


class NotASaddleError(ForcedHetError):
    pass


class WindowTooLargeError(ForcedHetError):
    pass


class InverseMapError(ForcedHetError):
    pass


class IntegrationError(ForcedHetError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NoConvergenceError(ForcedHetError):
    pass
