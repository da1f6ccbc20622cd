"""Exception types shared across the package."""


class CubeDistortError(Exception):
    pass


class InvalidParam(CubeDistortError, ValueError):
    pass


class CapExceeded(CubeDistortError):
    """An explicit expansion would exceed the configured letter cap."""


class SizeLimit(CubeDistortError):
    pass


class NotPositive(CubeDistortError, ValueError):
    pass


class TooShort(CubeDistortError, ValueError):
    pass


class ConstraintViolated(CubeDistortError, ValueError):
    def __init__(self, inequality, message=None):
        self.inequality = inequality
        super().__init__(message or f"constraint violated: {inequality}")


class ShapeMismatch(CubeDistortError, ValueError):
    pass


class NotIsomorphic(CubeDistortError, ValueError):
    pass


class BadLetter(CubeDistortError, ValueError):
    pass


class NotInSubgroup(CubeDistortError):
    pass


class TowerOverflow(CubeDistortError):
    pass


class InsufficientData(CubeDistortError, ValueError):
    pass
