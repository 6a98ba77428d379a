"""Exception types shared across the package."""


class SimplexWalkError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SimplexWalkError, ValueError):
    """A point or parameter lies outside the domain of an operation."""


class SingularityError(SimplexWalkError, ZeroDivisionError):
    """A map was evaluated where a denominator vanishes (within tolerance)."""


class InvalidParameterError(SimplexWalkError, ValueError):
    """A model parameter violates its validity constraints."""


class QuadratureError(SimplexWalkError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ConfigError(SimplexWalkError, ValueError):
    """A configuration file is malformed or fails schema validation."""
