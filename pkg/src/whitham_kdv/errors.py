"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ParameterError(ValueError):
    """Invalid numerical parameter (non-positive epsilon, bad grid, ...)."""


class ConditioningError(ArithmeticError):
    """Evaluation refused because the result would be ill-conditioned."""


class ConditioningWarning(RuntimeWarning):
    """Result is computed but may have lost accuracy."""


class NoBreakingError(ValueError):
    """Initial profile never develops a gradient catastrophe."""


class RootBracketError(ArithmeticError):
    """Characteristic roots could not be bracketed."""


class ContinuationNeeded(ArithmeticError):
    """Newton iteration diverged; the caller should refine the continuation path."""


class OutsideZone(ArithmeticError):
    """Solution left the ordered region beta1 > beta2 > beta3."""


class ConfigurationError(ValueError):
    """Missing or inconsistent configuration (profile lacks a branch, ...)."""


class ResolutionError(ValueError):
    """Spectral grid or time step cannot resolve the requested run."""


class RefineMeshError(ArithmeticError):
    """Boundary-value solve failed to converge on the given mesh."""
