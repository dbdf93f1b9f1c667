"""Exception hierarchy for the solver and its input validation."""


class FglapError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FglapError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(FglapError, ValueError):
    """A family, problem, or run configuration violates a structural requirement."""


class InvariantError(FglapError, RuntimeError):
    """A numerical invariant that the theory guarantees failed to hold."""


class ConvergenceError(FglapError, RuntimeError):
    """An iterative procedure exhausted its budget without converging."""
