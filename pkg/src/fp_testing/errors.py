class SpaceMismatchError(ValueError):
    """Raised when a measure, set or sample lives on a different space than expected."""


class ConfigError(ValueError):
    """Invalid simulation configuration. `field` names the offending entry."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class InvariantViolation(AssertionError):
    """A property the constructions guarantee did not hold at runtime."""


class SolverError(RuntimeError):
    """The LP solver did not report an optimal solution."""
