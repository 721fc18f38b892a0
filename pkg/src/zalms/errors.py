"""Exception types shared across the package."""


class DomainError(ValueError):
    """A distribution or special-function argument is outside its domain."""


class ConvergenceError(ArithmeticError):
    """An iterative evaluation hit its iteration cap before converging."""


class NumericOverflowError(FloatingPointError):
    """A filter produced or was fed a non-finite value; the state is poisoned."""


class TheoryOutOfRangeError(ValueError):
    """The closed-form prediction does not exist for these parameters."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""
