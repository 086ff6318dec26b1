"""Exception types shared across the package."""


class MatrixFormatError(ValueError):
    """A matrix value does not fit its declared order."""


class ParseError(ValueError):
    """Text input could not be parsed."""


class DimensionError(ValueError):
    """Operands have incompatible orders."""


class IntegerOverflowError(ArithmeticError):
    """An exact computation exceeded the configured integer width."""


class ContractError(ValueError):
    """An argument violates a documented precondition."""


class DependencyError(RuntimeError):
    """A computation needs results from a level that is not available."""


class ConfigError(ValueError):
    """Invalid run configuration."""
