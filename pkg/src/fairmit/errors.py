"""Exception types shared across the package.

The CLI maps these onto exit codes, so library code raises them rather than
bare ``ValueError``.
"""


class FairmitError(Exception):
    """Base class for all package errors."""


class InputError(FairmitError, ValueError):
    """Bad data: empty inputs, malformed rows, out-of-range values."""


class ConfigError(FairmitError, ValueError):
    """Invalid configuration or parameter combination."""


class TrainingDiverged(FairmitError, ArithmeticError):
    """Loss became non-finite during training."""
