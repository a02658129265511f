"""Exception types shared across the toolkit."""


class EnttomoError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(EnttomoError, ValueError):
    """Invalid argument value (bad chain length, sector, mask, ...)."""


class BasisMismatchError(EnttomoError, ValueError):
    """Operator and state (or two states) live in different bases."""


class CapacityError(EnttomoError, RuntimeError):
    """Requested dense operation exceeds the configured dimension cap."""


class ConvergenceError(EnttomoError, RuntimeError):
    """Iterative propagator failed to certify the requested tolerance."""

    def __init__(self, message: str, achieved_residual: float):
        super().__init__(message)
        self.achieved_residual = achieved_residual


class SchemaError(EnttomoError, ValueError):
    """Config or data file does not match the documented schema."""
