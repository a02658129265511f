"""Exception types shared across the renderer."""


class TomofigError(Exception):
    """Base class for all renderer errors."""


class SpecError(TomofigError, ValueError):
    """Figure spec file is malformed or references missing inputs."""


class SchemaError(TomofigError, ValueError):
    """Input data file does not match the documented schema."""
