"""Exception hierarchy shared across gctop."""


class GctopError(Exception):
    """Base class for all gctop errors."""


class StructureError(GctopError, ValueError):
    """A graph fails structural validation (involution, labels, connectivity)."""


class InvalidEdgeError(GctopError, ValueError):
    pass


class InvalidArgumentError(GctopError, ValueError):
    pass


class PreconditionError(GctopError, ValueError):
    pass


class ConfigurationError(GctopError, ValueError):
    pass


class ResourceError(GctopError, RuntimeError):
    """A configurable size cap was exceeded."""


class IntegrityError(GctopError, RuntimeError):
    """Independent computations that must agree did not."""
