"""Exception types shared across the package."""


class PavelabError(Exception):
    """Base class for all pavelab errors."""


class DimensionError(PavelabError):
    """Matrix/index-set shapes are incompatible."""


class ParameterError(PavelabError):
    """A parameter is outside its valid domain."""


class CapacityError(PavelabError):
    """An exact enumeration would exceed the supported instance size."""


class PreconditionError(PavelabError):
    """An inequality hypothesis is violated; the message names it."""


class FormatError(PavelabError):
    """A text artifact (matrix, partition, config) failed to parse."""
