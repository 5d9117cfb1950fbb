"""Exception hierarchy shared by all homsim modules."""


class HomsimError(Exception):
    """Base class for every error raised by homsim."""


class ParameterError(HomsimError, ValueError):
    """An argument is outside its admissible range."""


class JsaFormatError(HomsimError, ValueError):
    """A JSA file or sidecar could not be interpreted."""


class NormalizationError(HomsimError, ValueError):
    """A JSA has zero norm, or is required to be normalized and is not."""


class PreconditionError(HomsimError, ValueError):
    """The input violates a documented precondition of the operation."""


class MemoryBoundError(HomsimError, MemoryError):
    """The requested grid would exceed the configured working-memory bound."""


class OracleCapError(HomsimError, ValueError):
    """The grid is too large for brute-force evaluation."""
