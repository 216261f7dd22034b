"""Error types raised by the library, distinguishable by failure kind."""


class DilationLabError(Exception):
    """Base class for all library errors."""


class ShapeError(DilationLabError):
    """Input has the wrong shape, is not square, or is not Hermitian/symmetric as required."""


class SizeError(DilationLabError):
    """A requested construction exceeds a configured size cap."""


class PreconditionError(DilationLabError):
    """Input data violates a documented precondition."""


class NotPsdError(PreconditionError):
    """A matrix required to be positive semidefinite is not."""


class NotExpectationError(PreconditionError):
    """A span is not invariant under the modular flow, so no state-preserving
    conditional expectation onto it exists."""
