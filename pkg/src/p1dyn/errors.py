"""Exception hierarchy shared by every layer of the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class UndefinedValuationError(DomainError):
    """Valuation of zero requested."""


class DegenerateMapError(DomainError):
    """The two forms share a root, so they do not define a morphism."""


class InfiniteDistanceError(DomainError):
    """The logarithmic distance of a point to itself is infinite."""


class UnsupportedLengthError(DomainError):
    """Tuple length outside the range where the operation is defined."""


class ResourceError(RuntimeError):
    """A configured work budget was exceeded.

    ``partial`` carries whatever was computed before giving up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
