"""Exception hierarchy shared by every module."""


class PosmapError(ValueError):
    """Base class for all errors raised by posmap."""


class NonSquare(PosmapError):
    pass


class NonFinite(PosmapError):
    pass


class DimensionMismatch(PosmapError):
    pass


class NotPSD(PosmapError):
    pass


class NotProjection(PosmapError):
    pass


class NotUnit(PosmapError):
    pass


class BadSchmidtRank(PosmapError):
    pass


class EmptyGrid(PosmapError):
    pass


class NotInFace(PosmapError):
    pass


class ZeroMap(PosmapError):
    pass


class InvalidSeed(PosmapError):
    pass


class MethodUnavailable(PosmapError):
    pass


class IdentityViolated(PosmapError):
    """A quadratic function failed the parallelogram or symmetry identity.

    ``pair`` holds the offending ``(xi, eta)`` vectors when known.
    """

    def __init__(self, message, pair=None, residual=None):
        super().__init__(message)
        self.pair = pair
        self.residual = residual


class BadParams(PosmapError):
    pass


class ParseError(PosmapError):
    pass
