"""Exception hierarchy for arcwalk."""


class ArcwalkError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(ArcwalkError, ValueError):
    pass


class InvalidEdgeError(InvalidParameterError):
    pass


class IsolatedVertexError(InvalidParameterError):
    pass


class EdgeListFormatError(InvalidParameterError):
    pass


class UnknownArcError(ArcwalkError, LookupError):
    pass


class SignConstraintError(ArcwalkError, ValueError):
    """An arc and its inverse were both given the sign -1."""


class ShapeError(ArcwalkError, ValueError):
    pass


class DegenerateLiftError(ArcwalkError, ArithmeticError):
    """|lambda| is too close to 1 for the eigenvector lift (sin theta ~ 0)."""


class ResourceLimitError(ArcwalkError, RuntimeError):
    pass


class InvalidAutomorphismError(ArcwalkError, ValueError):
    pass
