"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 1);
``NumericalFailure`` subclasses signal a computation that could not be
completed (CLI exit code 2).
"""


class ValidationError(ValueError):
    pass


class NumericalFailure(ArithmeticError):
    pass


class TooFewVertices(ValidationError):
    pass


class DuplicateVertex(ValidationError):
    pass


class NonConvex(ValidationError):
    pass


class DegenerateChord(ValidationError):
    pass


class AreaOutOfRange(ValidationError):
    pass


class BracketInvalid(ValidationError):
    pass


class SameSide(ValidationError):
    pass


class ParallelLines(ValidationError):
    pass


class VertexNonSmooth(NumericalFailure):
    """The map is only one-sided differentiable at a vertex or its preimage."""


class VertexAmbiguous(NumericalFailure):
    pass


class NoClosure(NumericalFailure):
    pass
