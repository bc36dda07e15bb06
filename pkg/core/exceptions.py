class GraphStarError(Exception):
    """Base class for every error raised by the graphstar library."""


# mathcore
class NotHermitian(GraphStarError):
    pass


class NoConvergence(GraphStarError):
    pass


class NotPSD(GraphStarError):
    pass


class DimensionMismatch(GraphStarError):
    pass


# graphwords
class GraphFormatError(GraphStarError):
    pass


class BadVertex(GraphStarError):
    pass


class CapExceeded(GraphStarError):
    pass


class VertexAbsent(GraphStarError):
    pass


class NonUnique(GraphStarError):
    """A standard form search found more than one minimal factorization."""


# staralg
class AlgebraMismatch(GraphStarError):
    pass


class SpecInvalid(GraphStarError):
    pass


class IncompatibleStates(GraphStarError):
    pass


class BandExceeded(GraphStarError):
    pass


# verify
class GramNotPSD(GraphStarError):
    pass


class PairNotInX(GraphStarError):
    pass


class HypothesisNotMet(GraphStarError):
    """Raised for instances that do not satisfy a lemma's hypotheses; counted as skipped."""


# fock / groups / dilate
class BudgetExceeded(GraphStarError):
    pass


class SizeCap(GraphStarError):
    pass


class NotContraction(GraphStarError):
    pass


class NotDoublyCommuting(GraphStarError):
    pass


class InvalidMatrix(GraphStarError):
    """Input is not a finite two-dimensional complex array."""
