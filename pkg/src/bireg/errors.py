"""Exception types, named after the constraint they report."""


class BiregError(Exception):
    """Base class for all library errors."""


# --- parameter validation ---------------------------------------------------

class ParameterError(BiregError, ValueError):
    """Invalid model parameters."""


class NonIntegerKN(ParameterError):
    """k*n is not an integer."""


class NonIntegerKD(ParameterError):
    """k*d is not an integer."""


class NonIntegerK(ParameterError):
    """k itself must be an integer for this construction."""


class KdExceedsN(ParameterError):
    """kd > n."""


class DExceedsN(ParameterError):
    """d > n."""


class NonIntegralLayer(ParameterError):
    """A layer size k^i * m is not an integer."""


class InvalidDegree(ParameterError):
    """Layered-construction degree out of range."""


# --- graph operations -------------------------------------------------------

class GraphError(BiregError, ValueError):
    """Invalid graph operation."""


class IndexOutOfRange(GraphError):
    """Vertex index outside the graph."""


class DirectionUnavailable(GraphError):
    """Iterated neighborhood ran past the first or last layer."""


class EmptySide(GraphError):
    """Degree summary requested for a graph with an empty side."""


class PreconditionViolated(GraphError):
    """A switching precondition failed; the message names the edge."""


class EdgeAbsent(GraphError):
    """The queried edge is not in the graph."""


class LayerOutOfRange(GraphError):
    """Layer index outside 1..h."""


class UnequalSides(GraphError):
    """Operation requires |A| = |B|."""


class DegreeViolation(GraphError):
    """A vertex violates the biregularity invariant."""


# --- sampling / enumeration -------------------------------------------------

class SamplerError(BiregError, ValueError):
    """Sampling request cannot be served."""


class RejectionInfeasible(SamplerError):
    """Rejection sampling would be too slow for these parameters."""


class TooLarge(SamplerError):
    """Instance exceeds the exhaustive-enumeration bound."""


class InsufficientSamples(SamplerError):
    """Not enough draws for the requested statistic."""


# --- analytics / experiments ------------------------------------------------

class OutOfRange(BiregError, ValueError):
    """Numeric argument outside its documented domain."""


class HypothesisViolated(BiregError, ValueError):
    """A formula's hypothesis (e.g. s + d <= n) does not hold."""


class InvalidP(BiregError, ValueError):
    """Edge probability outside [0, 1]."""


class NonPositiveValue(BiregError, ValueError):
    """Magnification ratios must be positive."""


class ExpFormOrderingError(BiregError, ArithmeticError):
    """The exact no-edge product exceeded the asymptotic exponential form."""


class InvalidConfig(BiregError, ValueError):
    """Trial configuration violates a mode invariant."""


# --- file formats -------------------------------------------------------------

class ParseError(BiregError, ValueError):
    """Malformed graph or result file; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
