"""Exception types shared across the package."""


class GenlabError(Exception):
    """Base class for all package errors."""


class MismatchedUniverse(GenlabError):
    """Two sets (or a set and a class) reference different declared universes."""


class ParseError(GenlabError):
    """A class-spec document is malformed."""


class UUSViolation(GenlabError):
    """A declared hypothesis support is finite."""


class DuplicateId(GenlabError):
    """Two hypotheses in one class share an id."""


class UnknownBuiltin(GenlabError):
    """No built-in class with the requested name."""


class EmptyClass(GenlabError):
    """Operation requires at least one hypothesis."""


class TooManyHypotheses(GenlabError):
    """Finite class exceeds the configured cell-decomposition limit."""


class PreconditionViolated(GenlabError):
    """A documented precondition of a generator or adversary does not hold."""


class InvalidNoise(GenlabError):
    """A declared noise element lies inside the target support."""


class NoWitness(GenlabError):
    """No witness prefix of the requested length exists at this noise level."""


class Inconclusive(GenlabError):
    """Probing could not certify any case within the probe budget."""


class HorizonZero(GenlabError):
    """Games need a horizon of at least one round."""


class UnknownSuite(GenlabError):
    """No verification suite with the requested name."""
