"""
Exceptions raised by the group, tree and process layers.
"""


class ArborealError(Exception):
    """Base class for every error raised by this package."""


class DegreeMismatchError(ArborealError, ValueError):
    """Permutations or groups of different degrees were combined."""


class CapExceededError(ArborealError):
    """An enumeration would produce more objects than the configured cap."""

    def __init__(self, cap: int, what: str = "elements"):
        self.cap = cap
        self.what = what
        super().__init__(f"refusing to enumerate more than {cap} {what}")


class NotASubgroupError(ArborealError, ValueError):
    """A claimed subgroup is not contained in the ambient group."""


class NotTransitiveError(ArborealError, ValueError):
    """An operation that needs a transitive group got an intransitive one."""


class InvalidPairError(ArborealError, ValueError):
    """A SubgroupPair or coset pairing violates its invariants."""


class WordTooLongError(ArborealError, ValueError):
    """A word is longer than the tree depth allows."""


class LetterOutOfRangeError(ArborealError, ValueError):
    """A word contains a letter outside {1, ..., d}."""


class ShapeMismatchError(ArborealError, ValueError):
    """Portraits of different arity or depth were combined."""


class WrongDepthError(ArborealError, ValueError):
    """The pattern depth does not support the requested operation."""


class UnverifiedPatternError(ArborealError):
    """A pattern failed the structural checks an operation depends on."""


class NonUniformFibersError(ArborealError):
    """Fiber sizes differ between roots, so the product measure is not uniform."""


class ZeroProbabilityHistoryError(ArborealError, ValueError):
    """Conditioning on a history that has probability zero."""


class InvalidParamsError(ArborealError, ValueError):
    """Family parameters are outside the valid range."""


class NotationError(ArborealError, ValueError):
    """Cycle, word or portrait notation could not be parsed."""


class SpecFileError(ArborealError, ValueError):
    """A group or pattern specification file is malformed."""


class LevelOutOfRangeError(ArborealError, ValueError):
    """A requested level is outside what the object or the configuration allows."""
