"""Exception hierarchy shared by every module."""


class SympIndexError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SympIndexError, ValueError):
    """A parameter lies outside the domain where the object is defined."""


class DimensionError(DomainError):
    """A matrix has the wrong shape (odd size, non-square, mismatched n)."""


class InconsistencyError(DomainError):
    """Normal-form counts, lists or parity rules contradict each other."""


class PrecisionError(SympIndexError, ArithmeticError):
    """A floor/integer test cannot be resolved at the available precision."""


class AmbiguityError(SympIndexError):
    """Numerical classification is not decidable at the given tolerance.

    ``candidates`` holds the competing interpretations when they are known.
    """

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = list(candidates or [])


class NotACharacteristicError(DomainError):
    """The eigenvalue-1 structure is not the forced ``N1(1,1)`` factor."""


class ParityError(InconsistencyError):
    """A requested index is incompatible with the block parity rules."""


class DegeneracyError(SympIndexError):
    """A sampled path has a crossing the oracle cannot isolate."""


class PrecisionWarning(UserWarning):
    """A rank decision was taken close to its threshold."""
