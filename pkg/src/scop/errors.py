"""Exception hierarchy shared across the package."""


class ScopError(Exception):
    """Base class for every error raised by :mod:`scop`."""


class SubsetProbError(ScopError, ValueError):
    pass


class EmptySubset(SubsetProbError):
    pass


class OutOfUnitInterval(SubsetProbError):
    pass


class UnknownId(ScopError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DuplicateId(ScopError, ValueError):
    pass


class EmptyFactorList(ScopError, ValueError):
    pass


class NonSingletonProbability(ScopError, ValueError):
    pass


class NotAnExperiment(ScopError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class OutcomeNotPossible(ScopError, ValueError):
    pass


class OutcomeClash(ScopError, ValueError):
    pass


class NoSpectrum(ScopError, ValueError):
    pass


class CapExceeded(ScopError, ValueError):
    pass


class NotComplete(ScopError, ValueError):
    pass


class DomainMismatch(ScopError, ValueError):
    pass


class NotComposable(ScopError, ValueError):
    pass


class CovarianceViolation(ScopError, ValueError):
    pass


class EmptyRegion(ScopError, ValueError):
    pass


class ZeroProbabilityRegion(ScopError, ValueError):
    pass


class NotNested(ScopError, ValueError):
    pass


class PartitionInvalid(ScopError, ValueError):
    pass


class TooManyBlocks(ScopError, ValueError):
    pass


class DuplicatePosition(ScopError, ValueError):
    pass
