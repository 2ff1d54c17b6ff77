"""Exception hierarchy shared by every module."""


class FisherWitError(ValueError):
    """Base class; CLI maps subclasses of this to exit code 2 unless numerical."""


class NonSquare(FisherWitError):
    pass


class NonHermitian(FisherWitError):
    pass


class DimensionLimit(FisherWitError):
    pass


class DimensionMismatch(FisherWitError):
    pass


class NotPositive(FisherWitError):
    pass


class TraceNotOne(FisherWitError):
    pass


class NotNormalized(FisherWitError):
    """POVM elements do not sum to the identity, or Kraus operators are not trace preserving."""


class OutOfDomain(FisherWitError):
    pass


class Unsupported(FisherWitError):
    pass


class InfeasibleWitness(FisherWitError):
    pass


class NotBinary(FisherWitError):
    pass


class EmptyFreeOps(FisherWitError):
    pass


class SizeLimit(FisherWitError):
    pass


class NumericalFailure(FisherWitError):
    """Solver or eigensolver did not reach the requested accuracy."""


class InfiniteRobustness(FisherWitError):
    pass
