"""Exception hierarchy.

Every error carries a stable ``code`` (the class name) and the process exit
status the command line front end maps it to.
"""

from __future__ import annotations


class NashError(Exception):
    """Base class for all library errors."""

    exit_status = 2

    @property
    def code(self) -> str:
        return type(self).__name__


# -- usage / input errors (exit 1) -------------------------------------------


class UsageError(NashError):
    exit_status = 1


class InvalidBranch(UsageError):
    pass


class NonIncreasingExponents(InvalidBranch):
    pass


class GcdChainNotStrictlyDecreasing(InvalidBranch):
    pass


class FirstExponentNotAboveMultiplicity(InvalidBranch):
    pass


class TrivialGcdTail(InvalidBranch):
    pass


class IndexOutOfRange(UsageError):
    pass


class NotCoprime(UsageError):
    pass


class LevelOutOfRange(UsageError):
    pass


class MalformedDocument(UsageError):
    pass


class DanglingEdge(MalformedDocument):
    pass


class NonPositiveLabel(MalformedDocument):
    pass


class UnknownCommand(UsageError):
    pass


class MissingM(UsageError):
    pass


class UnknownVertex(UsageError):
    pass


class GenericGraphUnsupported(UsageError):
    pass


class NotDivisible(UsageError):
    pass


class ForbiddenCoefficient(UsageError):
    pass


# -- validation / internal consistency failures (exit 2) ---------------------


class ConsistencyError(NashError):
    exit_status = 2


class SeparationMismatch(ConsistencyError):
    pass


class CriteriaDisagree(ConsistencyError):
    pass


class SumInvariantViolated(ConsistencyError):
    pass


class AmbiguousClosestVertex(ConsistencyError):
    pass


class TwoSidedGroupOne(ConsistencyError):
    pass


class InclusionViolated(ConsistencyError):
    pass


class MonotonicityViolated(ConsistencyError):
    pass


class LabelMismatch(ConsistencyError):
    pass


class ValidationFailed(ConsistencyError):
    pass


# -- series arithmetic (exit 2 unless precision) -----------------------------


class SeriesError(NashError):
    exit_status = 2


class DivisorNotUnit(SeriesError):
    pass


class IncompatibleDenominators(SeriesError):
    pass


class OrderNotOne(SeriesError):
    pass


class PrecisionExhausted(SeriesError):
    exit_status = 3
