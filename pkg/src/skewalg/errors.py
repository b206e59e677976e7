"""Exception hierarchy.

Every error carries a stable ``code`` used by the command line front end as its
exit status: 3 for precondition violations, 4 for precision exhaustion and 5
for internal-consistency failures.
"""


class SkewAlgError(Exception):
    code = 3


class BadParameters(SkewAlgError, ValueError):
    pass


class IndexHypothesisViolated(BadParameters):
    """The index s does not divide q_k - 1."""


class NotInvertible(SkewAlgError, ZeroDivisionError):
    pass


class NotUnit(NotInvertible):
    pass


class ZeroElement(SkewAlgError, ValueError):
    pass


class InfiniteReducedOrder(SkewAlgError, ValueError):
    pass


class NoValidExtension(SkewAlgError):
    pass


class SingularAtPrecision(SkewAlgError):
    pass


class PrecisionExhausted(SkewAlgError):
    code = 4


class NoConvergence(PrecisionExhausted):
    pass


class ReductionStalled(PrecisionExhausted):
    pass


class InternalConsistencyError(SkewAlgError):
    code = 5


class CoefficientNotInBaseField(InternalConsistencyError):
    pass


class NotGaloisInvariant(InternalConsistencyError):
    pass


class WPositiveViolation(InternalConsistencyError):
    pass


class AmbiguousExtension(InternalConsistencyError):
    """More than one inequivalent extension of tau was found."""
