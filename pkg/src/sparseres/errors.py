"""Exception hierarchy.

Errors deriving from :class:`HypothesisFailure` signal that a mathematical
precondition did not hold for the given input (the CLI maps them to exit
code 2); everything else is an ordinary input or usage error.
"""


class SparseResError(Exception):
    pass


class HypothesisFailure(SparseResError):
    pass


class NotDivisible(HypothesisFailure):
    pass


class EssentialProper(HypothesisFailure):
    """The unique essential subfamily is a proper subset of the supports."""

    def __init__(self, message, essential=None):
        super().__init__(message)
        self.essential = essential


class NotTight(HypothesisFailure):
    pass


class NoValidChain(HypothesisFailure):
    pass


class CorankTooHigh(HypothesisFailure):
    pass


class SingularSystem(HypothesisFailure):
    pass


class RetryExhausted(SparseResError):
    pass


class SymbolicTooLarge(SparseResError):
    pass


class DegenerateInput(SparseResError):
    pass


class Unbounded(SparseResError):
    pass


class ZeroDimensional(SparseResError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DegenerateSample(SparseResError):
    pass


class TooManySupports(SparseResError):
    pass
