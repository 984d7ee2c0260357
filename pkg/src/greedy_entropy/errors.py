"""Exception hierarchy shared by all modules."""


class GreedyEntropyError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(GreedyEntropyError, ValueError):
    pass


class NotInnerProductSpace(GreedyEntropyError, ValueError):
    """An operation needing an inner product was given an l_p space with p != 2."""


class RankDeficient(GreedyEntropyError):
    """The vector lies (numerically) in the span of the basis."""


class SolverFailure(GreedyEntropyError):
    pass


class EmptySet(GreedyEntropyError, ValueError):
    pass


class DegenerateSet(GreedyEntropyError, ValueError):
    pass


class BudgetExceeded(GreedyEntropyError):
    pass


class LpBudgetExceeded(BudgetExceeded):
    pass


class RankExhausted(GreedyEntropyError):
    """No admissible atom extends the current span.

    The partial trace collected before the failure is kept on ``trace``.
    """

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


class SingularSystem(GreedyEntropyError):
    pass


class IterationBudgetExceeded(GreedyEntropyError):
    pass
