"""Work budgets for the exhaustive evaluators.

Every brute-force oracle in the workbench is doubly exponential in the worst
case, so each one ticks a shared step counter and raises ``BudgetExceeded``
instead of running away.  Budgets are plain mutable counters; evaluation
results never depend on the budget value, only whether the evaluation
completes at all.
"""

from __future__ import annotations

from .errors import BudgetExceeded

DEFAULT_STEPS = 20_000_000


class StepBudget:
    """Counts evaluation steps and fails loudly when they run out."""

    __slots__ = ("remaining", "limit")

    def __init__(self, limit: int = DEFAULT_STEPS):
        self.limit = limit
        self.remaining = limit

    def tick(self, n: int = 1) -> None:
        self.remaining -= n
        if self.remaining < 0:
            raise BudgetExceeded(f"step budget of {self.limit} exhausted")

    def require(self, n: int) -> None:
        """Fail upfront if an enumeration of n candidates cannot fit."""
        if n > self.remaining:
            raise BudgetExceeded(
                f"enumeration of {n} candidates exceeds remaining budget "
                f"({self.remaining} of {self.limit})"
            )
