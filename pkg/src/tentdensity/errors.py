"""Exception types shared across the package."""

import os

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_TUPLE_BUDGET = 10**7
BUDGET_ENV = "TENTDENSITY_BUDGET"


class ResourceLimitError(RuntimeError):
    """A configured resource guard (memory, search nodes, tuples) was hit."""


class SearchBudgetExceeded(ResourceLimitError):
    """Homomorphism search ran out of nodes before deciding.

    This is the "inconclusive" outcome: neither a witness nor a proof of
    nonexistence was obtained.
    """

    def __init__(self, nodes):
        super().__init__(f"search inconclusive after {nodes} nodes")
        self.nodes = nodes


def env_budget(default):
    """Return the budget from ``TENTDENSITY_BUDGET`` if set, else ``default``."""
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{BUDGET_ENV} must be positive, got {raw!r}")
    return value
