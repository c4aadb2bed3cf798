"""Memory budget for dense oracle-side materializations.

The streaming path never allocates anything proportional to the ambient
dimension; only oracle helpers (dense operator, dense data matrix) do,
and they must fit in ``SKSV_BUDGET_MB`` megabytes (default 512).
"""

import os

from .errors import BudgetExceededError

DEFAULT_BUDGET_MB = 512
ENV_VAR = "SKSV_BUDGET_MB"


def budget_bytes(budget_mb=None) -> int:
    """Resolve the byte budget: explicit argument, else env var, else default."""
    if budget_mb is None:
        raw = os.environ.get(ENV_VAR)
        budget_mb = int(raw) if raw else DEFAULT_BUDGET_MB
    if budget_mb <= 0:
        raise ValueError(f"budget must be positive, got {budget_mb} MB")
    return budget_mb * 1024 * 1024


def check_budget(nbytes: int, what: str, budget_mb=None) -> None:
    """Raise BudgetExceededError if a planned allocation is over budget."""
    cap = budget_bytes(budget_mb)
    if nbytes > cap:
        raise BudgetExceededError(
            f"{what} needs {nbytes} bytes but the budget is {cap} "
            f"(raise {ENV_VAR} or pass budget_mb to override)"
        )
