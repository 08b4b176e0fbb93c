"""Exact tools for guessing games and index coding on cycle graphs."""

from .core import BudgetExceeded, ColourSpace, Cycle, CycleGuessError, UsageError, factorize
from .protocol import (
    FixedSet,
    Protocol,
    RoundDownSpec,
    build_fcp,
    constant_protocol,
    enumerate_fixed_set,
    evaluate,
    restrict,
    round_down_bound,
)

__version__ = "0.1.0"
