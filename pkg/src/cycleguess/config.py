"""Run configuration: command-line flags override CYCLEGUESS_* environment variables,
which override the defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .core import UsageError

ENV_PREFIX = "CYCLEGUESS_"


def _int(raw) -> int:
    # accepts "100000000" as well as "1e8"
    if isinstance(raw, str) and not raw.strip().lstrip("-").isdigit():
        value = float(raw)
        if not value.is_integer():
            raise ValueError(raw)
        return int(value)
    return int(raw)


_CONVERT = {"int": _int, "float": float, "str": str}


@dataclass(frozen=True)
class RunConfig:
    enumeration_budget: int = 10**8
    solver_time_budget_s: int = 300
    tolerance: float = 1e-9
    seed: int = 0
    output_format: str = "text"
    threads: int = 1
    explicit_budget: int = 2**14

    def __post_init__(self):
        if self.enumeration_budget <= 0 or self.solver_time_budget_s <= 0 or self.explicit_budget <= 0:
            raise UsageError("budgets must be positive")
        if not 0 < self.tolerance <= 1e-3:
            raise UsageError("tolerance must lie in (0, 1e-3]")
        if self.output_format not in ("text", "structured"):
            raise UsageError("output format must be 'text' or 'structured'")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")

    @classmethod
    def resolve(cls, flags: dict | None = None, environ: dict | None = None) -> "RunConfig":
        environ = os.environ if environ is None else environ
        flags = flags or {}
        values = {}
        for f in fields(cls):
            raw = flags.get(f.name)
            if raw is None:
                raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            try:
                values[f.name] = _CONVERT[f.type](raw)
            except ValueError as exc:
                raise UsageError(f"bad value for {f.name}: {raw!r}") from exc
        return cls(**values)
