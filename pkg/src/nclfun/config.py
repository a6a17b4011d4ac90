"""Run configuration shared by the command-line entry points."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .counting import DEFAULT_BUDGET, CountCache
from .motives import IDENTITY_TOL

CACHE_ENV = "NCL_CACHE_DIR"
FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    B: int = 6
    identity_tol: float = IDENTITY_TOL
    cluster_tol: float = 1e-6
    budget: int = DEFAULT_BUDGET
    cache_dir: Path | None = None
    fmt: str = "json"
    threads: int = 1

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("cutoff B must be >= 1")
        if not (self.identity_tol > 0 and self.cluster_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}")
        if self.threads < 1:
            raise ValueError("thread count must be >= 1")

    @classmethod
    def from_env(cls, cache_dir: str | None = None, **kwargs) -> "RunConfig":
        """Explicit cache_dir wins over NCL_CACHE_DIR; no directory means no cache."""
        raw = cache_dir or os.environ.get(CACHE_ENV) or None
        return cls(cache_dir=Path(raw) if raw else None, **kwargs)

    def cache(self) -> CountCache | None:
        return CountCache(self.cache_dir) if self.cache_dir is not None else None
