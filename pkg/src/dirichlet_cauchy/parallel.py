"""Worker-count configuration shared by the Monte Carlo code and the CLI."""
from __future__ import annotations

import os

WORKERS_ENV = "DIRICHLET_CAUCHY_WORKERS"


def default_workers() -> int:
    """Worker count from ``DIRICHLET_CAUCHY_WORKERS``, else the available CPUs."""
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
        return n
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return max(1, os.cpu_count() or 1)
