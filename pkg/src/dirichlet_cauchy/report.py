"""Structured records of identity and inequality checks."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["Case", "VerificationReport", "to_json"]


ABS, REL, LE = "abs", "rel", "le"


def _plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(value, np.ndarray):
        value = value.tolist()
    elif isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, complex):
        return {"re": _plain(value.real), "im": _plain(value.imag)}
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass(frozen=True)
class Case:
    """One check.  ``mode`` decides pass/fail:

    ``abs``: ``|lhs - rhs| <= tolerance``; ``rel``: ``|lhs - rhs| <= tolerance |rhs|``;
    ``le``: ``lhs <= rhs + tolerance`` (one-sided inequalities).
    """

    inputs: dict
    lhs: float
    rhs: float
    tolerance: float
    mode: str = ABS

    def __post_init__(self):
        if self.mode not in (ABS, REL, LE):
            raise ValueError(f"unknown tolerance mode {self.mode!r}")

    @property
    def deviation(self) -> float:
        if self.mode == LE:
            return self.lhs - self.rhs
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        if not (math.isfinite(self.lhs) and math.isfinite(self.rhs)):
            return False
        if self.mode == ABS:
            return self.deviation <= self.tolerance
        if self.mode == REL:
            return self.deviation <= self.tolerance * abs(self.rhs)
        return self.deviation <= self.tolerance

    def as_dict(self) -> dict:
        return {"inputs": _plain(self.inputs), "lhs": _plain(self.lhs), "rhs": _plain(self.rhs),
                "tolerance": self.tolerance, "mode": self.mode, "pass": self.passed}


@dataclass
class VerificationReport:
    suite: str
    cases: list[Case] = field(default_factory=list)
    seed: int | None = None
    elapsed_ms: float = 0.0
    version: str = ""
    workers: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> list[Case]:
        return [c for c in self.cases if not c.passed]

    def add(self, inputs: dict, lhs: float, rhs: float, tolerance: float, mode: str = ABS) -> Case:
        case = Case(dict(inputs), float(lhs), float(rhs), float(tolerance), mode)
        self.cases.append(case)
        return case

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "version": self.version,
            "seed": self.seed,
            "workers": self.workers,
            "n_cases": len(self.cases),
            "n_failed": len(self.failures),
            "pass": self.passed,
            "cases": [c.as_dict() for c in self.cases],
            "extra": _plain(self.extra),
            "elapsed_ms": round(self.elapsed_ms, 3),
        }

    def to_json(self) -> str:
        return to_json(self.as_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "case", "inputs", "lhs", "rhs", "tolerance", "mode", "pass"])
        for i, c in enumerate(self.cases):
            w.writerow([self.suite, i, json.dumps(_plain(c.inputs), sort_keys=True),
                        repr(c.lhs), repr(c.rhs), repr(c.tolerance), c.mode, c.passed])
        return buf.getvalue()


def to_json(obj: dict) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=False)
