"""Verification reports: named residual checks with pass/fail at a tolerance."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Entry:
    check: str
    residual: float
    tolerance: float
    context: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "context": {k: _plain(v) for k, v in self.context.items()},
        }


def _plain(v):
    # numpy scalars and complex numbers are not JSON serializable as-is
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


@dataclass
class VerificationReport:
    entries: list[Entry] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def add(self, check: str, residual: float, tolerance: float, **context) -> Entry:
        # NaN residuals must fail, so they are mapped to +inf
        r = float(residual)
        if r != r:
            r = float("inf")
        entry = Entry(check, r, float(tolerance), context)
        self.entries.append(entry)
        return entry

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.entries.extend(other.entries)
        self.warnings.extend(other.warnings)
        return self

    def __getitem__(self, check: str) -> Entry:
        for e in self.entries:
            if e.check == check:
                return e
        raise KeyError(check)

    def __contains__(self, check: str) -> bool:
        return any(e.check == check for e in self.entries)

    @property
    def failed(self) -> list[Entry]:
        return [e for e in self.entries if not e.passed]

    @property
    def ok(self) -> bool:
        return not self.failed

    def summary(self) -> dict:
        n_fail = len(self.failed)
        return {"total": len(self.entries), "passed": len(self.entries) - n_fail, "failed": n_fail}

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "warnings": list(self.warnings),
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
