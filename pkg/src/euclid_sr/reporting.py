"""Pass/fail check reports shared by the gadget, layout, and reduction validators."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    boundary: bool = False  # satisfied with equality; worth surfacing


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", boundary: bool = False) -> None:
        self.checks.append(Check(name, bool(passed), detail, boundary))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def boundary_cases(self) -> list[Check]:
        return [c for c in self.checks if c.boundary]

    def merged(self, other: "Report") -> "Report":
        return Report(self.checks + other.checks)

    def summary(self) -> str:
        bad = self.failures
        head = f"{len(self.checks)} checks, {len(bad)} failed"
        if bad:
            head += ": " + "; ".join(f"{c.name} ({c.detail})" for c in bad[:8])
        return head
