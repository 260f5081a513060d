"""Check records and reports shared by the verification modules."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from .groebner import BudgetExceeded

PASS, FAIL, SKIPPED = "pass", "fail", "skipped-budget"


@dataclass
class CheckResult:
    check_id: str
    claim_ref: str
    status: str
    witness: str = ""
    timing_ms: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_json(self, timing: bool = True) -> dict:
        d = {"check_id": self.check_id, "claim_ref": self.claim_ref, "status": self.status}
        if self.witness:
            d["witness"] = self.witness
        if self.details:
            d["details"] = self.details
        if timing:
            d["timing_ms"] = round(self.timing_ms, 3)
        return d


@dataclass
class VerificationReport:
    chart: str
    checks: list = field(default_factory=list)

    def add(self, c: CheckResult) -> CheckResult:
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def budget_exceeded(self) -> bool:
        return any(c.status == SKIPPED for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    def sorted(self) -> "VerificationReport":
        return VerificationReport(self.chart, sorted(self.checks, key=lambda c: c.check_id))

    def to_json(self, timing: bool = True) -> list:
        return [dict(c.to_json(timing), chart=self.chart) for c in self.sorted().checks]

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True, ensure_ascii=False)

    def summary(self) -> str:
        lines = [f"{c.status.upper():>15}  {c.check_id}  {c.witness}".rstrip()
                 for c in self.sorted().checks]
        return "\n".join(lines)


@contextmanager
def timed(report: VerificationReport, check_id: str, claim_ref: str):
    """Run a check body; it sets ``rec.status``/``rec.witness``.  Budget
    overruns become ``skipped-budget``, other exceptions propagate."""
    rec = CheckResult(check_id, claim_ref, PASS)
    t0 = time.perf_counter()
    try:
        yield rec
    except BudgetExceeded as e:
        rec.status, rec.witness = SKIPPED, str(e)
    finally:
        rec.timing_ms = (time.perf_counter() - t0) * 1000
        report.add(rec)


def status_of(ok: bool) -> str:
    return PASS if ok else FAIL
