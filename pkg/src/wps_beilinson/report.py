from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class VerificationReport:
    check: str
    weights: tuple[int, ...] | None = None
    params: dict[str, Any] = field(default_factory=dict)
    passed: bool = True
    strands: list[dict] = field(default_factory=list)
    series: dict[str, Any] | None = None
    failures: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)
    seconds: float | None = None
    children: list["VerificationReport"] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.passed = False
        self.failures.append(message)

    def absorb(self, child: "VerificationReport") -> None:
        self.children.append(child)
        if not child.passed:
            self.passed = False
            self.failures.append(f"{child.check}: " + "; ".join(child.failures[:3]))

    def __bool__(self):
        return self.passed

    def to_dict(self, timings: bool = False) -> dict:
        out: dict[str, Any] = {
            "check": self.check,
            "weights": list(self.weights) if self.weights else None,
            "params": self.params,
            "pass": self.passed,
        }
        if self.strands:
            out["strands"] = self.strands
        if self.series is not None:
            out["series"] = self.series
        if self.failures:
            out["failures"] = self.failures
        if self.details:
            out["details"] = self.details
        if self.caveats:
            out["caveats"] = self.caveats
        if timings and self.seconds is not None:
            out["seconds"] = round(self.seconds, 4)
        if self.children:
            out["children"] = [c.to_dict(timings) for c in self.children]
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        w = ",".join(map(str, self.weights)) if self.weights else "-"
        params = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        line = f"[{status}] {self.check} w=({w}) {params}".rstrip()
        if self.failures:
            line += "\n    " + "\n    ".join(self.failures[:5])
        return line
