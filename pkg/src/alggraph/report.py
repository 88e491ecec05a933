"""Verdict reports shared by all theorem verifiers.

Failed hypotheses yield `inapplicable`, never pass/fail; a `fail` verdict
always carries machine-readable counterexamples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


PASS, FAIL, INAPPLICABLE = "pass", "fail", "inapplicable"


@dataclass
class Report:
    name: str
    verdict: str = PASS
    hypotheses: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    counterexamples: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def hypothesis(self, key: str, ok, detail=None) -> bool:
        self.hypotheses[key] = bool(ok) if detail is None else {
            "ok": bool(ok),
            "detail": detail,
        }
        if not ok:
            self.verdict = INAPPLICABLE
        return bool(ok)

    def applicable(self) -> bool:
        return self.verdict != INAPPLICABLE

    def check(self, name: str, ok: bool, counterexample=None):
        self.checks.append({"name": name, "ok": bool(ok)})
        if not ok:
            self.verdict = FAIL
            if counterexample is not None:
                self.counterexamples.append({"check": name, **counterexample})

    def note(self, text: str):
        self.notes.append(text)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "hypotheses": self.hypotheses,
            "checks": self.checks,
            "counterexamples": self.counterexamples,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    @property
    def exit_code(self) -> int:
        return {PASS: 0, FAIL: 1, INAPPLICABLE: 2}[self.verdict]
