"""Check reports with a deterministic JSON form."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

_SOURCE_DIR = Path(__file__).resolve().parent


def code_version() -> str:
    """sha256 over the package sources, in file-name order."""
    digest = hashlib.sha256()
    for path in sorted(_SOURCE_DIR.glob("*.py")):
        digest.update(path.name.encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()[:16]


@dataclass
class Report:
    suite: str
    nsites: Any
    seed: Any
    trials: Any
    claim: str = ""
    passed: bool = True
    counterexample: dict | None = None
    observation: bool = False
    details: dict = field(default_factory=dict)

    def fail(self, counterexample: dict) -> None:
        self.passed = False
        if self.counterexample is None:
            self.counterexample = counterexample

    def to_json_obj(self) -> dict:
        return {
            "suite": self.suite,
            "N": self.nsites,
            "seed": self.seed,
            "trials": self.trials,
            "pass": self.passed,
            "counterexample": self.counterexample,
            "claim": self.claim,
            "observation": self.observation,
            "details": self.details,
            "code_version": code_version(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=2, default=str)

    def summary(self) -> str:
        status = "PASS" if self.passed else ("NOTE" if self.observation else "FAIL")
        return f"{status} {self.suite} N={self.nsites} seed={self.seed} [{self.claim}]"

    def __bool__(self) -> bool:
        return self.passed


def merge(suite: str, reports: list) -> Report:
    """Combine sub-reports; the first failing one (in list order) supplies the counterexample."""
    combined = Report(suite, [r.nsites for r in reports], [r.seed for r in reports],
                      [r.trials for r in reports], claim=",".join(sorted({r.claim for r in reports})))
    combined.details["parts"] = [r.to_json_obj() | {"code_version": None} for r in reports]
    for r in reports:
        if not r.passed and not r.observation:
            combined.fail(dict(r.counterexample or {}, suite=r.suite, N=r.nsites))
    return combined
