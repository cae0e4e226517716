"""Machine-readable pass/fail verdicts with witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Verdict:
    """Outcome of a mathematical check.

    ``details`` carries witnesses (counterexample horns, non-unique filler
    pairs, ...) in JSON-serializable form so failures are reproducible.
    """

    label: str
    ok: bool
    details: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"label": self.label, "ok": self.ok, "details": self.details}

    def __bool__(self) -> bool:
        return self.ok

    def expect(self) -> "Verdict":
        if not self.ok:
            raise AssertionError(f"{self.label}: {self.details}")
        return self
