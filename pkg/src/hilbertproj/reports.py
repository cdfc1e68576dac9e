"""Small result records returned by the verifiers."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of a sampled verification.

    ``margin`` is the measured worst-case quantity that is compared against
    ``tolerance``; ``details`` carries check-specific extras.
    """

    name: str
    passed: bool
    margin: float
    tolerance: float
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["status"] = self.status
        return d
