"""Three-valued, witness-carrying decision results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

YES = "CertifiedYes"
NO = "CertifiedNo"
UNKNOWN = "Unknown"

EXIT_CODES = {YES: 0, NO: 1, UNKNOWN: 2}


@dataclass
class Verdict:
    decider: str
    status: str
    radius: int | None = None
    witness: Any = None
    transcript: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in EXIT_CODES:
            raise ValueError(f"unknown verdict status {self.status!r}")

    @property
    def yes(self) -> bool:
        return self.status == YES

    @property
    def no(self) -> bool:
        return self.status == NO

    @property
    def unknown(self) -> bool:
        return self.status == UNKNOWN

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> dict:
        return {
            "decider": self.decider,
            "parameters": self.parameters,
            "status": self.status,
            "radius": self.radius,
            "witness": self.witness,
            "transcript": self.transcript,
        }

    @classmethod
    def from_json(cls, data: dict) -> Verdict:
        return cls(
            decider=data["decider"],
            status=data["status"],
            radius=data.get("radius"),
            witness=data.get("witness"),
            transcript=data.get("transcript") or {},
            parameters=data.get("parameters") or {},
        )
