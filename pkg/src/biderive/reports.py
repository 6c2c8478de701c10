"""Small result records shared by the construction and probe modules."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS, FAIL, PARTIAL, UNKNOWN = "pass", "fail", "partial", "unknown"


@dataclass
class Check:
    """One named outcome.  ``witness`` holds element strings."""
    name: str
    status: str
    witness: list = field(default_factory=list)
    detail: str = ""
    anchor: str = ""

    @property
    def passed(self):
        return self.status == PASS

    def to_json(self):
        return {"check": self.name, "status": self.status, "witness": list(self.witness),
                "detail": self.detail, "anchor": self.anchor}


def render_tensor(text):
    """Write two-factor variable names as ``x⊗1`` / ``1⊗y``."""
    import re

    def sub(m):
        side, name = m.group(1), m.group(2)
        return f"{name}⊗1" if side == "L" else f"1⊗{name}"

    return re.sub(r"\b([LR])\.([A-Za-z_][A-Za-z0-9_]*)", sub, text)
