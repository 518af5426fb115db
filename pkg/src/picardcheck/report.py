"""Check reports shared by every checker in the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"
REFUTATION_ONLY_PASS = "refutation_only_pass"

VERDICTS = (PASS, FAIL, INAPPLICABLE, REFUTATION_ONLY_PASS)
PASSING = (PASS, REFUTATION_ONLY_PASS)

# Strict inequalities whose observed gap is positive but below this are "fragile".
FRAGILE_GAP = 1e-12


@dataclass(frozen=True)
class Condition:
    name: str
    verdict: str
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and self.witness is None:
            raise ValueError(f"condition {self.name!r} failed without a witness")

    @property
    def passed(self) -> bool:
        return self.verdict in PASSING

    @property
    def min_gap(self) -> float | None:
        return self.details.get("min_gap")


@dataclass(frozen=True)
class CheckReport:
    certificate_kind: str
    conditions: tuple[Condition, ...]
    sample_size: int = 0
    seed: int | None = None
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        """True when no condition failed and at least one was decided."""
        if any(c.verdict == FAIL for c in self.conditions):
            return False
        return any(c.passed for c in self.conditions)

    @property
    def failed(self) -> tuple[Condition, ...]:
        return tuple(c for c in self.conditions if c.verdict == FAIL)

    @property
    def refutation_only(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.conditions if c.verdict == REFUTATION_ONLY_PASS)

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def verdict(self) -> str:
        if any(c.verdict == FAIL for c in self.conditions):
            return FAIL
        if not any(c.passed for c in self.conditions):
            return INAPPLICABLE
        if self.refutation_only:
            return REFUTATION_ONLY_PASS
        return PASS

    def worst_margin(self) -> float | None:
        gaps = [c.min_gap for c in self.conditions if c.min_gap is not None]
        return min(gaps) if gaps else None

    def to_text(self) -> str:
        lines = [f"[{self.certificate_kind}] verdict={self.verdict()} samples={self.sample_size} seed={self.seed}"]
        for c in self.conditions:
            line = f"  {c.name}: {c.verdict}"
            if c.details:
                line += " " + " ".join(f"{k}={_fmt(v)}" for k, v in sorted(c.details.items()))
            lines.append(line)
            if c.witness is not None:
                lines.append("    witness: " + " ".join(f"{k}={_fmt(v)}" for k, v in c.witness.items()))
        for note in self.notes:
            lines.append(f"  note: {note}")
        return "\n".join(lines)


def strict_condition(name: str, min_gap: float, witness: dict | None, **details) -> Condition:
    """Verdict for a strict inequality observed with smallest slack `min_gap`."""
    details = {"min_gap": min_gap, **details}
    if witness is not None and not min_gap > 0:
        return Condition(name, FAIL, witness, details)
    details["fragile"] = bool(min_gap < FRAGILE_GAP)
    return Condition(name, PASS, None, details)


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return "(" + ",".join(_fmt(x) for x in v) + ")"
    return str(v)
