"""Three-valued certified verdicts.

``CertifiedYes`` / ``CertifiedNo`` promise a closed-form rule valid at
every index, never just the sampled horizon; ``Undecided`` is the honest
fallback and carries whatever finite evidence was gathered.  Membership
in an ideal and convergence of a series are undecidable in general, so
``Undecided`` is a first-class answer, not an error.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping


class Outcome(enum.Enum):
    CERTIFIED_YES = "CertifiedYes"
    CERTIFIED_NO = "CertifiedNo"
    UNDECIDED = "Undecided"

    def __str__(self) -> str:  # report-friendly
        return self.value


@dataclass(frozen=True)
class Evidence:
    """Rule citation backing a verdict."""

    rule: str
    params: tuple[tuple[str, str], ...] = ()
    horizon: int | None = None

    @staticmethod
    def of(rule: str, horizon: int | None = None, **params: Any) -> "Evidence":
        return Evidence(rule, tuple((k, str(v)) for k, v in sorted(params.items())), horizon)

    def describe(self) -> str:
        bits = [self.rule]
        if self.params:
            bits.append(";".join(f"{k}={v}" for k, v in self.params))
        if self.horizon is not None:
            bits.append(f"horizon={self.horizon}")
        return " ".join(bits)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    evidence: Evidence

    @property
    def is_yes(self) -> bool:
        return self.outcome is Outcome.CERTIFIED_YES

    @property
    def is_no(self) -> bool:
        return self.outcome is Outcome.CERTIFIED_NO

    @property
    def is_undecided(self) -> bool:
        return self.outcome is Outcome.UNDECIDED

    def negate(self) -> "Verdict":
        """Swap yes/no, preserving the citation (used for coideal views)."""
        if self.is_yes:
            return Verdict(Outcome.CERTIFIED_NO, self.evidence)
        if self.is_no:
            return Verdict(Outcome.CERTIFIED_YES, self.evidence)
        return self

    def to_json(self) -> Mapping[str, Any]:
        return {
            "outcome": str(self.outcome),
            "rule": self.evidence.rule,
            "params": dict(self.evidence.params),
            "horizon": self.evidence.horizon,
        }


def yes(rule: str, horizon: int | None = None, **params: Any) -> Verdict:
    return Verdict(Outcome.CERTIFIED_YES, Evidence.of(rule, horizon, **params))


def no(rule: str, horizon: int | None = None, **params: Any) -> Verdict:
    return Verdict(Outcome.CERTIFIED_NO, Evidence.of(rule, horizon, **params))


def undecided(rule: str = "no-rule-applies", horizon: int | None = None, **params: Any) -> Verdict:
    return Verdict(Outcome.UNDECIDED, Evidence.of(rule, horizon, **params))
