"""Checker verdict types: machine-readable evidence attached to a value."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

from ..criteria import ADVISORY_IDS, CriterionId


class EvidenceKind(str, Enum):
    HEADER = "header"
    URL_PATTERN = "url-pattern"
    COOKIE = "cookie"
    DOCTYPE = "doctype"
    MARKUP_FEATURE = "markup-feature"
    DOCUMENT = "document"
    TEST_FAILURE = "test-failure"

    def __str__(self) -> str:
        return self.value


def byte_locus(offset: int) -> str:
    return f"byte {offset}"


def header_locus(name: str) -> str:
    return f"header {name}"


@dataclass(frozen=True)
class Evidence:
    """One observed signal: what kind, in which resource, pointing where."""

    kind: EvidenceKind
    resource_url: str
    detail: str
    exact_locus: str = ""

    def __post_init__(self) -> None:
        if not self.detail:
            raise ValueError("evidence detail must be non-empty")


@dataclass(frozen=True)
class CheckResult:
    """One checker's verdict for one criterion over one snapshot."""

    criterion: CriterionId
    value: int
    evidence: tuple[Evidence, ...]
    advisory: bool = False
    details: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise ValueError("check value must be 0 or 1")
        if self.value == 1 and not self.evidence:
            raise ValueError(f"{self.criterion}: value 1 requires evidence")
        if self.advisory and self.criterion not in ADVISORY_IDS:
            raise ValueError(f"{self.criterion}: only storage heuristics are advisory")
