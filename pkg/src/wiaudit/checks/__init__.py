"""Automated rubric checkers, all pure functions of a snapshot."""

from __future__ import annotations

from ..snapshot import SiteSnapshot
from .feeds import FeedVerdict, validate_feed_document, validate_feeds  # noqa: F401
from .mobile import MOBILE_TESTS, MobileSettings, check_mobile_ok  # noqa: F401
from .rdf import (  # noqa: F401
    RdfStructureError,
    Triple,
    extract_triples,
    parse_triples,
    validate_rdf,
)
from .results import CheckResult, Evidence, EvidenceKind  # noqa: F401
from .semantics import SemanticSummary, extract_semantics  # noqa: F401
from .storage import detect_storage  # noqa: F401
from .technology import detect_technologies  # noqa: F401


def run_all_checkers(
    snapshot: SiteSnapshot, mobile_settings: MobileSettings | None = None
) -> list[CheckResult]:
    """Every automated checker over one snapshot, in stable criterion order."""
    _, semantics_result = extract_semantics(snapshot)
    machine, human = detect_storage(snapshot)
    results = [
        detect_technologies(snapshot),
        check_mobile_ok(snapshot, mobile_settings),
        semantics_result,
        validate_rdf(snapshot),
        validate_feeds(snapshot),
        machine,
        human,
    ]
    return results
