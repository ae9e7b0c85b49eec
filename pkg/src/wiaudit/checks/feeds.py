"""RSS 2.0 and Atom feed validation, structural rules only."""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlsplit

from ..criteria import CriterionId
from ..html_scan import parse_media_type
from ..snapshot import FEED_MEDIA_TYPES, DiscoveredVia, SiteSnapshot
from ..xmlpos import XmlElement, XmlSyntaxError, parse_xml
from .results import CheckResult, Evidence, EvidenceKind, byte_locus

ATOM_NS = "http://www.w3.org/2005/Atom"


def _atom(local: str) -> str:
    return "{%s}%s" % (ATOM_NS, local)


@dataclass(frozen=True)
class FeedVerdict:
    url: str
    format: str  # "rss", "atom", or "unknown"
    entry_count: int
    violations: tuple[tuple[str, int], ...]  # (message, byte offset)
    root_offset: int = 0

    @property
    def ok(self) -> bool:
        return self.format in ("rss", "atom") and not self.violations


def _rss_violations(root: XmlElement) -> tuple[list[tuple[str, int]], int]:
    violations: list[tuple[str, int]] = []
    if "version" not in root.attrs:
        violations.append(("<rss> lacks a version attribute", root.offset))
    channels = root.find_all("channel")
    if len(channels) != 1:
        violations.append(
            (f"expected exactly one <channel>, found {len(channels)}", root.offset)
        )
    items = 0
    if channels:
        channel = channels[0]
        for required in ("title", "link", "description"):
            if not channel.find_all(required):
                violations.append((f"<channel> missing <{required}>", channel.offset))
        for index, item in enumerate(channel.find_all("item"), start=1):
            items += 1
            if not item.find_all("title") and not item.find_all("description"):
                violations.append(
                    (f"item {index} has neither <title> nor <description>", item.offset)
                )
    return violations, items


def _atom_violations(root: XmlElement) -> tuple[list[tuple[str, int]], int]:
    violations: list[tuple[str, int]] = []
    for required in ("id", "title", "updated"):
        if not root.find_all(_atom(required)):
            violations.append((f"<feed> missing <{required}>", root.offset))
    entries = root.find_all(_atom("entry"))
    for index, entry in enumerate(entries, start=1):
        for required in ("id", "title", "updated"):
            if not entry.find_all(_atom(required)):
                violations.append((f"entry {index} missing <{required}>", entry.offset))
    return violations, len(entries)


def validate_feed_document(url: str, data: bytes) -> FeedVerdict:
    """Judge one candidate document against the RSS 2.0 or Atom shape."""
    try:
        root = parse_xml(data)
    except XmlSyntaxError as exc:
        return FeedVerdict(
            url=url,
            format="unknown",
            entry_count=0,
            violations=((f"not well-formed XML: {exc.message}", exc.byte_offset),),
        )
    if root.tag == "rss":
        violations, entries = _rss_violations(root)
        return FeedVerdict(url=url, format="rss", entry_count=entries,
                           violations=tuple(violations), root_offset=root.offset)
    if root.tag == _atom("feed"):
        violations, entries = _atom_violations(root)
        return FeedVerdict(url=url, format="atom", entry_count=entries,
                           violations=tuple(violations), root_offset=root.offset)
    return FeedVerdict(
        url=url,
        format="unknown",
        entry_count=0,
        violations=(("root element is neither <rss> nor an Atom <feed>", root.offset),),
    )


def _is_feed_candidate(record) -> bool:
    base, _ = parse_media_type(record.media_type)
    if base in FEED_MEDIA_TYPES:
        return True
    if record.discovered_via is DiscoveredVia.FEED_LINK:
        return True
    path = urlsplit(record.url).path.lower()
    return path.endswith((".rss", ".atom", ".xml")) or "feed" in path


def validate_feeds(snapshot: SiteSnapshot) -> CheckResult:
    """Criterion C6_4: at least one discovered feed candidate validates."""
    evidence: list[Evidence] = []
    candidates: list[str] = []
    valid: list[str] = []
    for record in snapshot.resources:
        if not record.fetched_ok or record.discovered_via is DiscoveredVia.ROOT:
            continue
        if not _is_feed_candidate(record):
            continue
        candidates.append(record.url)
        verdict = validate_feed_document(record.url, snapshot.body(record))
        if verdict.ok:
            valid.append(record.url)
            noun = "items" if verdict.format == "rss" else "entries"
            label = "RSS 2.0" if verdict.format == "rss" else "Atom"
            evidence.append(
                Evidence(
                    kind=EvidenceKind.DOCUMENT,
                    resource_url=record.url,
                    detail=f"valid {label} feed ({verdict.entry_count} {noun})",
                    exact_locus=byte_locus(verdict.root_offset),
                )
            )
        else:
            for message, offset in verdict.violations:
                evidence.append(
                    Evidence(
                        kind=EvidenceKind.DOCUMENT,
                        resource_url=record.url,
                        detail=message,
                        exact_locus=byte_locus(offset),
                    )
                )
    return CheckResult(
        criterion=CriterionId.C6_4,
        value=1 if valid else 0,
        evidence=tuple(evidence),
        details={"candidates": candidates, "valid": valid},
    )
