"""Semantic structure of the root page: title, heading outline, metadata."""

from __future__ import annotations

from dataclasses import dataclass

from ..criteria import CriterionId
from ..html_scan import HtmlScan, decode_text, is_html_media, scan_html, to_byte_offset
from ..snapshot import SiteSnapshot
from .results import CheckResult, Evidence, EvidenceKind, byte_locus

_DC_PREFIXES = ("dc.", "dc:", "dcterms.", "dcterms:")


@dataclass(frozen=True)
class SemanticSummary:
    """What a machine can read off the page without understanding prose."""

    title: str | None
    language: str | None
    outline: tuple[tuple[int, str], ...]  # (heading level, text) in document order
    metadata: tuple[tuple[str, str], ...]  # name/content pairs

    @property
    def empty(self) -> bool:
        return not (self.title or self.outline or self.metadata)


def _collect_metadata(scan: HtmlScan) -> list[tuple[str, str, int]]:
    pairs: list[tuple[str, str, int]] = []
    for meta in scan.metas:
        name = (meta.attr("name") or "").strip()
        if not name:
            continue
        lowered = name.lower()
        if lowered in ("description", "keywords") or lowered.startswith(_DC_PREFIXES):
            pairs.append((name, meta.attr("content") or "", meta.offset))
    for tag in scan.rdfa_properties:
        pairs.append((f"property:{tag.attr('property')}", tag.attr("content") or "", tag.offset))
    for tag in scan.microdata_items:
        pairs.append((f"itemprop:{tag.attr('itemprop')}", tag.attr("content") or "", tag.offset))
    return pairs


def extract_semantics(snapshot: SiteSnapshot) -> tuple[SemanticSummary, CheckResult]:
    """Build the semantic summary of the root page and judge criterion C6_2.

    Pass rule: a title is present and the page offers structure beyond it,
    either a heading outline or at least one metadata pair.  Markup that is
    merely ugly still counts; only bytes that fail to decode are fatal.
    """
    empty = SemanticSummary(title=None, language=None, outline=(), metadata=())
    root = snapshot.root
    if not root.fetched_ok or not is_html_media(root.media_type):
        return empty, CheckResult(criterion=CriterionId.C6_2, value=0, evidence=())

    body = snapshot.body(root)
    try:
        text, encoding = decode_text(body, root.media_type)
    except UnicodeDecodeError as exc:
        return empty, CheckResult(
            criterion=CriterionId.C6_2,
            value=0,
            evidence=(
                Evidence(
                    kind=EvidenceKind.TEST_FAILURE,
                    resource_url=root.url,
                    detail=f"markup bytes do not decode: {exc.reason}",
                    exact_locus=byte_locus(exc.start),
                ),
            ),
        )

    scan = scan_html(text)
    metadata = _collect_metadata(scan)
    outline = tuple(
        (int(h.name[1]), h.text) for h in scan.headings if h.name[1] in "123456"
    )
    summary = SemanticSummary(
        title=scan.title or None,
        language=scan.lang,
        outline=outline,
        metadata=tuple((name, content) for name, content, _ in metadata),
    )

    evidence: list[Evidence] = []
    if summary.title:
        evidence.append(
            Evidence(
                kind=EvidenceKind.MARKUP_FEATURE,
                resource_url=root.url,
                detail=f"title present: {summary.title!r}",
                exact_locus=byte_locus(to_byte_offset(text, scan.title_offset, encoding)),
            )
        )
    if outline:
        evidence.append(
            Evidence(
                kind=EvidenceKind.MARKUP_FEATURE,
                resource_url=root.url,
                detail=f"heading outline with {len(outline)} headings (first: h{outline[0][0]} {outline[0][1]!r})",
                exact_locus=byte_locus(
                    to_byte_offset(text, scan.headings[0].offset, encoding)
                ),
            )
        )
    for name, content, offset in metadata:
        evidence.append(
            Evidence(
                kind=EvidenceKind.MARKUP_FEATURE,
                resource_url=root.url,
                detail=f"metadata {name}={content!r}",
                exact_locus=byte_locus(to_byte_offset(text, offset, encoding)),
            )
        )

    value = 1 if summary.title and (outline or metadata) else 0
    return summary, CheckResult(
        criterion=CriterionId.C6_2,
        value=value,
        evidence=tuple(evidence),
        details={
            "title": summary.title,
            "language": summary.language,
            "outline": [[level, text] for level, text in summary.outline],
            "metadata": [[name, content] for name, content in summary.metadata],
        },
    )
