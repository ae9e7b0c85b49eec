"""Advisory storage heuristics: how does the site appear to keep its data?

Both results are advisory: the signals below suggest structured
(machine-processable) or document-style (human-oriented) storage, but the
call is a human judgment and the merge step only counts these when they
are confirmed manually or heuristics are explicitly accepted.
"""

from __future__ import annotations

from urllib.parse import urljoin, urlsplit

from ..criteria import CriterionId
from ..html_scan import decode_text, is_html_media, parse_media_type, scan_html, to_byte_offset
from ..snapshot import SiteSnapshot
from .results import CheckResult, Evidence, EvidenceKind, byte_locus
from .technology import DYNAMIC_EXTENSIONS, session_cookie_evidence

# Media types that indicate structured, machine-processable documents.
_STRUCTURED_MEDIA = ("application/rdf+xml", "text/xml", "application/xml")

# Link targets humans download and read.
_DOCUMENT_EXTENSIONS = (".txt", ".doc", ".docx", ".rtf", ".odt")
_DOCUMENT_MEDIA = (
    "text/plain",
    "application/msword",
    "application/rtf",
    "application/vnd.openxmlformats-officedocument.wordprocessingml.document",
    "application/vnd.oasis.opendocument.text",
)


def _is_structured_media(media_type: str) -> bool:
    base, _ = parse_media_type(media_type)
    if base in _STRUCTURED_MEDIA:
        return True
    return base.endswith("+xml") and base != "application/xhtml+xml"


def _scanned_pages(snapshot: SiteSnapshot):
    for record in snapshot.resources:
        if not record.fetched_ok or not is_html_media(record.media_type):
            continue
        body = snapshot.body(record)
        try:
            text, encoding = decode_text(body, record.media_type)
        except UnicodeDecodeError:
            text, encoding = body.decode("utf-8", "replace"), "utf-8"
        yield record, text, encoding, scan_html(text)


def detect_storage(snapshot: SiteSnapshot) -> tuple[CheckResult, CheckResult]:
    """Heuristic verdicts for C7_1 (machine storage) and C7_2 (human storage)."""
    machine: list[Evidence] = []
    human: list[Evidence] = []

    for record in snapshot.resources:
        if record.fetched_ok and _is_structured_media(record.media_type):
            machine.append(
                Evidence(
                    kind=EvidenceKind.DOCUMENT,
                    resource_url=record.url,
                    detail=f"serves a structured document ({record.media_type})",
                )
            )
        base, _ = parse_media_type(record.media_type)
        if record.fetched_ok and base in _DOCUMENT_MEDIA:
            human.append(
                Evidence(
                    kind=EvidenceKind.DOCUMENT,
                    resource_url=record.url,
                    detail=f"serves a text document ({base})",
                )
            )

    machine.extend(session_cookie_evidence(snapshot))

    for record, text, encoding, scan in _scanned_pages(snapshot):
        for form in scan.forms:
            action = form.attr("action")
            if not action:
                continue
            path = urlsplit(urljoin(record.url, action)).path.lower()
            if path.endswith(DYNAMIC_EXTENSIONS):
                method = (form.attr("method") or "get").upper()
                machine.append(
                    Evidence(
                        kind=EvidenceKind.MARKUP_FEATURE,
                        resource_url=record.url,
                        detail=f"form {method}s to dynamic endpoint {action}",
                        exact_locus=byte_locus(to_byte_offset(text, form.offset, encoding)),
                    )
                )
        for anchor in scan.anchors:
            href = (anchor.attr("href") or "").strip()
            if not href:
                continue
            if href.lower().startswith("mailto:"):
                human.append(
                    Evidence(
                        kind=EvidenceKind.URL_PATTERN,
                        resource_url=record.url,
                        detail=f"mailto link {href}",
                        exact_locus=byte_locus(to_byte_offset(text, anchor.offset, encoding)),
                    )
                )
            elif urlsplit(urljoin(record.url, href)).path.lower().endswith(_DOCUMENT_EXTENSIONS):
                human.append(
                    Evidence(
                        kind=EvidenceKind.URL_PATTERN,
                        resource_url=record.url,
                        detail=f"link to text document {href}",
                        exact_locus=byte_locus(to_byte_offset(text, anchor.offset, encoding)),
                    )
                )

    return (
        CheckResult(
            criterion=CriterionId.C7_1,
            value=1 if machine else 0,
            evidence=tuple(machine),
            advisory=True,
        ),
        CheckResult(
            criterion=CriterionId.C7_2,
            value=1 if human else 0,
            evidence=tuple(human),
            advisory=True,
        ),
    )
