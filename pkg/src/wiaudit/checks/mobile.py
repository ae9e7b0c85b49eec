"""Mobile-friendliness checker: a deterministic subset of page tests.

Seven tests over the root page; the criterion passes only when every
enabled test passes.  Thresholds are configuration, not constants of the
rubric, so they live in MobileSettings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import urljoin

from ..criteria import CriterionId
from ..html_scan import (
    HtmlScan,
    declared_charsets,
    decode_text,
    embed_url,
    is_html_media,
    scan_html,
    to_byte_offset,
)
from ..snapshot import DiscoveredVia, SiteSnapshot
from .results import CheckResult, Evidence, EvidenceKind, byte_locus

MOBILE_TESTS: tuple[str, ...] = (
    "NO_FRAMES",
    "IMAGES_SPECIFY_SIZE",
    "PAGE_SIZE_LIMIT",
    "EXTERNAL_RESOURCES",
    "CHARACTER_ENCODING",
    "AUTO_REFRESH",
    "POP_UPS",
)

_ALLOWED_TARGETS = frozenset({"_self", "_parent", "_top", ""})
_UTF8_NAMES = frozenset({"utf-8", "utf8"})


@dataclass(frozen=True)
class MobileSettings:
    enabled_tests: tuple[str, ...] = MOBILE_TESTS
    max_markup_bytes: int = 10240
    max_total_bytes: int = 20480
    max_embedded_resources: int = 20

    def __post_init__(self) -> None:
        unknown = set(self.enabled_tests) - set(MOBILE_TESTS)
        if unknown:
            raise ValueError(f"unknown mobile tests: {sorted(unknown)}")


@dataclass
class _Page:
    url: str
    body: bytes
    media_type: str
    text: str
    encoding: str
    scan: HtmlScan
    embedded_bytes: int
    failures: list[Evidence] = field(default_factory=list)


def _run_test(name: str, page: _Page, settings: MobileSettings) -> bool:
    def fail(detail: str, char_offset: int | None = None) -> bool:
        locus = ""
        if char_offset is not None and char_offset >= 0:
            locus = byte_locus(to_byte_offset(page.text, char_offset, page.encoding))
        page.failures.append(
            Evidence(
                kind=EvidenceKind.TEST_FAILURE,
                resource_url=page.url,
                detail=f"{name}: {detail}",
                exact_locus=locus,
            )
        )
        return False

    scan = page.scan
    if name == "NO_FRAMES":
        if scan.frames:
            first = scan.frames[0]
            return fail(f"page uses <{first.name}>", first.offset)
        return True
    if name == "IMAGES_SPECIFY_SIZE":
        for img in scan.images:
            if not img.attr("width") or not img.attr("height"):
                return fail(
                    f"<img src={img.attr('src')!r}> lacks width/height attributes",
                    img.offset,
                )
        return True
    if name == "PAGE_SIZE_LIMIT":
        markup = len(page.body)
        total = markup + page.embedded_bytes
        if markup > settings.max_markup_bytes:
            return fail(f"markup is {markup} bytes (limit {settings.max_markup_bytes})")
        if total > settings.max_total_bytes:
            return fail(
                f"markup plus embedded resources is {total} bytes "
                f"(limit {settings.max_total_bytes})"
            )
        return True
    if name == "EXTERNAL_RESOURCES":
        unique = {urljoin(page.url, embed_url(t) or "") for t in scan.embeds if embed_url(t)}
        if len(unique) > settings.max_embedded_resources:
            return fail(
                f"page embeds {len(unique)} external resources "
                f"(limit {settings.max_embedded_resources})"
            )
        return True
    if name == "CHARACTER_ENCODING":
        declared = declared_charsets(page.media_type, page.body)
        if not declared:
            return fail("no character encoding declared")
        wrong = [c for c in declared if c not in _UTF8_NAMES]
        if wrong:
            return fail(f"declared encoding is {wrong[0]}, not UTF-8")
        return True
    if name == "AUTO_REFRESH":
        refresh = scan.meta_http_equiv("refresh")
        if refresh:
            return fail("page declares a meta refresh", refresh[0].offset)
        return True
    if name == "POP_UPS":
        for tag in scan.targets:
            target = (tag.attr("target") or "").lower()
            if target not in _ALLOWED_TARGETS:
                return fail(
                    f"<{tag.name}> opens a new window via target={target!r}", tag.offset
                )
        return True
    raise ValueError(f"unknown mobile test {name}")


def check_mobile_ok(snapshot: SiteSnapshot, settings: MobileSettings | None = None) -> CheckResult:
    """Run the enabled mobile tests over the root page; pass = all pass."""
    settings = settings or MobileSettings()
    root = snapshot.root
    if not root.fetched_ok or not is_html_media(root.media_type):
        return CheckResult(
            criterion=CriterionId.C6_1,
            value=0,
            evidence=(
                Evidence(
                    kind=EvidenceKind.TEST_FAILURE,
                    resource_url=root.url,
                    detail="not an HTML page",
                ),
            ),
            details={"tests": {name: "skipped" for name in settings.enabled_tests}},
        )

    body = snapshot.body(root)
    try:
        text, encoding = decode_text(body, root.media_type)
    except UnicodeDecodeError:
        text, encoding = body.decode("utf-8", "replace"), "utf-8"
    embedded_bytes = sum(
        len(snapshot.body(r))
        for r in snapshot.resources
        if r.discovered_via is DiscoveredVia.EMBEDDED
    )
    page = _Page(
        url=root.url,
        body=body,
        media_type=root.media_type,
        text=text,
        encoding=encoding,
        scan=scan_html(text),
        embedded_bytes=embedded_bytes,
    )

    outcomes: dict[str, str] = {}
    for name in MOBILE_TESTS:
        if name not in settings.enabled_tests:
            outcomes[name] = "skipped"
            continue
        outcomes[name] = "pass" if _run_test(name, page, settings) else "fail"

    value = 1 if all(outcomes[n] == "pass" for n in settings.enabled_tests) else 0
    evidence: tuple[Evidence, ...]
    if value == 1:
        evidence = (
            Evidence(
                kind=EvidenceKind.MARKUP_FEATURE,
                resource_url=root.url,
                detail=f"all {len(settings.enabled_tests)} enabled mobile tests pass",
            ),
        )
    else:
        evidence = tuple(page.failures)
    return CheckResult(
        criterion=CriterionId.C6_1,
        value=value,
        evidence=evidence,
        details={"tests": outcomes},
    )
