"""Web technology fingerprinting: does the site run on a dynamic platform?"""

from __future__ import annotations

import re
from urllib.parse import urlsplit

from ..criteria import CriterionId
from ..html_scan import decode_text, is_html_media, scan_html, to_byte_offset
from ..snapshot import SiteSnapshot
from .results import CheckResult, Evidence, EvidenceKind, byte_locus, header_locus

# Header token -> platform name; longer tokens first so "asp.net" wins over "asp".
PLATFORM_HEADER_TOKENS: tuple[tuple[str, str], ...] = (
    ("asp.net", "ASP.NET"),
    ("coldfusion", "ColdFusion"),
    ("servlet", "Java servlets"),
    ("express", "Express"),
    ("tomcat", "Apache Tomcat"),
    ("django", "Django"),
    ("jboss", "JBoss"),
    ("rails", "Ruby on Rails"),
    ("node", "Node.js"),
    ("php", "PHP"),
    ("jsp", "JSP"),
    ("asp", "ASP"),
)

DYNAMIC_EXTENSIONS = (".php", ".asp", ".aspx", ".jsp")

SESSION_COOKIES: dict[str, str] = {
    "phpsessid": "PHP",
    "asp.net_sessionid": "ASP.NET",
    "jsessionid": "Java",
}

_HTML5_DOCTYPE = re.compile(r"doctype\s+html", re.IGNORECASE)


def _platform_in(value: str) -> str | None:
    lowered = value.lower()
    for token, platform in PLATFORM_HEADER_TOKENS:
        if token in lowered:
            return platform
    return None


def session_cookie_evidence(snapshot: SiteSnapshot) -> list[Evidence]:
    """Set-Cookie headers carrying a known server-session cookie name."""
    found: list[Evidence] = []
    seen: set[tuple[str, str]] = set()
    for record in snapshot.resources:
        for name, value in record.headers:
            if name.lower() != "set-cookie":
                continue
            cookie_name = value.split("=", 1)[0].strip()
            platform = SESSION_COOKIES.get(cookie_name.lower())
            if platform and (record.url, cookie_name.lower()) not in seen:
                seen.add((record.url, cookie_name.lower()))
                found.append(
                    Evidence(
                        kind=EvidenceKind.COOKIE,
                        resource_url=record.url,
                        detail=f"session cookie {cookie_name} ({platform} server-side session)",
                        exact_locus=header_locus(name),
                    )
                )
    return found


def detect_technologies(snapshot: SiteSnapshot) -> CheckResult:
    """Look for any signal that the site is built on dynamic web technology.

    Signals: platform-naming Server/X-Powered-By headers, dynamic URL path
    extensions, well-known session cookies, and the HTML5 doctype.
    """
    evidence: list[Evidence] = []
    signals: list[str] = []

    for record in snapshot.resources:
        for name, value in record.headers:
            if name.lower() not in ("server", "x-powered-by"):
                continue
            platform = _platform_in(value)
            if platform:
                evidence.append(
                    Evidence(
                        kind=EvidenceKind.HEADER,
                        resource_url=record.url,
                        detail=f"{name} header names {platform}: {value!r}",
                        exact_locus=header_locus(name),
                    )
                )
                signals.append(f"header:{platform}")

    for record in snapshot.resources:
        path = urlsplit(record.url).path.lower()
        if path.endswith(DYNAMIC_EXTENSIONS):
            extension = path[path.rfind(".") :]
            evidence.append(
                Evidence(
                    kind=EvidenceKind.URL_PATTERN,
                    resource_url=record.url,
                    detail=f"resource path uses dynamic extension {extension}",
                )
            )
            signals.append(f"url:{extension}")

    cookie_evidence = session_cookie_evidence(snapshot)
    evidence.extend(cookie_evidence)
    signals.extend(f"cookie:{ev.detail.split()[2]}" for ev in cookie_evidence)

    for record in snapshot.resources:
        if not record.fetched_ok or not is_html_media(record.media_type):
            continue
        body = snapshot.body(record)
        try:
            text, encoding = decode_text(body, record.media_type)
        except UnicodeDecodeError:
            text, encoding = body.decode("utf-8", "replace"), "utf-8"
        scan = scan_html(text)
        if scan.doctype and _HTML5_DOCTYPE.fullmatch(scan.doctype.strip()):
            evidence.append(
                Evidence(
                    kind=EvidenceKind.DOCTYPE,
                    resource_url=record.url,
                    detail="HTML5 doctype declaration",
                    exact_locus=byte_locus(to_byte_offset(text, scan.doctype_offset, encoding)),
                )
            )
            signals.append("doctype:html5")

    return CheckResult(
        criterion=CriterionId.C2,
        value=1 if evidence else 0,
        evidence=tuple(evidence),
        details={"signals": signals},
    )
