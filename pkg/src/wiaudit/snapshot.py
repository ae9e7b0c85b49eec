"""Replayable site snapshots: polite capture, integrity-checked storage.

A snapshot is the complete, self-contained input to every checker; audits
never touch the network.  On disk it is a directory:

    manifest          version line, then one tab-separated record per resource
    meta.json         capture metadata, redirect chains, fetch errors, digests
    headers/0000...   received headers per resource, exact order and casing
    bodies/<sha256>   raw body bytes, stored once per distinct digest

The manifest is the canonical contract; bodies are verified against their
digests every time a snapshot is loaded.
"""

from __future__ import annotations

import hashlib
import json
import time
import urllib.robotparser
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from urllib.parse import urldefrag, urljoin, urlsplit

from . import __version__
from .errors import SnapshotCorrupt, SnapshotFailed, SnapshotMissing
from .html_scan import decode_text, embed_url, is_html_media, scan_html

MANIFEST_VERSION_LINE = "wii-snapshot 1"

FEED_MEDIA_TYPES = ("application/rss+xml", "application/atom+xml")
RDF_MEDIA_TYPE = "application/rdf+xml"

_SKIP_SCHEMES = ("mailto:", "javascript:", "tel:", "data:", "ftp:")


class DiscoveredVia(str, Enum):
    ROOT = "root"
    HYPERLINK = "hyperlink"
    FEED_LINK = "feed-link"
    ALTERNATE_LINK = "alternate-link"
    EMBEDDED = "embedded-resource"

    def __str__(self) -> str:
        return self.value


# Precedence when one URL is discovered several ways in the same crawl round.
_VIA_RANK = {
    DiscoveredVia.ROOT: 0,
    DiscoveredVia.EMBEDDED: 1,
    DiscoveredVia.FEED_LINK: 2,
    DiscoveredVia.ALTERNATE_LINK: 3,
    DiscoveredVia.HYPERLINK: 4,
}


def body_digest(body: bytes) -> str:
    return hashlib.sha256(body).hexdigest()


@dataclass(frozen=True)
class ResourceRecord:
    """One captured resource; body bytes live on the snapshot, keyed by digest."""

    url: str
    status: int
    media_type: str
    headers: tuple[tuple[str, str], ...]
    body_digest: str
    discovered_via: DiscoveredVia
    error: str = ""

    @property
    def fetched_ok(self) -> bool:
        return 200 <= self.status < 300


@dataclass(frozen=True)
class SiteSnapshot:
    root_url: str
    fetched_at: str
    resources: tuple[ResourceRecord, ...]
    bodies: dict[str, bytes] = field(repr=False)
    truncated: bool = False
    requested_url: str = ""
    redirects: dict[str, list[str]] = field(default_factory=dict)

    @property
    def root(self) -> ResourceRecord:
        return self.resources[0]

    def body(self, record: ResourceRecord) -> bytes:
        return self.bodies[record.body_digest]

    def find(self, url: str) -> ResourceRecord | None:
        for record in self.resources:
            if record.url == url:
                return record
        return None

    def manifest_text(self) -> str:
        lines = [MANIFEST_VERSION_LINE]
        if self.truncated:
            lines.append("# truncated")
        for rec in self.resources:
            fields = (
                rec.url,
                str(rec.status),
                rec.media_type,
                rec.body_digest,
                rec.discovered_via.value,
            )
            lines.append("\t".join(f.replace("\t", " ").replace("\n", " ") for f in fields))
        return "\n".join(lines) + "\n"

    @property
    def manifest_digest(self) -> str:
        return hashlib.sha256(self.manifest_text().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ResourceDraft:
    """Input to build_snapshot: a resource described by its raw parts."""

    url: str
    body: bytes
    status: int = 200
    media_type: str = "text/html; charset=utf-8"
    headers: tuple[tuple[str, str], ...] = ()
    via: DiscoveredVia = DiscoveredVia.HYPERLINK
    error: str = ""


def build_snapshot(
    root_url: str,
    drafts: list[ResourceDraft],
    *,
    fetched_at: str = "2026-01-01T00:00:00Z",
    truncated: bool = False,
    redirects: dict[str, list[str]] | None = None,
) -> SiteSnapshot:
    """Assemble an in-memory snapshot from resource drafts.

    The first draft must be the root.  Used by tests and fixture builders;
    fetch_site produces the same structure from a live crawl.
    """
    if not drafts or drafts[0].url != root_url or drafts[0].via is not DiscoveredVia.ROOT:
        raise ValueError("first draft must be the root resource")
    records: list[ResourceRecord] = []
    bodies: dict[str, bytes] = {}
    for draft in drafts:
        digest = body_digest(draft.body)
        headers = tuple(draft.headers)
        if not headers and draft.media_type:
            headers = (("Content-Type", draft.media_type),)
        records.append(
            ResourceRecord(
                url=draft.url,
                status=draft.status,
                media_type=draft.media_type,
                headers=headers,
                body_digest=digest,
                discovered_via=draft.via,
                error=draft.error,
            )
        )
        bodies[digest] = draft.body
    return SiteSnapshot(
        root_url=root_url,
        fetched_at=fetched_at,
        resources=tuple(records),
        bodies=bodies,
        truncated=truncated,
        requested_url=root_url,
        redirects=redirects or {},
    )


# ---------------------------------------------------------------------------
# Disk round-trip
# ---------------------------------------------------------------------------


def store_snapshot(snapshot: SiteSnapshot, path: str | Path, *, overwrite: bool = False) -> Path:
    root = Path(path)
    if (root / "manifest").exists() and not overwrite:
        raise SnapshotFailed(f"snapshot already exists at {root} (use overwrite)")
    (root / "bodies").mkdir(parents=True, exist_ok=True)
    (root / "headers").mkdir(parents=True, exist_ok=True)

    for digest, body in snapshot.bodies.items():
        (root / "bodies" / digest).write_bytes(body)
    for i, rec in enumerate(snapshot.resources):
        lines = "".join(f"{name}: {value}\n" for name, value in rec.headers)
        (root / "headers" / f"{i:04d}").write_text(lines, encoding="utf-8")

    manifest = snapshot.manifest_text()
    (root / "manifest").write_text(manifest, encoding="utf-8")
    meta = {
        "fetched_at": snapshot.fetched_at,
        "manifest_digest": snapshot.manifest_digest,
        "redirects": snapshot.redirects,
        "requested_url": snapshot.requested_url,
        "resource_errors": {r.url: r.error for r in snapshot.resources if r.error},
        "root_url": snapshot.root_url,
        "tool_version": __version__,
        "truncated": snapshot.truncated,
    }
    (root / "meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return root


def load_snapshot(path: str | Path) -> SiteSnapshot:
    """Load a stored snapshot, verifying every digest on the way in."""
    root = Path(path)
    manifest_path = root / "manifest"
    meta_path = root / "meta.json"
    if not manifest_path.is_file() or not meta_path.is_file():
        raise SnapshotMissing(f"no snapshot at {root}")

    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    manifest_bytes = manifest_path.read_bytes()
    if hashlib.sha256(manifest_bytes).hexdigest() != meta["manifest_digest"]:
        raise SnapshotCorrupt(f"manifest digest mismatch in {root}")

    lines = manifest_bytes.decode("utf-8").splitlines()
    if not lines or lines[0] != MANIFEST_VERSION_LINE:
        raise SnapshotCorrupt(f"unrecognized manifest header in {root}")
    truncated = False
    records: list[ResourceRecord] = []
    bodies: dict[str, bytes] = {}
    errors = meta.get("resource_errors", {})
    index = 0
    for line in lines[1:]:
        if line.startswith("#"):
            truncated = truncated or line == "# truncated"
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise SnapshotCorrupt(f"malformed manifest record: {line!r}")
        url, status_text, media_type, digest, via = fields
        header_path = root / "headers" / f"{index:04d}"
        headers: tuple[tuple[str, str], ...] = ()
        if header_path.is_file():
            parsed = []
            for raw in header_path.read_text(encoding="utf-8").splitlines():
                name, _, value = raw.partition(": ")
                parsed.append((name, value))
            headers = tuple(parsed)
        if digest not in bodies:
            body_path = root / "bodies" / digest
            if not body_path.is_file():
                raise SnapshotCorrupt(f"missing body for {url}", resource_url=url)
            body = body_path.read_bytes()
            if body_digest(body) != digest:
                raise SnapshotCorrupt(
                    f"body digest mismatch for {url}", resource_url=url
                )
            bodies[digest] = body
        records.append(
            ResourceRecord(
                url=url,
                status=int(status_text),
                media_type=media_type,
                headers=headers,
                body_digest=digest,
                discovered_via=DiscoveredVia(via),
                error=errors.get(url, ""),
            )
        )
        index += 1

    if not records or records[0].discovered_via is not DiscoveredVia.ROOT:
        raise SnapshotCorrupt(f"first manifest record is not the root in {root}")
    return SiteSnapshot(
        root_url=meta["root_url"],
        fetched_at=meta["fetched_at"],
        resources=tuple(records),
        bodies=bodies,
        truncated=truncated or meta.get("truncated", False),
        requested_url=meta.get("requested_url", meta["root_url"]),
        redirects=meta.get("redirects", {}),
    )


# ---------------------------------------------------------------------------
# Polite capture
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FetchLimits:
    """Crawl budget and politeness settings for fetch_site."""

    max_resources: int = 50
    max_depth: int = 2
    max_body_bytes: int = 5 * 1024 * 1024
    per_host_delay_ms: int = 1000
    request_timeout_s: float = 15.0
    total_timeout_s: float = 120.0
    obey_robots: bool = True
    user_agent: str = f"wiaudit/{__version__}"


class _PoliteSession:
    """Serial HTTP client: one request at a time, per-host delay, robots."""

    def __init__(self, limits: FetchLimits) -> None:
        import requests

        self._requests = requests
        self.limits = limits
        self.session = requests.Session()
        self.session.max_redirects = 5
        self.session.headers["User-Agent"] = limits.user_agent
        self._last_request: dict[str, float] = {}
        self._robots: dict[str, urllib.robotparser.RobotFileParser | None] = {}

    def _wait_for_host(self, host: str) -> None:
        delay = self.limits.per_host_delay_ms / 1000.0
        last = self._last_request.get(host)
        if last is not None:
            remaining = delay - (time.monotonic() - last)
            if remaining > 0:
                time.sleep(remaining)

    def get(self, url: str) -> tuple["object | None", bytes, bool, str]:
        """GET with cap on body size: (response, body, body_truncated, error)."""
        host = urlsplit(url).netloc
        self._wait_for_host(host)
        try:
            resp = self.session.get(
                url, stream=True, timeout=self.limits.request_timeout_s
            )
        except self._requests.RequestException as exc:
            self._last_request[host] = time.monotonic()
            return None, b"", False, f"{type(exc).__name__}: {exc}"
        body = bytearray()
        truncated = False
        try:
            for chunk in resp.iter_content(8192):
                body.extend(chunk)
                if len(body) > self.limits.max_body_bytes:
                    del body[self.limits.max_body_bytes :]
                    truncated = True
                    break
        except self._requests.RequestException as exc:
            self._last_request[host] = time.monotonic()
            return resp, bytes(body), truncated, f"{type(exc).__name__}: {exc}"
        finally:
            resp.close()
        self._last_request[host] = time.monotonic()
        for hop in resp.history:
            hop_host = urlsplit(hop.url).netloc
            self._last_request.setdefault(hop_host, time.monotonic())
        return resp, bytes(body), truncated, ""

    def allowed(self, url: str) -> bool:
        if not self.limits.obey_robots:
            return True
        parts = urlsplit(url)
        key = f"{parts.scheme}://{parts.netloc}"
        if key not in self._robots:
            self._robots[key] = self._load_robots(key)
        parser = self._robots[key]
        return True if parser is None else parser.can_fetch(self.limits.user_agent, url)

    def _load_robots(self, origin: str) -> urllib.robotparser.RobotFileParser | None:
        resp, body, _, error = self.get(origin + "/robots.txt")
        if error or resp is None or resp.status_code != 200:
            return None
        parser = urllib.robotparser.RobotFileParser()
        parser.parse(body.decode("utf-8", "replace").splitlines())
        return parser


def _clean_url(base: str, href: str) -> str | None:
    href = href.strip()
    if not href or href.startswith(_SKIP_SCHEMES):
        return None
    absolute = urldefrag(urljoin(base, href)).url
    if urlsplit(absolute).scheme not in ("http", "https"):
        return None
    return absolute


def _looks_like_feed_path(url: str) -> bool:
    path = urlsplit(url).path.lower()
    return (
        path.endswith((".rss", ".atom", ".xml"))
        or "feed" in path
        or "rss" in path
    )


def _discover(page_url: str, body: bytes, media_type: str, *, is_root: bool,
              same_host: str, follow_pages: bool) -> dict[str, DiscoveredVia]:
    """Links worth fetching from one captured page, keyed by cleaned URL."""
    try:
        text, _ = decode_text(body, media_type)
    except UnicodeDecodeError:
        text = body.decode("utf-8", "replace")
    scan = scan_html(text)
    found: dict[str, DiscoveredVia] = {}

    def offer(url: str | None, via: DiscoveredVia) -> None:
        if url is None or url == page_url:
            return
        if url not in found or _VIA_RANK[via] < _VIA_RANK[found[url]]:
            found[url] = via

    for link in scan.links:
        if "alternate" not in link.rel_tokens():
            continue
        target = _clean_url(page_url, link.attr("href") or "")
        link_type = (link.attr("type") or "").lower()
        if any(t in link_type for t in FEED_MEDIA_TYPES):
            offer(target, DiscoveredVia.FEED_LINK)
        elif RDF_MEDIA_TYPE in link_type or (target or "").lower().endswith(".rdf"):
            offer(target, DiscoveredVia.ALTERNATE_LINK)
    for anchor in scan.anchors:
        target = _clean_url(page_url, anchor.attr("href") or "")
        if target is None:
            continue
        path = urlsplit(target).path.lower()
        if path.endswith(".rdf"):
            offer(target, DiscoveredVia.ALTERNATE_LINK)
        elif _looks_like_feed_path(target):
            offer(target, DiscoveredVia.FEED_LINK)
        elif follow_pages and urlsplit(target).netloc == same_host:
            offer(target, DiscoveredVia.HYPERLINK)
    if is_root:
        for tag in scan.embeds:
            offer(_clean_url(page_url, embed_url(tag) or ""), DiscoveredVia.EMBEDDED)
    return found


def fetch_site(root_url: str, limits: FetchLimits | None = None) -> SiteSnapshot:
    """Capture a site breadth-first into an in-memory snapshot.

    Ordering is deterministic: resources appear in breadth-first discovery
    order, ties within one round broken by ascending URL byte order.  The
    root must fetch with a 2xx status; everything else is recorded with
    its failure instead of being omitted.
    """
    limits = limits or FetchLimits()
    client = _PoliteSession(limits)
    started = time.monotonic()
    requested = root_url

    if not client.allowed(root_url):
        raise SnapshotFailed(f"robots.txt disallows {root_url}")
    resp, body, body_truncated, error = client.get(root_url)
    if resp is None:
        raise SnapshotFailed(f"could not fetch {root_url}: {error}")
    if not (200 <= resp.status_code < 300):
        raise SnapshotFailed(f"root fetch returned HTTP {resp.status_code} for {root_url}")

    final_url = urldefrag(resp.url).url
    redirects: dict[str, list[str]] = {}
    if resp.history:
        redirects[requested] = [h.url for h in resp.history] + [resp.url]

    records: list[ResourceRecord] = []
    bodies: dict[str, bytes] = {}
    truncated = False

    def add(url: str, via: DiscoveredVia, resp_obj, data: bytes, note: str) -> ResourceRecord:
        digest = body_digest(data)
        bodies[digest] = data
        if resp_obj is not None:
            headers = tuple(resp_obj.raw.headers.items()) if resp_obj.raw is not None else tuple(resp_obj.headers.items())
            status = resp_obj.status_code
            media_type = resp_obj.headers.get("Content-Type", "")
        else:
            headers, status, media_type = (), 0, ""
        record = ResourceRecord(
            url=url,
            status=status,
            media_type=media_type,
            headers=headers,
            body_digest=digest,
            discovered_via=via,
            error=note,
        )
        records.append(record)
        return record

    note = f"body truncated at {limits.max_body_bytes} bytes" if body_truncated else ""
    add(final_url, DiscoveredVia.ROOT, resp, body, note)
    seen = {final_url, requested}
    same_host = urlsplit(final_url).netloc

    # (url, via, depth); pages are parsed for more links while depth allows
    queue: list[tuple[str, DiscoveredVia, int]] = []

    def enqueue(found: dict[str, DiscoveredVia], depth: int) -> None:
        for url in sorted(found):
            if url not in seen:
                seen.add(url)
                queue.append((url, found[url], depth))

    root_media = resp.headers.get("Content-Type", "")
    if is_html_media(root_media):
        enqueue(
            _discover(final_url, body, root_media, is_root=True,
                      same_host=same_host, follow_pages=limits.max_depth >= 1),
            1,
        )

    i = 0
    while i < len(queue):
        if len(records) >= limits.max_resources:
            truncated = True
            break
        if time.monotonic() - started > limits.total_timeout_s:
            truncated = True
            break
        url, via, depth = queue[i]
        i += 1
        if not client.allowed(url):
            digest = body_digest(b"")
            bodies[digest] = b""
            records.append(
                ResourceRecord(url=url, status=0, media_type="", headers=(),
                               body_digest=digest, discovered_via=via,
                               error="blocked by robots.txt")
            )
            continue
        sub_resp, sub_body, sub_trunc, sub_error = client.get(url)
        if sub_resp is None:
            add(url, via, None, b"", sub_error)
            continue
        if sub_resp.history:
            redirects[url] = [h.url for h in sub_resp.history] + [sub_resp.url]
        sub_note = sub_error or (
            f"body truncated at {limits.max_body_bytes} bytes" if sub_trunc else ""
        )
        record = add(url, via, sub_resp, sub_body, sub_note)
        if (
            via is DiscoveredVia.HYPERLINK
            and record.fetched_ok
            and depth < limits.max_depth
            and is_html_media(record.media_type)
        ):
            enqueue(
                _discover(url, sub_body, record.media_type, is_root=False,
                          same_host=same_host, follow_pages=True),
                depth + 1,
            )

    if i < len(queue):
        truncated = True

    return SiteSnapshot(
        root_url=final_url,
        fetched_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        resources=tuple(records),
        bodies=bodies,
        truncated=truncated,
        requested_url=requested,
        redirects=redirects,
    )
