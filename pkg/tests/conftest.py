"""Shared fixtures: an in-process HTTP server and snapshot builders."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from wiaudit.snapshot import DiscoveredVia, ResourceDraft, SiteSnapshot, build_snapshot


@dataclass
class Route:
    body: bytes
    status: int = 200
    media_type: str = "text/html; charset=utf-8"
    headers: tuple[tuple[str, str], ...] = ()


@dataclass
class FixtureServer:
    host: str
    port: int
    routes: dict[str, Route]
    hits: list[tuple[str, float]] = field(default_factory=list)

    def url(self, path: str = "/") -> str:
        return f"http://{self.host}:{self.port}{path}"

    def times_for(self, path: str) -> list[float]:
        return [t for p, t in self.hits if p == path]


@pytest.fixture
def http_fixture():
    """Start a local HTTP server serving a mutable route table."""
    server_box: dict[str, FixtureServer] = {}

    class Handler(BaseHTTPRequestHandler):
        def do_GET(self) -> None:  # noqa: N802 (stdlib naming)
            fixture = server_box["fixture"]
            fixture.hits.append((self.path, time.monotonic()))
            route = fixture.routes.get(self.path)
            if route is None:
                self.send_response(404)
                self.send_header("Content-Type", "text/plain")
                self.end_headers()
                self.wfile.write(b"not found")
                return
            self.send_response(route.status)
            if route.media_type:
                self.send_header("Content-Type", route.media_type)
            for name, value in route.headers:
                self.send_header(name, value)
            self.end_headers()
            if route.status < 300 or route.status >= 400:
                self.wfile.write(route.body)

        def log_message(self, *args) -> None:
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    fixture = FixtureServer(host="127.0.0.1", port=server.server_address[1], routes={})
    server_box["fixture"] = fixture
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield fixture
    finally:
        server.shutdown()
        thread.join(timeout=5)


def assert_evidence_sound(snapshot: SiteSnapshot, result) -> None:
    """Every evidence item must resolve into the snapshot it claims to cite."""
    urls = {r.url for r in snapshot.resources}
    for ev in result.evidence:
        assert ev.resource_url in urls, ev
        assert ev.detail
        record = snapshot.find(ev.resource_url)
        if ev.exact_locus.startswith("byte "):
            offset = int(ev.exact_locus.split()[1])
            assert 0 <= offset <= len(snapshot.body(record)), ev
        elif ev.exact_locus.startswith("header "):
            name = ev.exact_locus[len("header ") :]
            assert any(h.lower() == name.lower() for h, _ in record.headers), ev


def html_snapshot(
    html: str | bytes,
    *,
    url: str = "http://site.test/",
    media_type: str = "text/html; charset=utf-8",
    headers: tuple[tuple[str, str], ...] = (),
    extra: list[ResourceDraft] | None = None,
) -> SiteSnapshot:
    """One-page snapshot (plus optional extra resources) for checker tests."""
    body = html.encode("utf-8") if isinstance(html, str) else html
    root_headers = headers if headers else (("Content-Type", media_type),)
    drafts = [
        ResourceDraft(
            url=url,
            body=body,
            media_type=media_type,
            headers=root_headers,
            via=DiscoveredVia.ROOT,
        )
    ]
    drafts.extend(extra or [])
    return build_snapshot(url, drafts)
