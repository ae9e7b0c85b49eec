"""Snapshot store and polite fetcher."""

from __future__ import annotations

import pytest

from wiaudit.errors import SnapshotCorrupt, SnapshotFailed, SnapshotMissing
from wiaudit.snapshot import (
    DiscoveredVia,
    FetchLimits,
    ResourceDraft,
    build_snapshot,
    fetch_site,
    load_snapshot,
    store_snapshot,
)

from conftest import Route, html_snapshot

FAST = dict(per_host_delay_ms=0, request_timeout_s=5.0, total_timeout_s=30.0)


def two_resource_snapshot():
    return build_snapshot(
        "http://site.test/",
        [
            ResourceDraft(
                url="http://site.test/",
                body=b"<html><body>home</body></html>",
                via=DiscoveredVia.ROOT,
            ),
            ResourceDraft(
                url="http://site.test/feed.xml",
                body=b"<rss version='2.0'></rss>",
                media_type="application/rss+xml",
                via=DiscoveredVia.FEED_LINK,
            ),
        ],
    )


# ---------------------------------------------------------------------------
# Disk round-trip and integrity
# ---------------------------------------------------------------------------


def test_store_load_round_trip(tmp_path) -> None:
    snap = two_resource_snapshot()
    store_snapshot(snap, tmp_path / "snap")
    loaded = load_snapshot(tmp_path / "snap")
    assert loaded.root_url == snap.root_url
    assert loaded.resources == snap.resources
    assert loaded.bodies == snap.bodies
    assert loaded.manifest_digest == snap.manifest_digest
    assert not loaded.truncated


def test_manifest_format_is_versioned_tsv(tmp_path) -> None:
    snap = two_resource_snapshot()
    store_snapshot(snap, tmp_path / "snap")
    lines = (tmp_path / "snap" / "manifest").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "wii-snapshot 1"
    record = lines[1].split("\t")
    assert record[0] == "http://site.test/"
    assert record[1] == "200"
    assert record[2] == "text/html; charset=utf-8"
    assert len(record[3]) == 64  # sha256 hex
    assert record[4] == "root"


def test_load_missing_raises(tmp_path) -> None:
    with pytest.raises(SnapshotMissing):
        load_snapshot(tmp_path / "nope")


def test_flipped_body_byte_is_detected(tmp_path) -> None:
    snap = two_resource_snapshot()
    store_snapshot(snap, tmp_path / "snap")
    body_dir = tmp_path / "snap" / "bodies"
    victim = sorted(body_dir.iterdir())[0]
    data = bytearray(victim.read_bytes())
    data[0] ^= 0x01
    victim.write_bytes(bytes(data))
    with pytest.raises(SnapshotCorrupt) as err:
        load_snapshot(tmp_path / "snap")
    assert err.value.resource_url in ("http://site.test/", "http://site.test/feed.xml")


def test_tampered_manifest_is_detected(tmp_path) -> None:
    snap = two_resource_snapshot()
    store_snapshot(snap, tmp_path / "snap")
    manifest = tmp_path / "snap" / "manifest"
    manifest.write_text(
        manifest.read_text(encoding="utf-8").replace("200", "201"), encoding="utf-8"
    )
    with pytest.raises(SnapshotCorrupt):
        load_snapshot(tmp_path / "snap")


def test_store_refuses_overwrite_without_flag(tmp_path) -> None:
    snap = two_resource_snapshot()
    store_snapshot(snap, tmp_path / "snap")
    with pytest.raises(SnapshotFailed):
        store_snapshot(snap, tmp_path / "snap")
    store_snapshot(snap, tmp_path / "snap", overwrite=True)


def test_truncated_flag_round_trips_via_manifest_comment(tmp_path) -> None:
    snap = build_snapshot(
        "http://site.test/",
        [ResourceDraft(url="http://site.test/", body=b"x", via=DiscoveredVia.ROOT)],
        truncated=True,
    )
    store_snapshot(snap, tmp_path / "snap")
    lines = (tmp_path / "snap" / "manifest").read_text(encoding="utf-8").splitlines()
    assert lines[1] == "# truncated"
    assert load_snapshot(tmp_path / "snap").truncated


def test_headers_keep_order_and_case(tmp_path) -> None:
    snap = html_snapshot(
        "<html></html>",
        headers=(
            ("Content-Type", "text/html"),
            ("X-Powered-By", "PHP/8.1"),
            ("Set-Cookie", "PHPSESSID=abc"),
            ("set-cookie", "other=1"),
        ),
    )
    store_snapshot(snap, tmp_path / "snap")
    loaded = load_snapshot(tmp_path / "snap")
    assert loaded.root.headers == (
        ("Content-Type", "text/html"),
        ("X-Powered-By", "PHP/8.1"),
        ("Set-Cookie", "PHPSESSID=abc"),
        ("set-cookie", "other=1"),
    )


# ---------------------------------------------------------------------------
# Fetching
# ---------------------------------------------------------------------------


ROOT_HTML = """<!doctype html>
<html><head>
<title>Fixture town</title>
<link rel="alternate" type="application/rss+xml" href="/feed.xml">
</head><body>
<img src="/logo.png">
<a href="/b.html">b</a>
<a href="/a.html">a</a>
<a href="mailto:someone@example.org">write</a>
<a href="/a.html#section">a again</a>
</body></html>"""


def fill_basic_site(server) -> None:
    server.routes["/"] = Route(body=ROOT_HTML.encode())
    server.routes["/a.html"] = Route(body=b"<html><body><a href='/c.html'>c</a></body></html>")
    server.routes["/b.html"] = Route(body=b"<html><body>b</body></html>")
    server.routes["/c.html"] = Route(body=b"<html><body>c</body></html>")
    server.routes["/feed.xml"] = Route(body=b"<rss version='2.0'/>", media_type="application/rss+xml")
    server.routes["/logo.png"] = Route(body=b"\x89PNG fake", media_type="image/png")


def test_fetch_orders_breadth_first_with_url_ties_sorted(http_fixture) -> None:
    fill_basic_site(http_fixture)
    snap = fetch_site(http_fixture.url("/"), FetchLimits(**FAST))
    urls = [r.url for r in snap.resources]
    base = http_fixture.url("")
    assert urls == [
        base + "/",
        base + "/a.html",
        base + "/b.html",
        base + "/feed.xml",
        base + "/logo.png",
        base + "/c.html",
    ]
    assert snap.resources[0].discovered_via is DiscoveredVia.ROOT
    by_url = {r.url: r.discovered_via for r in snap.resources}
    assert by_url[base + "/feed.xml"] is DiscoveredVia.FEED_LINK
    assert by_url[base + "/logo.png"] is DiscoveredVia.EMBEDDED
    assert by_url[base + "/a.html"] is DiscoveredVia.HYPERLINK
    assert not snap.truncated


def test_fetch_is_deterministic_across_runs(http_fixture) -> None:
    fill_basic_site(http_fixture)
    first = fetch_site(http_fixture.url("/"), FetchLimits(**FAST))
    second = fetch_site(http_fixture.url("/"), FetchLimits(**FAST))
    assert [r.url for r in first.resources] == [r.url for r in second.resources]
    assert [r.body_digest for r in first.resources] == [
        r.body_digest for r in second.resources
    ]


def test_fetch_respects_depth_limit(http_fixture) -> None:
    fill_basic_site(http_fixture)
    snap = fetch_site(http_fixture.url("/"), FetchLimits(max_depth=1, **FAST))
    urls = [r.url for r in snap.resources]
    assert http_fixture.url("/c.html") not in urls
    assert http_fixture.url("/a.html") in urls


def test_fetch_resource_cap_marks_truncated(http_fixture) -> None:
    fill_basic_site(http_fixture)
    snap = fetch_site(http_fixture.url("/"), FetchLimits(max_resources=1, **FAST))
    assert len(snap.resources) == 1
    assert snap.truncated
    assert snap.resources[0].discovered_via is DiscoveredVia.ROOT


def test_fetch_records_failures_instead_of_omitting(http_fixture) -> None:
    fill_basic_site(http_fixture)
    del http_fixture.routes["/b.html"]  # will 404
    snap = fetch_site(http_fixture.url("/"), FetchLimits(**FAST))
    record = snap.find(http_fixture.url("/b.html"))
    assert record is not None
    assert record.status == 404
    assert not record.fetched_ok


def test_fetch_non_2xx_root_fails(http_fixture) -> None:
    http_fixture.routes["/"] = Route(body=b"gone", status=500)
    with pytest.raises(SnapshotFailed):
        fetch_site(http_fixture.url("/"), FetchLimits(**FAST))


def test_fetch_follows_and_records_root_redirect(http_fixture) -> None:
    fill_basic_site(http_fixture)
    http_fixture.routes["/start"] = Route(
        body=b"", status=302, headers=(("Location", "/"),)
    )
    snap = fetch_site(http_fixture.url("/start"), FetchLimits(**FAST))
    assert snap.root_url == http_fixture.url("/")
    assert snap.requested_url == http_fixture.url("/start")
    assert snap.redirects[http_fixture.url("/start")][-1] == http_fixture.url("/")


def test_fetch_honors_robots_and_override(http_fixture) -> None:
    fill_basic_site(http_fixture)
    http_fixture.routes["/robots.txt"] = Route(
        body=b"User-agent: *\nDisallow: /b.html\n", media_type="text/plain"
    )
    snap = fetch_site(http_fixture.url("/"), FetchLimits(**FAST))
    blocked = snap.find(http_fixture.url("/b.html"))
    assert blocked is not None
    assert blocked.status == 0
    assert "robots" in blocked.error
    assert http_fixture.times_for("/b.html") == []

    loose = fetch_site(http_fixture.url("/"), FetchLimits(obey_robots=False, **FAST))
    fetched = loose.find(http_fixture.url("/b.html"))
    assert fetched is not None and fetched.fetched_ok


def test_fetch_robots_blocking_root_fails(http_fixture) -> None:
    fill_basic_site(http_fixture)
    http_fixture.routes["/robots.txt"] = Route(
        body=b"User-agent: *\nDisallow: /\n", media_type="text/plain"
    )
    with pytest.raises(SnapshotFailed):
        fetch_site(http_fixture.url("/"), FetchLimits(**FAST))


def test_fetch_spaces_same_host_requests(http_fixture) -> None:
    http_fixture.routes["/"] = Route(
        body=b"<html><body><a href='/x.html'>x</a><a href='/y.html'>y</a></body></html>"
    )
    http_fixture.routes["/x.html"] = Route(body=b"x")
    http_fixture.routes["/y.html"] = Route(body=b"y")
    limits = FetchLimits(per_host_delay_ms=150, max_depth=1,
                         request_timeout_s=5.0, total_timeout_s=30.0)
    snap = fetch_site(http_fixture.url("/"), limits)
    assert len(snap.resources) == 3
    stamps = sorted(t for _, t in http_fixture.hits)
    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    assert all(gap >= 0.14 for gap in gaps), gaps


def test_fetch_truncates_oversized_bodies(http_fixture) -> None:
    http_fixture.routes["/"] = Route(body=b"A" * 5000)
    snap = fetch_site(
        http_fixture.url("/"), FetchLimits(max_body_bytes=1000, **FAST)
    )
    assert len(snap.body(snap.root)) == 1000
    assert "truncated" in snap.root.error
