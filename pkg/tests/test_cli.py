"""End-to-end command-line tests: every command, exit code, and artifact."""

import json

import pytest
from conftest import Route, html_snapshot

from wiaudit import __version__
from wiaudit.cli import main, parse_batch_manifest
from wiaudit.errors import ReportInvalid
from wiaudit.snapshot import load_snapshot, store_snapshot

# Scores exactly C2 (X-Powered-By header): the iframe fails the mobile
# suite, the bare title fails the description test, and nothing else fires.
PLAIN_DYNAMIC = (
    "<html><head><title>Old town</title></head>"
    "<body><iframe src='/x'></iframe><p>hello</p></body></html>"
)

# As above plus a POST form, which the storage heuristic flags (advisory).
WITH_FORM = (
    "<html><head><title>Old town</title></head>"
    "<body><iframe src='/x'></iframe>"
    "<form method='post' action='/apply.php'><input name='q'></form>"
    "</body></html>"
)

PHP_HEADERS = (
    ("Content-Type", "text/html; charset=utf-8"),
    ("X-Powered-By", "PHP/8.2"),
)


def store_page(tmp_path, name, html=PLAIN_DYNAMIC, url="http://site.test/"):
    snapshot = html_snapshot(html, url=url, headers=PHP_HEADERS)
    return store_snapshot(snapshot, tmp_path / name)


def write_answers(tmp_path, name="site.answers", url="http://site.test/", lines=()):
    path = tmp_path / name
    body = [f"site {url}", "assessor a1", "date 2026-08-01", *lines]
    path.write_text("\n".join(body) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def test_audit_summary_line(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    assert main(["audit", str(snap), "--out", str(tmp_path / "r.json")]) == 0
    out = capsys.readouterr()
    assert out.out == "WII 0.15  class WI-ready\n"
    assert "C5: no manual answer; defaulting to 0" in out.err


def test_audit_with_answers_reaches_acquired(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    answers = write_answers(tmp_path, lines=['answer C5 1 "documented API"'])
    code = main(
        ["audit", str(snap), "--answers", str(answers),
         "--out", str(tmp_path / "r.json")]
    )
    assert code == 0
    assert capsys.readouterr().out == "WII 2.65  class WI-acquired\n"


def test_audit_writes_report_file(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    out_file = tmp_path / "r.json"
    main(["audit", str(snap), "--out", str(out_file)])
    capsys.readouterr()
    report = json.loads(out_file.read_text(encoding="utf-8"))
    assert report["report_version"] == 1
    assert report["assessment"]["wii"] == "0.15"
    assert report["assessment"]["class"] == "WI-ready"
    assert report["site_url"] == "http://site.test/"
    assert report["tool_version"] == __version__


def test_audit_without_out_prints_report_then_summary(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    assert main(["audit", str(snap)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "{"
    assert lines[-1] == "WII 0.15  class WI-ready"


def test_audit_format_flag_in_both_positions(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    main(["--format", "csv", "audit", str(snap)])
    before = capsys.readouterr().out
    main(["audit", str(snap), "--format", "csv"])
    after = capsys.readouterr().out
    assert before == after
    assert before.startswith("criterion,value,provenance\n")


def test_audit_markdown_format(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    main(["--format", "markdown", "audit", str(snap)])
    out = capsys.readouterr().out
    assert out.startswith("# Audit of http://site.test/\n")


def test_audit_accept_heuristics_flag(tmp_path, capsys):
    snap = store_page(tmp_path, "snap", html=WITH_FORM)
    main(["audit", str(snap), "--out", str(tmp_path / "a.json")])
    rejected = capsys.readouterr()
    assert rejected.out == "WII 0.15  class WI-ready\n"
    assert "C7_1: heuristic suggested 1 without manual confirmation" in rejected.err

    main(
        ["--accept-heuristics", "audit", str(snap),
         "--out", str(tmp_path / "b.json"), "--force"]
    )
    accepted = capsys.readouterr()
    assert accepted.out == "WII 0.30  class WI-ready\n"


def test_audit_tampered_snapshot_fails(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    body = next((snap / "bodies").iterdir())
    body.write_bytes(body.read_bytes() + b"!")
    assert main(["audit", str(snap)]) == 1
    err = capsys.readouterr().err
    assert "SnapshotCorrupt" in err


def test_audit_missing_snapshot(tmp_path, capsys):
    assert main(["audit", str(tmp_path / "nowhere")]) == 1
    assert "SnapshotMissing" in capsys.readouterr().err


def test_audit_answers_for_wrong_site(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    answers = write_answers(
        tmp_path, url="http://other.test/", lines=['answer C5 1 "x"']
    )
    assert main(["audit", str(snap), "--answers", str(answers)]) == 1
    assert "SiteMismatch" in capsys.readouterr().err


def test_audit_custom_weights(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    weights = tmp_path / "weights.txt"
    lines = [f"{cid} 0" for cid in (
        "C1", "C3", "C3_1", "C3_2", "C4", "C5", "C6", "C6_1", "C6_2",
        "C6_3", "C6_4", "C7", "C7_1", "C7_2",
    )]
    weights.write_text("C2 600\n" + "\n".join(lines) + "\n", encoding="utf-8")
    main(["audit", str(snap), "--weights", str(weights), "--out", str(tmp_path / "r")])
    assert capsys.readouterr().out == "WII 6.00  class WI-ready\n"


def test_audit_env_config(tmp_path, capsys, monkeypatch):
    snap = store_page(tmp_path, "snap")
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"format": "markdown"}), encoding="utf-8")
    monkeypatch.setenv("WIAUDIT_CONFIG", str(config))
    main(["audit", str(snap)])
    assert capsys.readouterr().out.startswith("# Audit of")


def test_audit_config_flag_beats_builtin_defaults(tmp_path, capsys):
    snap = store_page(tmp_path, "snap", html=WITH_FORM)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"accept_heuristics": True}), encoding="utf-8")
    main(["--config", str(config), "audit", str(snap)])
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == "WII 0.30  class WI-ready"


# ---------------------------------------------------------------------------
# fetch
# ---------------------------------------------------------------------------


def test_fetch_stores_a_loadable_snapshot(tmp_path, capsys, http_fixture):
    http_fixture.routes["/"] = Route(
        body=(
            b"<html><head><title>T</title>"
            b"<link rel='alternate' type='application/rss+xml' href='/feed.xml'>"
            b"</head><body><a href='/about.html'>about</a></body></html>"
        )
    )
    http_fixture.routes["/about.html"] = Route(body=b"<html><body>about</body></html>")
    http_fixture.routes["/feed.xml"] = Route(
        body=b"<rss version='2.0'><channel><title>t</title><link>x</link>"
        b"<description>d</description></channel></rss>",
        media_type="application/rss+xml",
    )
    out_dir = tmp_path / "snap"
    assert main(["fetch", http_fixture.url("/"), "--out", str(out_dir)]) == 0
    stdout = capsys.readouterr().out
    assert "captured 3 resources" in stdout
    snapshot = load_snapshot(out_dir)
    assert snapshot.root_url == http_fixture.url("/")
    assert len(snapshot.resources) == 3
    assert not snapshot.truncated


def test_fetch_respects_resource_limit(tmp_path, capsys, http_fixture):
    http_fixture.routes["/"] = Route(
        body=b"<html><body><a href='/a'>a</a><a href='/b'>b</a></body></html>"
    )
    http_fixture.routes["/a"] = Route(body=b"<html><body>a</body></html>")
    http_fixture.routes["/b"] = Route(body=b"<html><body>b</body></html>")
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"fetch": {"max_resources": 1}}), encoding="utf-8")
    out_dir = tmp_path / "snap"
    code = main(
        ["--config", str(config), "fetch", http_fixture.url("/"), "--out", str(out_dir)]
    )
    assert code == 0
    assert "(truncated by fetch limits)" in capsys.readouterr().out
    snapshot = load_snapshot(out_dir)
    assert len(snapshot.resources) == 1
    assert snapshot.truncated


def test_fetch_refuses_existing_snapshot_without_force(tmp_path, capsys, http_fixture):
    http_fixture.routes["/"] = Route(body=b"<html><body>x</body></html>")
    out_dir = tmp_path / "snap"
    assert main(["fetch", http_fixture.url("/"), "--out", str(out_dir)]) == 0
    capsys.readouterr()
    assert main(["fetch", http_fixture.url("/"), "--out", str(out_dir)]) == 1
    assert "already exists" in capsys.readouterr().err
    assert main(["--force", "fetch", http_fixture.url("/"), "--out", str(out_dir)]) == 0


def test_fetch_unreachable_host(tmp_path, capsys):
    # Port 1 on localhost: connection refused immediately.
    assert main(["fetch", "http://127.0.0.1:1/", "--out", str(tmp_path / "s")]) == 1
    assert "SnapshotFailed" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------


def build_corpus(tmp_path, *, corrupt=()):
    pages = {
        "one": PLAIN_DYNAMIC,
        "two": WITH_FORM,
        "three": PLAIN_DYNAMIC,
    }
    lines = ["# demo corpus"]
    for name, html in pages.items():
        store_page(tmp_path, f"snap-{name}", html=html, url=f"http://{name}.test/")
        if name == "three":
            answers = write_answers(
                tmp_path,
                name="three.answers",
                url="http://three.test/",
                lines=['answer C5 1 "api docs"'],
            )
            lines.append(f"snap-{name} {answers.name}")
        else:
            lines.append(f"snap-{name}")
    for name in corrupt:
        body = next((tmp_path / f"snap-{name}" / "bodies").iterdir())
        body.write_bytes(b"tampered")
    manifest = tmp_path / "corpus.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def test_batch_writes_reports_index_and_corpus(tmp_path, capsys):
    manifest = build_corpus(tmp_path)
    out = tmp_path / "corpus"
    assert main(["batch", str(manifest), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "audited 3/3 sites" in stdout

    index = json.loads((out / "corpus_index.json").read_text(encoding="utf-8"))
    assert index["corpus_version"] == 1
    assert [s["status"] for s in index["sites"]] == ["ok", "ok", "ok"]
    assert [s["site_url"] for s in index["sites"]] == [
        "http://one.test/", "http://two.test/", "http://three.test/",
    ]
    for entry in index["sites"]:
        assert (out / entry["report"]).is_file()

    rows = (out / "corpus.csv").read_text(encoding="utf-8").splitlines()
    assert len(rows) == 4
    assert rows[3].endswith("2.65,WI-acquired")


def test_batch_is_resumable_and_force_recomputes(tmp_path, capsys):
    manifest = build_corpus(tmp_path)
    out = tmp_path / "corpus"
    main(["batch", str(manifest), "--out", str(out)])
    reports = sorted((out / "reports").glob("*.json"))
    before = [(p.name, p.stat().st_mtime_ns) for p in reports]

    main(["batch", str(manifest), "--out", str(out)])
    assert [(p.name, p.stat().st_mtime_ns) for p in reports] == before

    main(["--force", "batch", str(manifest), "--out", str(out)])
    assert [(p.name, p.stat().st_mtime_ns) for p in reports] != before
    capsys.readouterr()


def test_batch_continues_past_corrupt_snapshot(tmp_path, capsys):
    manifest = build_corpus(tmp_path, corrupt=("two",))
    out = tmp_path / "corpus"
    assert main(["batch", str(manifest), "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert "audited 2/3 sites" in captured.out
    assert "SnapshotCorrupt" in captured.err

    index = json.loads((out / "corpus_index.json").read_text(encoding="utf-8"))
    statuses = {s["snapshot"]: s["status"] for s in index["sites"]}
    assert statuses == {"snap-one": "ok", "snap-two": "failed", "snap-three": "ok"}
    failed = next(s for s in index["sites"] if s["status"] == "failed")
    assert "SnapshotCorrupt" in failed["error"]
    assert failed["report"] is None
    rows = (out / "corpus.csv").read_text(encoding="utf-8").splitlines()
    assert len(rows) == 3


def test_batch_fails_when_no_site_survives(tmp_path, capsys):
    manifest = build_corpus(tmp_path, corrupt=("one", "two", "three"))
    assert main(["batch", str(manifest), "--out", str(tmp_path / "corpus")]) == 1
    capsys.readouterr()


def test_batch_missing_manifest(tmp_path, capsys):
    assert main(["batch", str(tmp_path / "none.txt"), "--out", str(tmp_path / "c")]) == 1
    assert "batch manifest not found" in capsys.readouterr().err


def test_batch_empty_manifest(tmp_path, capsys):
    manifest = tmp_path / "corpus.txt"
    manifest.write_text("# nothing here\n\n", encoding="utf-8")
    assert main(["batch", str(manifest), "--out", str(tmp_path / "c")]) == 1
    assert "lists no sites" in capsys.readouterr().err


def test_parse_batch_manifest_grammar(tmp_path):
    manifest = tmp_path / "corpus.txt"
    manifest.write_text(
        "# comment\n\nsnapA\nsnapB answers/b.txt\n", encoding="utf-8"
    )
    assert parse_batch_manifest(manifest) == [
        ("snapA", None),
        ("snapB", "answers/b.txt"),
    ]
    manifest.write_text("snapA b.txt extra\n", encoding="utf-8")
    with pytest.raises(ReportInvalid, match="line 1"):
        parse_batch_manifest(manifest)


# ---------------------------------------------------------------------------
# aggregate
# ---------------------------------------------------------------------------


@pytest.fixture
def corpus_dir(tmp_path):
    manifest = build_corpus(tmp_path)
    out = tmp_path / "corpus"
    assert main(["batch", str(manifest), "--out", str(out)]) == 0
    return out


def test_aggregate_json_to_stdout(corpus_dir, capsys):
    assert main(["aggregate", str(corpus_dir)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["n_sites"] == 3
    totals = {row["class"]: row["count"] for row in stats["category_totals"]}
    assert totals == {"WI-acquired": 1, "WI-ready": 2, "No-WI": 0}


def test_aggregate_accepts_index_file_and_csv(corpus_dir, capsys):
    assert main(["aggregate", str(corpus_dir / "corpus_index.json")]) == 0
    from_index = capsys.readouterr().out
    assert main(["aggregate", str(corpus_dir / "corpus.csv")]) == 0
    from_csv = capsys.readouterr().out
    assert from_index == from_csv


def test_aggregate_markdown_to_file(corpus_dir, tmp_path, capsys):
    out_file = tmp_path / "stats.md"
    code = main(
        ["--format", "markdown", "aggregate", str(corpus_dir), "--out", str(out_file)]
    )
    assert code == 0
    assert f"wrote {out_file}" in capsys.readouterr().out
    text = out_file.read_text(encoding="utf-8")
    assert text.startswith("# Corpus summary (3 sites)")
    assert "| Any combination with (3 or 5) | With WI | 1 |" in text


def test_aggregate_csv_requires_out_directory(corpus_dir, capsys):
    assert main(["--format", "csv", "aggregate", str(corpus_dir)]) == 1
    assert "needs --out" in capsys.readouterr().err


def test_aggregate_csv_writes_five_tables(corpus_dir, tmp_path, capsys):
    out_dir = tmp_path / "stats"
    code = main(
        ["--format", "csv", "aggregate", str(corpus_dir), "--out", str(out_dir)]
    )
    assert code == 0
    capsys.readouterr()
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == [
        "category_totals.csv",
        "combinations.csv",
        "criterion_counts.csv",
        "top_sites.csv",
        "wii_histogram.csv",
    ]


def test_aggregate_skips_failed_sites(tmp_path, capsys):
    manifest = build_corpus(tmp_path, corrupt=("two",))
    out = tmp_path / "corpus"
    main(["batch", str(manifest), "--out", str(out)])
    capsys.readouterr()
    assert main(["aggregate", str(out)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["n_sites"] == 2


def test_aggregate_empty_corpus(tmp_path, capsys):
    index = tmp_path / "corpus_index.json"
    index.write_text(
        json.dumps({"corpus_version": 1, "sites": []}) + "\n", encoding="utf-8"
    )
    assert main(["aggregate", str(index)]) == 1
    assert "EmptyCorpus" in capsys.readouterr().err


def test_aggregate_rejects_directory_without_corpus(tmp_path, capsys):
    assert main(["aggregate", str(tmp_path)]) == 1
    assert "neither corpus_index.json nor corpus.csv" in capsys.readouterr().err


def test_aggregate_rejects_bad_index(tmp_path, capsys):
    index = tmp_path / "corpus_index.json"
    index.write_text(json.dumps({"sites": []}), encoding="utf-8")
    assert main(["aggregate", str(index)]) == 1
    assert "not a corpus index" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# weights validate
# ---------------------------------------------------------------------------


def write_weight_lines(tmp_path, overrides=(), drop=()):
    from wiaudit.criteria import WeightTable

    entries = dict(WeightTable.default().entries)
    for cid, value in overrides:
        entries[cid] = value
    lines = [
        f"{cid} {value}" for cid, value in entries.items() if str(cid) not in drop
    ]
    path = tmp_path / "weights.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_weights_validate_ok(tmp_path, capsys):
    path = write_weight_lines(tmp_path)
    assert main(["weights", "validate", str(path)]) == 0
    assert capsys.readouterr().out == "ok: 15 criteria, total 6.00\n"


def test_weights_validate_warns_on_total(tmp_path, capsys):
    from wiaudit.criteria import CriterionId

    path = write_weight_lines(tmp_path, overrides=((CriterionId.C1, 6),))
    assert main(["weights", "validate", str(path)]) == 0
    out = capsys.readouterr().out
    assert "warning: total is 6.01 index points" in out
    assert "ok: 15 criteria, total 6.01" in out


def test_weights_validate_reports_errors(tmp_path, capsys):
    from wiaudit.criteria import CriterionId

    path = write_weight_lines(
        tmp_path, overrides=((CriterionId.C4, -3),), drop=("C5",)
    )
    assert main(["weights", "validate", str(path)]) == 1
    out = capsys.readouterr().out
    assert "error: negative weight for C4: -3" in out
    assert "error: missing weight for C5" in out


def test_weights_validate_missing_file(tmp_path, capsys):
    assert main(["weights", "validate", str(tmp_path / "none.txt")]) == 1
    assert "WeightTableInvalid" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------


def test_usage_errors_exit_2(tmp_path):
    for argv in ([], ["audit"], ["fetch", "http://x.test/"], ["frobnicate"]):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2


def test_invalid_format_choice_exits_2(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["--format", "yaml", "audit", str(tmp_path)])
    assert excinfo.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip() == f"wiaudit {__version__}"


def test_bad_config_path_fails_cleanly(tmp_path, capsys):
    snap = store_page(tmp_path, "snap")
    assert main(["--config", str(tmp_path / "none.json"), "audit", str(snap)]) == 1
    assert "ConfigInvalid" in capsys.readouterr().err
