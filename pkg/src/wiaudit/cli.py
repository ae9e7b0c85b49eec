"""Command-line interface.

Five commands: fetch a snapshot, audit one snapshot, batch-audit a corpus,
aggregate corpus statistics, and validate a weight table.  Shared flags
(--config, --format, --weights, --accept-heuristics, --force) are accepted
both before and after the command name; the later occurrence wins.

Exit codes: 0 success, 1 for any audit failure, 2 for usage errors
(argparse's convention).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .aggregate import (
    ScoredSite,
    compute_corpus_stats,
    read_corpus_csv,
    render_stats_json,
    render_stats_markdown,
    write_corpus_csv,
    write_stats_csv,
)
from .assessment import MergePolicy, merge, read_answer_file
from .checks import run_all_checkers
from .config import (
    OUTPUT_FORMATS,
    AuditConfig,
    default_config,
    load_config,
)
from .criteria import WeightTable, centi_display, validate_weights
from .errors import ReportInvalid, WeightTableInvalid, WiAuditError
from .report import build_report, load_report, render_report, render_report_json
from .snapshot import fetch_site, load_snapshot, store_snapshot


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a flag given before the command name from being reset
    # to a default by the subparser.
    parser.add_argument(
        "--config",
        metavar="PATH",
        default=argparse.SUPPRESS,
        help="configuration file (default: $WIAUDIT_CONFIG if set)",
    )
    parser.add_argument(
        "--format",
        choices=OUTPUT_FORMATS,
        default=argparse.SUPPRESS,
        help="output format (default: json)",
    )
    parser.add_argument(
        "--weights",
        metavar="PATH",
        default=argparse.SUPPRESS,
        help="weight table overriding the built-in defaults",
    )
    parser.add_argument(
        "--accept-heuristics",
        action="store_true",
        default=argparse.SUPPRESS,
        help="let advisory heuristic results count without manual confirmation",
    )
    parser.add_argument(
        "--force",
        action="store_true",
        default=argparse.SUPPRESS,
        help="overwrite existing outputs instead of reusing them",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wiaudit",
        description="Audit websites for web-intelligence readiness.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    _add_common_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    fetch = sub.add_parser("fetch", help="capture a site snapshot")
    fetch.add_argument("url", help="absolute http(s) URL of the site root")
    fetch.add_argument("--out", required=True, metavar="DIR", help="snapshot directory")
    _add_common_flags(fetch)
    fetch.set_defaults(handler=cmd_fetch)

    audit = sub.add_parser("audit", help="audit one stored snapshot")
    audit.add_argument("snapshot", metavar="SNAPSHOT_DIR")
    audit.add_argument("--answers", metavar="FILE", help="manual assessor answers")
    audit.add_argument(
        "--out", metavar="FILE", help="write the report here instead of stdout"
    )
    _add_common_flags(audit)
    audit.set_defaults(handler=cmd_audit)

    batch = sub.add_parser("batch", help="audit every site in a manifest")
    batch.add_argument(
        "manifest",
        metavar="MANIFEST",
        help="text file of 'SNAPSHOT_DIR [ANSWER_FILE]' lines",
    )
    batch.add_argument("--out", required=True, metavar="DIR", help="corpus directory")
    _add_common_flags(batch)
    batch.set_defaults(handler=cmd_batch)

    aggregate = sub.add_parser("aggregate", help="summarise an audited corpus")
    aggregate.add_argument(
        "corpus",
        metavar="CORPUS",
        help="corpus_index.json, corpus.csv, or a batch output directory",
    )
    aggregate.add_argument(
        "--out", metavar="PATH", help="output file (or directory for csv format)"
    )
    _add_common_flags(aggregate)
    aggregate.set_defaults(handler=cmd_aggregate)

    weights = sub.add_parser("weights", help="weight table utilities")
    wsub = weights.add_subparsers(dest="weights_command", required=True,
                                  metavar="SUBCOMMAND")
    validate = wsub.add_parser("validate", help="check a weight table file")
    validate.add_argument("table", metavar="FILE")
    _add_common_flags(validate)
    validate.set_defaults(handler=cmd_weights_validate)

    return parser


def resolve_config(args: argparse.Namespace) -> AuditConfig:
    config_path = getattr(args, "config", None)
    config = load_config(config_path) if config_path else default_config()
    changes = {}
    weights_path = getattr(args, "weights", None)
    if weights_path is not None:
        changes["weight_table_path"] = Path(weights_path)
    if getattr(args, "accept_heuristics", False):
        changes["accept_heuristics"] = True
    fmt = getattr(args, "format", None)
    if fmt is not None:
        changes["format"] = fmt
    if changes:
        config = replace(config, **changes)
    return config


def _write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def cmd_fetch(args: argparse.Namespace, config: AuditConfig) -> int:
    snapshot = fetch_site(args.url, config.fetch)
    out = store_snapshot(snapshot, args.out, overwrite=getattr(args, "force", False))
    note = " (truncated by fetch limits)" if snapshot.truncated else ""
    print(
        f"captured {len(snapshot.resources)} resources"
        f" from {snapshot.root_url} into {out}{note}"
    )
    return 0


def cmd_audit(args: argparse.Namespace, config: AuditConfig) -> int:
    snapshot = load_snapshot(args.snapshot)
    results = run_all_checkers(snapshot, config.mobile)
    manual = read_answer_file(args.answers) if args.answers else None
    assessment = merge(
        snapshot.root_url,
        results,
        manual,
        policy=MergePolicy(accept_heuristics=config.accept_heuristics),
        weights=config.load_weights(),
    )
    report = build_report(snapshot, results, assessment, config.digest())
    rendered = render_report(report, config.format)
    if args.out:
        _write_text_atomic(Path(args.out), rendered)
    else:
        sys.stdout.write(rendered)
    for warning in assessment.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"WII {assessment.wii.display}  class {assessment.wii_class.label}")
    return 0


def _slug(text: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]+", "-", text).strip("-.")
    return cleaned or "site"


def _report_filename(locator: str) -> str:
    # Hash the manifest entry as written so reruns of the same manifest
    # reuse the same report files wherever the corpus tree lives.
    digest = hashlib.sha256(locator.encode("utf-8")).hexdigest()[:8]
    return f"{_slug(Path(locator).name)}-{digest}.json"


def parse_batch_manifest(path: str | Path) -> list[tuple[str, str | None]]:
    """Lines of 'SNAPSHOT_DIR [ANSWER_FILE]'; # comments and blanks allowed."""
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise ReportInvalid(f"batch manifest not found: {path}")
    entries: list[tuple[str, str | None]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) > 2:
            raise ReportInvalid(
                f"{path}: line {lineno}: expected 'SNAPSHOT_DIR [ANSWER_FILE]'"
            )
        entries.append((fields[0], fields[1] if len(fields) == 2 else None))
    if not entries:
        raise ReportInvalid(f"{path}: batch manifest lists no sites")
    return entries


def cmd_batch(args: argparse.Namespace, config: AuditConfig) -> int:
    manifest_path = Path(args.manifest)
    entries = parse_batch_manifest(manifest_path)
    base = manifest_path.parent
    out = Path(args.out)
    (out / "reports").mkdir(parents=True, exist_ok=True)
    force = getattr(args, "force", False)
    weights = config.load_weights()
    policy = MergePolicy(accept_heuristics=config.accept_heuristics)
    config_digest = config.digest()

    index_entries = []
    scored: list[ScoredSite] = []
    failures: list[tuple[str, str]] = []
    for snapshot_loc, answers_loc in entries:
        report_rel = f"reports/{_report_filename(snapshot_loc)}"
        report_path = out / report_rel
        record = {
            "snapshot": snapshot_loc,
            "answers": answers_loc,
            "report": None,
            "site_url": None,
            "status": "failed",
            "error": None,
        }
        report = None
        if report_path.exists() and not force:
            try:
                report = load_report(report_path)
            except ReportInvalid:
                report = None  # damaged leftover; recompute
        if report is None:
            try:
                snapshot = load_snapshot(base / snapshot_loc)
                results = run_all_checkers(snapshot, config.mobile)
                manual = (
                    read_answer_file(base / answers_loc) if answers_loc else None
                )
                assessment = merge(
                    snapshot.root_url, results, manual,
                    policy=policy, weights=weights,
                )
                report = build_report(snapshot, results, assessment, config_digest)
                _write_text_atomic(report_path, render_report_json(report))
            except WiAuditError as exc:
                record["error"] = f"{type(exc).__name__}: {exc}"
                failures.append((snapshot_loc, record["error"]))
                index_entries.append(record)
                continue
        record["report"] = report_rel
        record["site_url"] = report.site_url
        record["status"] = "ok"
        record["error"] = None
        index_entries.append(record)
        scored.append(ScoredSite.from_assessment(report.assessment))

    index = {"corpus_version": 1, "sites": index_entries}
    _write_text_atomic(
        out / "corpus_index.json",
        json.dumps(index, indent=2, sort_keys=True) + "\n",
    )
    if scored:
        write_corpus_csv(scored, out / "corpus.csv")
    for locator, error in failures:
        print(f"failed: {locator}: {error}", file=sys.stderr)
    print(f"audited {len(scored)}/{len(entries)} sites into {out}")
    return 0 if scored else 1


def _scored_from_index(path: Path) -> list[ScoredSite]:
    try:
        data = json.loads(path.read_text("utf-8"))
    except FileNotFoundError:
        raise ReportInvalid(f"corpus index not found: {path}")
    except json.JSONDecodeError as exc:
        raise ReportInvalid(f"{path}: not valid JSON: {exc}")
    if (
        not isinstance(data, dict)
        or data.get("corpus_version") != 1
        or not isinstance(data.get("sites"), list)
    ):
        raise ReportInvalid(f"{path}: not a corpus index")
    sites = []
    for entry in data["sites"]:
        if not isinstance(entry, dict):
            raise ReportInvalid(f"{path}: corpus index entries must be objects")
        if entry.get("status") != "ok":
            continue
        report = load_report(path.parent / entry["report"])
        sites.append(ScoredSite.from_assessment(report.assessment))
    return sites


def _load_corpus(source: Path) -> list[ScoredSite]:
    if source.is_dir():
        index = source / "corpus_index.json"
        if index.is_file():
            return _scored_from_index(index)
        table = source / "corpus.csv"
        if table.is_file():
            return read_corpus_csv(table)
        raise ReportInvalid(
            f"{source}: directory holds neither corpus_index.json nor corpus.csv"
        )
    if source.suffix == ".csv":
        return read_corpus_csv(source)
    return _scored_from_index(source)


def cmd_aggregate(args: argparse.Namespace, config: AuditConfig) -> int:
    sites = _load_corpus(Path(args.corpus))
    stats = compute_corpus_stats(sites)
    out = Path(args.out) if args.out else None
    if config.format == "csv":
        if out is None:
            raise ReportInvalid("csv aggregate output needs --out DIRECTORY")
        out.mkdir(parents=True, exist_ok=True)
        for written in write_stats_csv(stats, out):
            print(f"wrote {written}")
    else:
        text = (
            render_stats_json(stats)
            if config.format == "json"
            else render_stats_markdown(stats)
        )
        if out is None:
            sys.stdout.write(text)
        else:
            _write_text_atomic(out, text)
            print(f"wrote {out}")
    for warning in stats.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_weights_validate(args: argparse.Namespace, config: AuditConfig) -> int:
    path = Path(args.table)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise WeightTableInvalid(f"weight table not found: {path}")
    except UnicodeDecodeError:
        raise WeightTableInvalid(f"{path}: not valid UTF-8")
    table = WeightTable.from_text(text)
    validation = validate_weights(table)
    for error in validation.errors:
        print(f"error: {error}")
    for warning in validation.warnings:
        print(f"warning: {warning}")
    if not validation.ok:
        return 1
    print(f"ok: {len(table.entries)} criteria, total {centi_display(table.total)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        return args.handler(args, config)
    except WiAuditError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
