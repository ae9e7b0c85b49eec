"""Site reports: the per-site audit artifact.

JSON is the canonical form: key-sorted, two-space indented, trailing
newline, no timestamps, so the same snapshot, answers, and config always
produce the same bytes.  CSV and Markdown are lossy projections for
spreadsheets and humans.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .assessment import Provenance, SiteAssessment
from .checks.results import CheckResult, Evidence, EvidenceKind
from .criteria import (
    ALL_IDS,
    LEAF_IDS,
    CriterionId,
    WiiClass,
    WiiScore,
    classify,
    is_parent_consistent,
)
from .errors import ReportInvalid
from .snapshot import SiteSnapshot
from . import __version__

REPORT_VERSION = 1


@dataclass(frozen=True)
class SiteReport:
    site_url: str
    snapshot_digest: str
    checker_results: tuple[CheckResult, ...]
    assessment: SiteAssessment
    tool_version: str
    config_digest: str


def build_report(
    snapshot: SiteSnapshot,
    results: tuple[CheckResult, ...] | list[CheckResult],
    assessment: SiteAssessment,
    config_digest: str,
) -> SiteReport:
    if assessment.site_url != snapshot.root_url:
        raise ValueError("assessment and snapshot describe different sites")
    return SiteReport(
        site_url=snapshot.root_url,
        snapshot_digest=snapshot.manifest_digest,
        checker_results=tuple(results),
        assessment=assessment,
        tool_version=__version__,
        config_digest=config_digest,
    )


def report_as_dict(report: SiteReport) -> dict:
    assessment = report.assessment
    return {
        "report_version": REPORT_VERSION,
        "site_url": report.site_url,
        "snapshot_digest": report.snapshot_digest,
        "tool_version": report.tool_version,
        "config_digest": report.config_digest,
        "checkers": [
            {
                "criterion": str(r.criterion),
                "value": r.value,
                "advisory": r.advisory,
                "evidence": [
                    {
                        "kind": str(e.kind),
                        "resource_url": e.resource_url,
                        "detail": e.detail,
                        "locus": e.exact_locus,
                    }
                    for e in r.evidence
                ],
                "details": dict(r.details),
            }
            for r in report.checker_results
        ],
        "assessment": {
            "vector": {str(cid): assessment.vector[cid] for cid in ALL_IDS},
            "provenance": {
                str(cid): str(assessment.provenance[cid]) for cid in LEAF_IDS
            },
            "wii": assessment.wii.display,
            "class": assessment.wii_class.label,
            "warnings": list(assessment.warnings),
        },
    }


def render_report_json(report: SiteReport) -> str:
    return json.dumps(report_as_dict(report), indent=2, sort_keys=True) + "\n"


def render_report_csv(report: SiteReport) -> str:
    """Per-criterion rows; parent values appear with provenance 'derived'."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["criterion", "value", "provenance"])
    for cid in ALL_IDS:
        provenance = (
            str(report.assessment.provenance[cid]) if cid in LEAF_IDS else "derived"
        )
        writer.writerow([str(cid), report.assessment.vector[cid], provenance])
    writer.writerow([])
    writer.writerow(["wii", report.assessment.wii.display, ""])
    writer.writerow(["class", report.assessment.wii_class.label, ""])
    return out.getvalue()


def render_report_markdown(report: SiteReport) -> str:
    assessment = report.assessment
    lines = [
        f"# Audit of {report.site_url}",
        "",
        f"WII **{assessment.wii.display}**, category **{assessment.wii_class.label}**.",
        "",
        "| Criterion | Value | Provenance |",
        "| --- | ---: | --- |",
    ]
    for cid in ALL_IDS:
        provenance = (
            str(assessment.provenance[cid]) if cid in LEAF_IDS else "derived"
        )
        lines.append(f"| {cid} | {assessment.vector[cid]} | {provenance} |")
    lines += ["", "## Checker evidence", ""]
    for result in report.checker_results:
        lines.append(
            f"- {result.criterion}: value {result.value}"
            + (" (advisory)" if result.advisory else "")
        )
        for e in result.evidence:
            locus = f" [{e.exact_locus}]" if e.exact_locus else ""
            lines.append(f"  - {e.kind}: {e.detail} ({e.resource_url}{locus})")
    if assessment.warnings:
        lines += ["", "## Warnings", ""]
        lines += [f"- {w}" for w in assessment.warnings]
    lines += [
        "",
        f"Snapshot digest `{report.snapshot_digest}`, "
        f"config digest `{report.config_digest}`, "
        f"tool version {report.tool_version}.",
    ]
    return "\n".join(lines) + "\n"


def render_report(report: SiteReport, fmt: str) -> str:
    if fmt == "json":
        return render_report_json(report)
    if fmt == "csv":
        return render_report_csv(report)
    if fmt == "markdown":
        return render_report_markdown(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _parse_checker(entry: dict) -> CheckResult:
    evidence = tuple(
        Evidence(
            kind=EvidenceKind(e["kind"]),
            resource_url=e["resource_url"],
            detail=e["detail"],
            exact_locus=e.get("locus", ""),
        )
        for e in entry["evidence"]
    )
    return CheckResult(
        criterion=CriterionId(entry["criterion"]),
        value=entry["value"],
        evidence=evidence,
        advisory=entry["advisory"],
        details=entry.get("details", {}),
    )


def parse_report(data: dict) -> SiteReport:
    """Rebuild a report from its JSON form, re-checking internal consistency."""
    try:
        if data["report_version"] != REPORT_VERSION:
            raise ReportInvalid(
                f"unsupported report version {data['report_version']!r}"
            )
        raw = data["assessment"]
        vector = {CriterionId(k): v for k, v in raw["vector"].items()}
        provenance = {
            CriterionId(k): Provenance(v) for k, v in raw["provenance"].items()
        }
        assessment = SiteAssessment(
            site_url=data["site_url"],
            vector=vector,
            provenance=provenance,
            wii=WiiScore.parse(raw["wii"]),
            wii_class=WiiClass.from_label(raw["class"]),
            warnings=tuple(raw["warnings"]),
        )
        report = SiteReport(
            site_url=data["site_url"],
            snapshot_digest=data["snapshot_digest"],
            checker_results=tuple(_parse_checker(c) for c in data["checkers"]),
            assessment=assessment,
            tool_version=data["tool_version"],
            config_digest=data["config_digest"],
        )
    except ReportInvalid:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportInvalid(f"malformed report: {exc}")

    if set(vector) != set(ALL_IDS) or not all(v in (0, 1) for v in vector.values()):
        raise ReportInvalid("report vector must cover all criteria with 0/1 values")
    if not is_parent_consistent(vector):
        raise ReportInvalid("report vector is not parent-consistent")
    if set(provenance) != set(LEAF_IDS):
        raise ReportInvalid("report provenance must cover exactly the leaf criteria")
    if classify(vector) is not assessment.wii_class:
        raise ReportInvalid("report class does not match its vector")
    return report


def load_report(path: str | Path) -> SiteReport:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise ReportInvalid(f"report not found: {path}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportInvalid(f"{path}: not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ReportInvalid(f"{path}: report must be a JSON object")
    try:
        return parse_report(data)
    except ReportInvalid as exc:
        raise ReportInvalid(f"{path}: {exc}")
