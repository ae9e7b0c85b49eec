"""Corpus aggregation: the five summary tables over scored sites.

Every percentage in these tables is computed in integers (half-up to one
decimal) and carried as its display string, so emitting a table twice can
never produce different bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .criteria import (
    ALL_IDS,
    LEAF_IDS,
    MAIN_IDS,
    PARENT_IDS,
    SHORT_LABELS,
    CriterionId,
    WiiClass,
    WiiScore,
    classify,
    is_parent_consistent,
)
from .errors import EmptyCorpus, ReportInvalid


@dataclass(frozen=True)
class ScoredSite:
    """The slice of a site assessment the aggregate tables need."""

    site_url: str
    vector: Mapping[CriterionId, int]
    wii: WiiScore
    wii_class: WiiClass

    @classmethod
    def from_assessment(cls, assessment) -> "ScoredSite":
        return cls(
            site_url=assessment.site_url,
            vector=dict(assessment.vector),
            wii=assessment.wii,
            wii_class=assessment.wii_class,
        )


def percent_tenths(count: int, total: int) -> int:
    """count/total as whole tenths of a percent, rounded half-up."""
    if total <= 0:
        return 0
    return (2 * count * 1000 + total) // (2 * total)


def percent_display(count: int, total: int) -> str:
    tenths = percent_tenths(count, total)
    return f"{tenths // 10}.{tenths % 10}"


# ---------------------------------------------------------------------------
# Per-criterion counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionCountRow:
    criterion: CriterionId
    count: int
    percent: str


def criterion_counts(corpus: Sequence[ScoredSite]) -> tuple[CriterionCountRow, ...]:
    """How many sites satisfy each of the fifteen criteria."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("criterion counts need at least one site")
    rows = []
    for cid in ALL_IDS:
        count = sum(site.vector[cid] for site in corpus)
        rows.append(CriterionCountRow(cid, count, percent_display(count, len(corpus))))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Combination taxonomy
# ---------------------------------------------------------------------------

# Ordered first-match partition over the satisfied main criteria.  Read
# independently the row definitions would overlap; the order makes each
# site land in exactly one row.
COMBINATION_ROWS: tuple[tuple[int, str, str], ...] = (
    (1, "1 only", "WI ready"),
    (2, "2 only", "WI ready"),
    (3, "3 only (if any from 2 components satisfied)", "With WI"),
    (4, "4 only", "WI ready"),
    (5, "5 only", "With WI"),
    (6, "6 only (if any from 4 components satisfied)", "WI ready"),
    (7, "7 only (if any from 2 components satisfied)", "WI ready"),
    (8, "3 and 5 combination only", "With WI"),
    (9, "Any combination with (3 or 5)", "With WI"),
    (10, "Any combination excluding (3 or 5)", "WI ready"),
    (11, "Sites which has no combination", "No WI"),
)

_WI_MAINS = {CriterionId.C3, CriterionId.C5}


def combination_row_number(vector: Mapping[CriterionId, int]) -> int:
    """Which of the eleven combination rows a vector belongs to (1-based)."""
    satisfied = {cid for cid in MAIN_IDS if vector[cid] == 1}
    if not satisfied:
        return 11
    if len(satisfied) == 1:
        return MAIN_IDS.index(next(iter(satisfied))) + 1
    if satisfied == _WI_MAINS:
        return 8
    if satisfied & _WI_MAINS:
        return 9
    return 10


@dataclass(frozen=True)
class CombinationRow:
    number: int
    label: str
    class_label: str
    count: int
    percent: str


def combination_table(corpus: Sequence[ScoredSite]) -> tuple[CombinationRow, ...]:
    corpus = list(corpus)
    counts = [0] * len(COMBINATION_ROWS)
    for site in corpus:
        counts[combination_row_number(site.vector) - 1] += 1
    return tuple(
        CombinationRow(number, label, class_label, count,
                       percent_display(count, len(corpus)))
        for (number, label, class_label), count in zip(COMBINATION_ROWS, counts)
    )


# ---------------------------------------------------------------------------
# Category totals
# ---------------------------------------------------------------------------

CATEGORY_ORDER: tuple[WiiClass, ...] = (
    WiiClass.WI_ACQUIRED,
    WiiClass.WI_READY,
    WiiClass.NO_WI,
)

CATEGORY_DISPLAY: dict[WiiClass, str] = {
    WiiClass.WI_ACQUIRED: "WI",
    WiiClass.WI_READY: "WI ready",
    WiiClass.NO_WI: "No WI",
}


@dataclass(frozen=True)
class CategoryRow:
    wii_class: WiiClass
    label: str
    count: int
    percent: str


def category_totals(corpus: Sequence[ScoredSite]) -> tuple[CategoryRow, ...]:
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("category totals need at least one site")
    rows = []
    for wii_class in CATEGORY_ORDER:
        count = sum(1 for site in corpus if site.wii_class is wii_class)
        rows.append(
            CategoryRow(wii_class, CATEGORY_DISPLAY[wii_class], count,
                        percent_display(count, len(corpus)))
        )
    return tuple(rows)


# ---------------------------------------------------------------------------
# Score histogram
# ---------------------------------------------------------------------------

# Centivalue buckets; the top bucket also absorbs any score above the
# 6.00 ceiling (possible only under a non-default weight table).
HISTOGRAM_BUCKETS: tuple[tuple[str, int, int], ...] = (
    ("< 0.01", 0, 0),
    ("0.01 - 1.00", 1, 100),
    ("1.01 - 2.00", 101, 200),
    ("2.01 - 3.00", 201, 300),
    ("3.01 - 4.00", 301, 400),
    ("4.01 - 5.00", 401, 500),
    ("5.01-6.00", 501, 600),
)


@dataclass(frozen=True)
class HistogramRow:
    label: str
    low_centi: int
    high_centi: int
    count: int
    percent_of_wi: str | None  # only the buckets above 1.00 report this


def wii_histogram(corpus: Sequence[ScoredSite]) -> tuple[HistogramRow, ...]:
    """Sites per score bucket, with percents against the WI site total."""
    corpus = list(corpus)
    wi_total = sum(1 for s in corpus if s.wii_class is WiiClass.WI_ACQUIRED)
    counts = [0] * len(HISTOGRAM_BUCKETS)
    for site in corpus:
        centi = site.wii.centi
        for index, (_, low, high) in enumerate(HISTOGRAM_BUCKETS):
            if low <= centi <= high:
                counts[index] += 1
                break
        else:
            counts[-1] += 1
    rows = []
    for (label, low, high), count in zip(HISTOGRAM_BUCKETS, counts):
        percent = percent_display(count, wi_total) if low > 100 else None
        rows.append(HistogramRow(label, low, high, count, percent))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Top sites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TopSiteRow:
    site_url: str
    wii: WiiScore
    wii_class: WiiClass


def top_sites(
    corpus: Sequence[ScoredSite], threshold: WiiScore = WiiScore(400)
) -> tuple[TopSiteRow, ...]:
    """Sites scoring strictly above the threshold, best first."""
    chosen = [site for site in corpus if site.wii.centi > threshold.centi]
    chosen.sort(key=lambda site: (-site.wii.centi, site.site_url))
    return tuple(TopSiteRow(s.site_url, s.wii, s.wii_class) for s in chosen)


# ---------------------------------------------------------------------------
# The five tables together
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusStats:
    n_sites: int
    criterion_counts: tuple[CriterionCountRow, ...]
    combination_rows: tuple[CombinationRow, ...]
    category_totals: tuple[CategoryRow, ...]
    histogram: tuple[HistogramRow, ...]
    top_sites: tuple[TopSiteRow, ...]
    warnings: tuple[str, ...] = ()


def compute_corpus_stats(corpus: Iterable[ScoredSite]) -> CorpusStats:
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("cannot aggregate an empty corpus")
    warnings = []
    over_ceiling = sum(1 for s in corpus if s.wii.centi > 600)
    if over_ceiling:
        warnings.append(
            f"{over_ceiling} site(s) score above 6.00; counted in the top histogram bucket"
        )
    return CorpusStats(
        n_sites=len(corpus),
        criterion_counts=criterion_counts(corpus),
        combination_rows=combination_table(corpus),
        category_totals=category_totals(corpus),
        histogram=wii_histogram(corpus),
        top_sites=top_sites(corpus),
        warnings=tuple(warnings),
    )


def stats_as_dict(stats: CorpusStats) -> dict:
    """JSON-ready view; percents stay strings so serialization is exact."""
    return {
        "n_sites": stats.n_sites,
        "criterion_counts": [
            {"criterion": str(r.criterion), "count": r.count, "percent": r.percent}
            for r in stats.criterion_counts
        ],
        "combinations": [
            {
                "row": r.number,
                "combination": r.label,
                "class": r.class_label,
                "count": r.count,
                "percent": r.percent,
            }
            for r in stats.combination_rows
        ],
        "category_totals": [
            {
                "class": r.wii_class.label,
                "label": r.label,
                "count": r.count,
                "percent": r.percent,
            }
            for r in stats.category_totals
        ],
        "wii_histogram": [
            {"bucket": r.label, "count": r.count, "percent_of_wi_sites": r.percent_of_wi}
            for r in stats.histogram
        ],
        "top_sites": [
            {"url": r.site_url, "wii": r.wii.display, "class": r.wii_class.label}
            for r in stats.top_sites
        ],
        "warnings": list(stats.warnings),
    }


def render_stats_json(stats: CorpusStats) -> str:
    return json.dumps(stats_as_dict(stats), indent=2, sort_keys=True) + "\n"


def render_stats_markdown(stats: CorpusStats) -> str:
    lines: list[str] = [f"# Corpus summary ({stats.n_sites} sites)", ""]

    lines += ["## Sites satisfying each criterion", ""]
    lines += ["| Criterion | Description | Count | % |", "| --- | --- | ---: | ---: |"]
    for r in stats.criterion_counts:
        lines.append(
            f"| {r.criterion} | {SHORT_LABELS[r.criterion]} | {r.count} | {r.percent} |"
        )

    lines += ["", "## Sites satisfying each combination of criteria", ""]
    lines += [
        "| Criteria present | Result | Count | % |",
        "| --- | --- | ---: | ---: |",
    ]
    for r in stats.combination_rows:
        lines.append(f"| {r.label} | {r.class_label} | {r.count} | {r.percent} |")

    lines += ["", "## Sites in each category", ""]
    lines += ["| Category | Count | % |", "| --- | ---: | ---: |"]
    for r in stats.category_totals:
        lines.append(f"| {r.label} | {r.count} | {r.percent} |")

    lines += ["", "## Sites against index value", ""]
    lines += [
        "| Index value | Count | % of WI sites |",
        "| --- | ---: | ---: |",
    ]
    for r in stats.histogram:
        percent = r.percent_of_wi if r.percent_of_wi is not None else ""
        lines.append(f"| {r.label} | {r.count} | {percent} |")

    lines += ["", "## Sites beyond index value 4", ""]
    if stats.top_sites:
        lines += ["| Site | Index | Category |", "| --- | ---: | --- |"]
        for r in stats.top_sites:
            lines.append(f"| {r.site_url} | {r.wii.display} | {r.wii_class.label} |")
    else:
        lines.append("No site scored above 4.00.")

    for warning in stats.warnings:
        lines += ["", f"Warning: {warning}"]
    return "\n".join(lines) + "\n"


def write_stats_csv(stats: CorpusStats, directory: str | Path) -> list[Path]:
    """One CSV file per table; returns the paths written."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def write(name: str, header: list[str], rows: list[list]) -> Path:
        path = directory / name
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        return path

    return [
        write(
            "criterion_counts.csv",
            ["criterion", "count", "percent"],
            [[str(r.criterion), r.count, r.percent] for r in stats.criterion_counts],
        ),
        write(
            "combinations.csv",
            ["row", "combination", "class", "count", "percent"],
            [
                [r.number, r.label, r.class_label, r.count, r.percent]
                for r in stats.combination_rows
            ],
        ),
        write(
            "category_totals.csv",
            ["class", "count", "percent"],
            [[r.label, r.count, r.percent] for r in stats.category_totals],
        ),
        write(
            "wii_histogram.csv",
            ["bucket", "count", "percent_of_wi_sites"],
            [
                [r.label, r.count, r.percent_of_wi if r.percent_of_wi is not None else ""]
                for r in stats.histogram
            ],
        ),
        write(
            "top_sites.csv",
            ["url", "wii", "class"],
            [[r.site_url, r.wii.display, r.wii_class.label] for r in stats.top_sites],
        ),
    ]


# ---------------------------------------------------------------------------
# Corpus CSV (one row per site)
# ---------------------------------------------------------------------------

CORPUS_HEADER: tuple[str, ...] = (
    "url",
    *(str(cid) for cid in LEAF_IDS),
    *(str(cid) for cid in PARENT_IDS),
    "wii",
    "class",
)


def write_corpus_csv(corpus: Sequence[ScoredSite], path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CORPUS_HEADER)
        for site in corpus:
            writer.writerow(
                [
                    site.site_url,
                    *(site.vector[cid] for cid in LEAF_IDS),
                    *(site.vector[cid] for cid in PARENT_IDS),
                    site.wii.display,
                    site.wii_class.label,
                ]
            )


def read_corpus_csv(path: str | Path) -> list[ScoredSite]:
    """Load a per-site corpus CSV, re-checking what can be re-checked.

    The class column must match the vector (classification is
    weight-independent); the score column is only parsed, since the weight
    table that produced it is not recorded in the file.
    """
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise ReportInvalid(f"corpus file not found: {path}")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CORPUS_HEADER:
        raise ReportInvalid(f"{path}: missing or wrong corpus CSV header")
    sites: list[ScoredSite] = []
    for row_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(CORPUS_HEADER):
            raise ReportInvalid(f"{path}: row {row_no}: expected {len(CORPUS_HEADER)} fields")
        url = row[0]
        vector: dict[CriterionId, int] = {}
        for cid, cell in zip((*LEAF_IDS, *PARENT_IDS), row[1:-2]):
            if cell not in ("0", "1"):
                raise ReportInvalid(f"{path}: row {row_no}: {cid} must be 0 or 1")
            vector[cid] = int(cell)
        if not is_parent_consistent(vector):
            raise ReportInvalid(f"{path}: row {row_no}: parent values inconsistent")
        try:
            wii = WiiScore.parse(row[-2])
            wii_class = WiiClass.from_label(row[-1])
        except ValueError as exc:
            raise ReportInvalid(f"{path}: row {row_no}: {exc}")
        if classify(vector) is not wii_class:
            raise ReportInvalid(
                f"{path}: row {row_no}: class {row[-1]} does not match the vector"
            )
        sites.append(ScoredSite(site_url=url, vector=vector, wii=wii, wii_class=wii_class))
    return sites
