"""Manual answer files and the merge with automated checker verdicts.

An assessor records the manual criteria in a line-oriented answer file;
automated checkers cover the rest.  The merge resolves each leaf under a
fixed precedence, Manual > Automated > HeuristicAdvisory > DefaultZero,
derives the parent criteria, and fixes the score and class.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping
from urllib.parse import urlsplit, urlunsplit

from .checks.results import CheckResult
from .criteria import (
    LEAF_IDS,
    MANUAL_ONLY_IDS,
    CriterionId,
    WeightTable,
    WiiClass,
    WiiScore,
    classify,
    compute_wii,
    derive_parents,
)
from .errors import AnswerFileInvalid, SiteMismatch

_HEADERS = ("site", "assessor", "date")


class Provenance(str, Enum):
    """Where a merged leaf value came from."""

    MANUAL = "Manual"
    AUTOMATED = "Automated"
    HEURISTIC_ADVISORY = "HeuristicAdvisory"
    DEFAULT_ZERO = "DefaultZero"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ManualAnswer:
    criterion: CriterionId
    value: int
    evidence: str

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise ValueError("answer value must be 0 or 1")
        if self.criterion not in LEAF_IDS:
            raise ValueError(f"{self.criterion} is not a leaf criterion")


@dataclass(frozen=True)
class ManualAnswerFile:
    """One assessor's answers for one site."""

    site_url: str
    assessor: str
    assessed_on: datetime.date
    answers: tuple[ManualAnswer, ...] = ()

    def __post_init__(self) -> None:
        seen: set[CriterionId] = set()
        for answer in self.answers:
            if answer.criterion in seen:
                raise ValueError(f"duplicate criterion {answer.criterion}")
            seen.add(answer.criterion)


def _unescape_evidence(raw: str, line_no: int) -> str:
    out: list[str] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == '"':
            raise AnswerFileInvalid(
                "evidence must be a double-quoted string", line=line_no
            )
        if ch == "\\":
            if i + 1 >= len(raw) or raw[i + 1] not in '"\\':
                raise AnswerFileInvalid(
                    "unsupported escape in evidence (only \\\" and \\\\)", line=line_no
                )
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _parse_answer(line: str, line_no: int) -> ManualAnswer:
    parts = line.split(None, 3)
    if len(parts) != 4:
        raise AnswerFileInvalid(
            'malformed answer line; expected: answer <criterion> <0|1> "<note>"',
            line=line_no,
        )
    _, cid_token, value_token, note = parts
    try:
        criterion = CriterionId(cid_token)
    except ValueError:
        raise AnswerFileInvalid(f"unknown criterion id {cid_token!r}", line=line_no)
    if criterion not in LEAF_IDS:
        raise AnswerFileInvalid(
            f"{criterion} is not a leaf criterion; answer its children", line=line_no
        )
    if value_token not in ("0", "1"):
        raise AnswerFileInvalid("value must be 0 or 1", line=line_no)
    if len(note) < 2 or not note.startswith('"') or not note.endswith('"'):
        raise AnswerFileInvalid("evidence must be a double-quoted string", line=line_no)
    body = note[1:-1]
    if body.endswith("\\") and not body.endswith("\\\\"):
        raise AnswerFileInvalid("evidence must be a double-quoted string", line=line_no)
    return ManualAnswer(
        criterion=criterion,
        value=int(value_token),
        evidence=_unescape_evidence(body, line_no),
    )


def load_answers(text: str) -> ManualAnswerFile:
    """Parse an answer file; reject anything outside the grammar.

    The grammar is three header lines (site, assessor, date, in that
    order), then any number of answer lines.  Blank lines and # comments
    may appear anywhere.
    """
    headers: dict[str, str] = {}
    answers: list[ManualAnswer] = []
    seen: set[CriterionId] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword = line.split(None, 1)[0]
        if keyword in _HEADERS:
            if keyword in headers:
                raise AnswerFileInvalid(f"duplicate {keyword} line", line=line_no)
            expected = _HEADERS[len(headers)]
            if keyword != expected:
                raise AnswerFileInvalid(
                    f"expected {expected} line, found {keyword}", line=line_no
                )
            fields = line.split(None, 1)
            rest = fields[1].strip() if len(fields) == 2 else ""
            if not rest:
                raise AnswerFileInvalid(f"{keyword} line needs a value", line=line_no)
            headers[keyword] = rest
        elif keyword == "answer":
            if len(headers) < len(_HEADERS):
                raise AnswerFileInvalid(
                    f"answer before {_HEADERS[len(headers)]} header", line=line_no
                )
            answer = _parse_answer(line, line_no)
            if answer.criterion in seen:
                raise AnswerFileInvalid(
                    f"duplicate criterion {answer.criterion}", line=line_no
                )
            seen.add(answer.criterion)
            answers.append(answer)
        else:
            raise AnswerFileInvalid(f"unrecognized directive {keyword!r}", line=line_no)

    if len(headers) < len(_HEADERS):
        raise AnswerFileInvalid(f"missing {_HEADERS[len(headers)]} header")

    parts = urlsplit(headers["site"])
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise AnswerFileInvalid("site must be an absolute http(s) URL")
    try:
        assessed_on = datetime.date.fromisoformat(headers["date"])
    except ValueError:
        raise AnswerFileInvalid("date must be YYYY-MM-DD")

    return ManualAnswerFile(
        site_url=headers["site"],
        assessor=headers["assessor"],
        assessed_on=assessed_on,
        answers=tuple(answers),
    )


def read_answer_file(path: str | Path) -> ManualAnswerFile:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise AnswerFileInvalid(f"answer file not found: {path}")
    except UnicodeDecodeError as exc:
        raise AnswerFileInvalid(f"answer file is not UTF-8: {exc.reason}")
    return load_answers(text)


def normalize_site_url(url: str) -> str:
    """Minimal normalization for identity checks: case and the bare path."""
    parts = urlsplit(url)
    return urlunsplit(
        (
            parts.scheme.lower(),
            parts.netloc.lower(),
            parts.path or "/",
            parts.query,
            parts.fragment,
        )
    )


@dataclass(frozen=True)
class MergePolicy:
    """How unconfirmed heuristic verdicts are treated."""

    accept_heuristics: bool = False


@dataclass(frozen=True)
class SiteAssessment:
    """The final per-site verdict: values, provenance, score, class."""

    site_url: str
    vector: Mapping[CriterionId, int]
    provenance: Mapping[CriterionId, Provenance]
    wii: WiiScore
    wii_class: WiiClass
    warnings: tuple[str, ...] = ()


def merge(
    site_url: str,
    auto: Iterable[CheckResult],
    manual: ManualAnswerFile | None = None,
    *,
    policy: MergePolicy | None = None,
    weights: WeightTable | None = None,
) -> SiteAssessment:
    """Resolve every leaf criterion from checker and assessor input.

    Precedence per leaf: a manual answer wins, then a non-advisory checker
    verdict, then an advisory verdict when the policy accepts heuristics;
    everything else defaults to 0.  Dropped advisory positives and
    unanswered manual-only criteria are recorded as warnings, not errors:
    the vector stays complete and binary either way.
    """
    policy = policy or MergePolicy()

    by_criterion: dict[CriterionId, CheckResult] = {}
    for result in auto:
        if result.criterion not in LEAF_IDS:
            raise ValueError(f"checker verdict for non-leaf criterion {result.criterion}")
        if result.criterion in by_criterion:
            raise ValueError(f"duplicate checker verdict for {result.criterion}")
        by_criterion[result.criterion] = result

    manual_by: dict[CriterionId, ManualAnswer] = {}
    if manual is not None:
        if normalize_site_url(manual.site_url) != normalize_site_url(site_url):
            raise SiteMismatch(
                f"answer file is for {manual.site_url}, not {site_url}"
            )
        manual_by = {answer.criterion: answer for answer in manual.answers}

    values: dict[CriterionId, int] = {}
    provenance: dict[CriterionId, Provenance] = {}
    warnings: list[str] = []
    for leaf in LEAF_IDS:
        answer = manual_by.get(leaf)
        result = by_criterion.get(leaf)
        if answer is not None:
            values[leaf] = answer.value
            provenance[leaf] = Provenance.MANUAL
        elif result is not None and not result.advisory:
            values[leaf] = result.value
            provenance[leaf] = Provenance.AUTOMATED
        elif result is not None and policy.accept_heuristics:
            values[leaf] = result.value
            provenance[leaf] = Provenance.HEURISTIC_ADVISORY
        else:
            if result is not None and result.value == 1:
                warnings.append(
                    f"{leaf}: heuristic suggested 1 without manual confirmation; recorded as 0"
                )
            elif leaf in MANUAL_ONLY_IDS:
                warnings.append(f"{leaf}: no manual answer; defaulting to 0")
            values[leaf] = 0
            provenance[leaf] = Provenance.DEFAULT_ZERO

    vector = derive_parents(values)
    return SiteAssessment(
        site_url=site_url,
        vector=vector,
        provenance=provenance,
        wii=compute_wii(vector, weights),
        wii_class=classify(vector),
        warnings=tuple(warnings),
    )
