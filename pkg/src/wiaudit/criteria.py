"""Criteria taxonomy, weight tables, index scoring and site classification.

The rubric is a fixed tree of fifteen criteria: twelve leaves that are
actually assessed and three parent criteria whose value is the logical OR
of their children.  Scores are kept in integer centiweights (hundredths of
an index point) end to end; floats never touch the scoring path.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import IncompleteAssessment, WeightTableInvalid

# ---------------------------------------------------------------------------
# Taxonomy
# ---------------------------------------------------------------------------


class CriterionId(str, Enum):
    """Stable wire identifiers for the fifteen rubric criteria."""

    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C3_1 = "C3_1"
    C3_2 = "C3_2"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"
    C6_1 = "C6_1"
    C6_2 = "C6_2"
    C6_3 = "C6_3"
    C6_4 = "C6_4"
    C7 = "C7"
    C7_1 = "C7_1"
    C7_2 = "C7_2"

    def __str__(self) -> str:  # "C3_1" rather than "CriterionId.C3_1"
        return self.value


# Canonical orderings.  ALL_IDS interleaves parents with their children the
# way the rubric reads top to bottom; LEAF_IDS is the assessable subset.
ALL_IDS: tuple[CriterionId, ...] = (
    CriterionId.C1,
    CriterionId.C2,
    CriterionId.C3,
    CriterionId.C3_1,
    CriterionId.C3_2,
    CriterionId.C4,
    CriterionId.C5,
    CriterionId.C6,
    CriterionId.C6_1,
    CriterionId.C6_2,
    CriterionId.C6_3,
    CriterionId.C6_4,
    CriterionId.C7,
    CriterionId.C7_1,
    CriterionId.C7_2,
)

CHILDREN: dict[CriterionId, tuple[CriterionId, ...]] = {
    CriterionId.C3: (CriterionId.C3_1, CriterionId.C3_2),
    CriterionId.C6: (
        CriterionId.C6_1,
        CriterionId.C6_2,
        CriterionId.C6_3,
        CriterionId.C6_4,
    ),
    CriterionId.C7: (CriterionId.C7_1, CriterionId.C7_2),
}

PARENT_IDS: tuple[CriterionId, ...] = tuple(CHILDREN)

LEAF_IDS: tuple[CriterionId, ...] = tuple(
    cid for cid in ALL_IDS if cid not in CHILDREN
)

# Main criteria used by the combination breakdown: top-level rubric rows.
MAIN_IDS: tuple[CriterionId, ...] = (
    CriterionId.C1,
    CriterionId.C2,
    CriterionId.C3,
    CriterionId.C4,
    CriterionId.C5,
    CriterionId.C6,
    CriterionId.C7,
)

# Leaves that no automated checker covers; they only ever come from manual
# answer files and default to 0 with a warning otherwise.
MANUAL_ONLY_IDS: frozenset[CriterionId] = frozenset(
    {
        CriterionId.C1,
        CriterionId.C3_1,
        CriterionId.C3_2,
        CriterionId.C4,
        CriterionId.C5,
    }
)

# Leaves whose automated checkers are heuristic and only advisory.
ADVISORY_IDS: frozenset[CriterionId] = frozenset(
    {CriterionId.C7_1, CriterionId.C7_2}
)

SHORT_LABELS: dict[CriterionId, str] = {
    CriterionId.C1: "information published",
    CriterionId.C2: "dynamic web technology",
    CriterionId.C3: "user needs served",
    CriterionId.C3_1: "services on the site itself",
    CriterionId.C3_2: "services via third-party applications",
    CriterionId.C4: "feedback or contact facility",
    CriterionId.C5: "dynamic interactive e-services",
    CriterionId.C6: "machine-understandable content",
    CriterionId.C6_1: "mobile friendliness",
    CriterionId.C6_2: "semantic page structure",
    CriterionId.C6_3: "RDF documents",
    CriterionId.C6_4: "RSS or Atom feeds",
    CriterionId.C7: "data storage signals",
    CriterionId.C7_1: "machine-processable storage",
    CriterionId.C7_2: "human-oriented storage",
}

# An assessment vector is a plain mapping CriterionId -> 0/1 covering all
# fifteen criteria.  Helpers below keep it complete and parent-consistent.
AssessmentVector = Mapping[CriterionId, int]


def _check_values(vector: Mapping[CriterionId, int], ids: Iterable[CriterionId]) -> None:
    missing = [cid.value for cid in ids if cid not in vector]
    if missing:
        raise IncompleteAssessment(f"missing criteria: {', '.join(missing)}")
    bad = [cid.value for cid in ids if vector[cid] not in (0, 1)]
    if bad:
        raise IncompleteAssessment(f"values outside 0/1 for: {', '.join(bad)}")


def derive_parents(leaves: Mapping[CriterionId, int]) -> dict[CriterionId, int]:
    """Complete a leaf valuation into a full parent-consistent vector.

    A parent criterion counts as satisfied when at least one of its
    children is.  Parent keys already present in the input must agree with
    the derived value.
    """
    _check_values(leaves, LEAF_IDS)
    full: dict[CriterionId, int] = {}
    for cid in ALL_IDS:
        if cid in CHILDREN:
            derived = 1 if any(leaves[child] for child in CHILDREN[cid]) else 0
            if cid in leaves and leaves[cid] != derived:
                raise IncompleteAssessment(
                    f"{cid} given as {leaves[cid]} but its children derive {derived}"
                )
            full[cid] = derived
        else:
            full[cid] = leaves[cid]
    return full


def is_parent_consistent(vector: AssessmentVector) -> bool:
    return all(
        vector[parent] == (1 if any(vector[c] for c in kids) else 0)
        for parent, kids in CHILDREN.items()
    )


# ---------------------------------------------------------------------------
# Weight tables
# ---------------------------------------------------------------------------

# Default leaf weights in centiweights (hundredths of an index point).
# Parents carry no weight of their own; the table totals exactly 600.
DEFAULT_LEAF_CENTIWEIGHTS: dict[CriterionId, int] = {
    CriterionId.C1: 5,
    CriterionId.C2: 15,
    CriterionId.C3_1: 150,
    CriterionId.C3_2: 100,
    CriterionId.C4: 3,
    CriterionId.C5: 250,
    CriterionId.C6_1: 7,
    CriterionId.C6_2: 15,
    CriterionId.C6_3: 25,
    CriterionId.C6_4: 10,
    CriterionId.C7_1: 15,
    CriterionId.C7_2: 5,
}

DEFAULT_TOTAL_CENTIWEIGHTS = 600


def centi_display(centi: int) -> str:
    """Fixed-point rendering of a centivalue, always two decimals."""
    if centi < 0:
        return "-" + centi_display(-centi)
    return f"{centi // 100}.{centi % 100:02d}"


def parse_centi(text: str) -> int:
    """Inverse of centi_display for exact round-trips ('1.65' -> 165)."""
    whole, _, frac = text.strip().partition(".")
    if not whole.lstrip("-").isdigit() or len(frac) != 2 or not frac.isdigit():
        raise ValueError(f"not a 2-decimal fixed-point value: {text!r}")
    sign = -1 if whole.startswith("-") else 1
    return sign * (abs(int(whole)) * 100 + int(frac))


@dataclass(frozen=True)
class WeightTable:
    """Immutable criterion -> centiweight mapping covering all criteria."""

    entries: Mapping[CriterionId, int]

    @classmethod
    def default(cls) -> "WeightTable":
        entries = {cid: 0 for cid in PARENT_IDS}
        entries.update(DEFAULT_LEAF_CENTIWEIGHTS)
        return cls(entries=dict(entries))

    def centiweight(self, cid: CriterionId) -> int:
        try:
            return self.entries[cid]
        except KeyError:
            raise WeightTableInvalid(f"no weight for criterion {cid}") from None

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def to_text(self) -> str:
        lines = ["# criterion centiweight (hundredths of an index point)"]
        lines += [f"{cid.value} {self.entries[cid]}" for cid in ALL_IDS if cid in self.entries]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WeightTable":
        """Parse the plain-text weight format: '<criterion-id> <centiweight>'.

        Blank lines and full-line '#' comments are skipped; unknown ids and
        duplicates are errors.
        """
        entries: dict[CriterionId, int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise WeightTableInvalid(
                    f"line {lineno}: expected '<criterion-id> <centiweight>', got {raw!r}"
                )
            ident, weight_text = parts
            try:
                cid = CriterionId(ident)
            except ValueError:
                raise WeightTableInvalid(f"line {lineno}: unknown criterion id {ident!r}") from None
            if cid in entries:
                raise WeightTableInvalid(f"line {lineno}: duplicate entry for {cid}")
            try:
                weight = int(weight_text, 10)
            except ValueError:
                raise WeightTableInvalid(
                    f"line {lineno}: centiweight must be an integer, got {weight_text!r}"
                ) from None
            entries[cid] = weight
        return cls(entries=entries)


@dataclass(frozen=True)
class WeightValidation:
    """Outcome of validate_weights: hard errors plus advisory warnings."""

    errors: tuple[str, ...]
    warnings: tuple[str, ...]
    total: int

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_weights(table: WeightTable) -> WeightValidation:
    """Check a weight table for completeness and sane values.

    Missing criteria and negative weights are errors; a total that differs
    from the default 600 centiweights is only flagged as a warning.
    """
    errors: list[str] = []
    warnings: list[str] = []
    for cid in ALL_IDS:
        if cid not in table.entries:
            errors.append(f"missing weight for {cid}")
        elif table.entries[cid] < 0:
            errors.append(f"negative weight for {cid}: {table.entries[cid]}")
    unknown = [k for k in table.entries if not isinstance(k, CriterionId)]
    if unknown:
        errors.append(f"unknown keys: {unknown!r}")
    total = table.total
    if not errors and total != DEFAULT_TOTAL_CENTIWEIGHTS:
        warnings.append(
            "total is "
            f"{centi_display(total)} index points, default tables total "
            f"{centi_display(DEFAULT_TOTAL_CENTIWEIGHTS)}"
        )
    return WeightValidation(errors=tuple(errors), warnings=tuple(warnings), total=total)


def load_weight_table(path: str) -> WeightTable:
    """Load and validate a weight table document; errors are fatal."""
    with open(path, "r", encoding="utf-8") as fh:
        table = WeightTable.from_text(fh.read())
    validation = validate_weights(table)
    if not validation.ok:
        raise WeightTableInvalid("; ".join(validation.errors))
    return table


# ---------------------------------------------------------------------------
# Scoring and classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class WiiScore:
    """Web-intelligence index value in integer centivalue form."""

    centi: int

    @property
    def display(self) -> str:
        return centi_display(self.centi)

    @classmethod
    def parse(cls, text: str) -> "WiiScore":
        return cls(parse_centi(text))


class WiiClass(Enum):
    """Site classification: which stage of web intelligence a site reached."""

    NO_WI = "No-WI"
    WI_READY = "WI-ready"
    WI_ACQUIRED = "WI-acquired"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def from_label(cls, label: str) -> "WiiClass":
        for member in cls:
            if member.value == label:
                return member
        raise ValueError(f"unknown class label {label!r}")


def compute_wii(vector: AssessmentVector, table: WeightTable | None = None) -> WiiScore:
    """Weighted sum of criterion values, in exact integer centivalues."""
    if table is None:
        table = WeightTable.default()
    _check_values(vector, ALL_IDS)
    return WiiScore(sum(vector[cid] * table.centiweight(cid) for cid in ALL_IDS))


def classify(vector: AssessmentVector) -> WiiClass:
    """Classify a complete, parent-consistent vector.

    Classification is by criterion presence, never by score: a site with
    services (C3) or interactive e-services (C5) has acquired web
    intelligence, a site satisfying nothing at all has none, and anything
    else is ready for it.
    """
    _check_values(vector, ALL_IDS)
    if not is_parent_consistent(vector):
        raise IncompleteAssessment("vector is not parent-consistent")
    if vector[CriterionId.C3] == 1 or vector[CriterionId.C5] == 1:
        return WiiClass.WI_ACQUIRED
    if all(vector[cid] == 0 for cid in ALL_IDS):
        return WiiClass.NO_WI
    return WiiClass.WI_READY
