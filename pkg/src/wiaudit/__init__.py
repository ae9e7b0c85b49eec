"""wiaudit: offline web-intelligence auditing toolkit.

Snapshots a site into a replayable archive, runs rubric checkers over the
snapshot, merges manual assessor answers, scores the weighted index, and
aggregates audit corpora into summary tables.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .criteria import (  # noqa: F401
    ALL_IDS,
    LEAF_IDS,
    MAIN_IDS,
    CriterionId,
    WeightTable,
    WiiClass,
    WiiScore,
    classify,
    compute_wii,
    derive_parents,
    load_weight_table,
    validate_weights,
)
