"""Exception types shared across the toolkit."""

from __future__ import annotations


class WiAuditError(Exception):
    """Base class for all toolkit errors."""


class IncompleteAssessment(WiAuditError):
    """An assessment vector is missing criteria or has an inconsistent parent."""


class WeightTableInvalid(WiAuditError):
    """A weight table document could not be parsed or fails validation."""


class SnapshotFailed(WiAuditError):
    """The root resource of a site could not be captured."""


class SnapshotMissing(WiAuditError):
    """No snapshot exists at the given locator."""


class SnapshotCorrupt(WiAuditError):
    """Stored snapshot bytes do not match their recorded digests."""

    def __init__(self, message: str, *, resource_url: str | None = None) -> None:
        super().__init__(message)
        self.resource_url = resource_url


class AnswerFileInvalid(WiAuditError):
    """A manual answer file violates the documented grammar."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SiteMismatch(WiAuditError):
    """Manual answers and automated results describe different sites."""


class EmptyCorpus(WiAuditError):
    """A corpus operation that needs at least one site received none."""


class ConfigInvalid(WiAuditError):
    """An audit configuration document is malformed or self-contradictory."""


class ReportInvalid(WiAuditError):
    """A report or corpus artifact is malformed or fails its integrity checks."""
