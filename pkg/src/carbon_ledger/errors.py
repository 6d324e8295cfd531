"""Exception hierarchy for the carbon-ledger engine and loaders."""

from __future__ import annotations

from dataclasses import dataclass


class CarbonLedgerError(Exception):
    """Base class for all domain errors raised by this package."""


class MalformedDay(CarbonLedgerError):
    """A network day cannot support the requested weighting (e.g. zero miner revenue)."""


class MissingColumn(CarbonLedgerError):
    """A day lacks a column that the consensus mechanism makes mandatory."""


class ShareOverflow(CarbonLedgerError):
    """An entity's basis quantity exceeds the available pool denominator."""


class NoTransactions(CarbonLedgerError):
    """A transaction record exists for a day or app that reports zero transactions."""


class BasisUnavailable(CarbonLedgerError):
    """None of the fee, gas, or count bases can be formed for a transaction record."""


class NotAToken(CarbonLedgerError):
    """A token-holding allocation was requested for an app without a token supply."""


class MissingDay(CarbonLedgerError):
    """Portfolio records reference dates with no matching network day."""

    def __init__(self, dates):
        self.dates = tuple(sorted(dates))
        listing = ", ".join(d.isoformat() for d in self.dates)
        super().__init__(f"no network day for: {listing}")


@dataclass(frozen=True)
class ValidationIssue:
    """One row-addressed validation failure found during ingestion.

    ``row`` is 1-based and counts data rows (the header is row 0); it is
    ``None`` for file-level problems. ``code`` is a stable machine-readable
    identifier (``row_invalid``, ``duplicate_date``, ``schema_mismatch``,
    ``join_invalid``).
    """

    source: str
    code: str
    reason: str
    row: int | None = None
    column: str | None = None

    def render(self) -> str:
        where = self.source
        if self.row is not None:
            where += f" row {self.row}"
        if self.column:
            where += f" column {self.column!r}"
        return f"{where}: {self.reason} [{self.code}]"


class IngestionError(CarbonLedgerError):
    """Base class for file/endpoint ingestion failures."""


class SchemaMismatch(IngestionError):
    """File header or top-level document shape does not match the schema."""


class DatasetInvalid(IngestionError):
    """One or more rows failed validation; carries the complete issue list."""

    def __init__(self, issues):
        self.issues: tuple[ValidationIssue, ...] = tuple(issues)
        super().__init__(
            "; ".join(issue.render() for issue in self.issues) or "dataset invalid"
        )


class RemoteError(IngestionError):
    """Base class for remote index client failures."""


class Unreachable(RemoteError):
    """The remote endpoint could not be reached."""


class MalformedResponse(RemoteError):
    """The remote endpoint answered with an unparseable or invalid payload."""


class RangeUnavailable(RemoteError):
    """The remote endpoint does not cover the requested date range."""
