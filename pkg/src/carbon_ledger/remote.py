"""Optional remote index client: fetch network days over HTTP, cache locally.

The endpoint shape is ``GET {base}/networks/{network_id}/days?from=...&to=...``
returning ``{"schema_version": "1", "days": [{...}]}`` where each day object
uses the same field names as the network CSV columns, decimals as strings.
Fetched days are cached one file per day so any rerun over a covered range is
served offline; ``fetch_count`` exposes how many HTTP calls were made.
"""

from __future__ import annotations

import datetime as _dt
import json
import urllib.error
import urllib.parse
import urllib.request
from pathlib import Path

from .errors import MalformedResponse, RangeUnavailable, Unreachable
from .ingestion import DEFAULT_COIN_DECIMALS, _RowIssue, day_from_fields, _day_fields
from .model import ConsensusParams, NetworkDay


def date_range(start: _dt.date, end: _dt.date) -> list[_dt.date]:
    """All days from start to end inclusive; empty when start > end."""
    days = []
    current = start
    while current <= end:
        days.append(current)
        current += _dt.timedelta(days=1)
    return days


class RemoteDayClient:
    """Fetches validated network days from a remote index, caching per day."""

    def __init__(
        self,
        base_url: str,
        cache_dir: str | Path,
        consensus: ConsensusParams,
        coin_decimals: int = DEFAULT_COIN_DECIMALS,
        timeout: float = 30.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.cache_dir = Path(cache_dir)
        self.consensus = consensus
        self.coin_decimals = coin_decimals
        self.timeout = timeout
        self.fetch_count = 0

    def _cache_path(self, network_id: str, date: _dt.date) -> Path:
        return self.cache_dir / network_id / f"{date.isoformat()}.json"

    def _day_from_object(self, obj, network_id: str) -> NetworkDay:
        if not isinstance(obj, dict):
            raise MalformedResponse(f"{network_id}: day entry must be an object")
        try:
            return day_from_fields(obj, self.consensus, self.coin_decimals)
        except _RowIssue as problem:
            column = f" column {problem.column!r}" if problem.column else ""
            raise MalformedResponse(
                f"{network_id} day {obj.get('date')!r}{column}: {problem.reason}"
            ) from None

    def _read_cached(self, network_id: str, date: _dt.date) -> NetworkDay | None:
        path = self._cache_path(network_id, date)
        if not path.exists():
            return None
        return self._day_from_object(json.loads(path.read_text(encoding="utf-8")), network_id)

    def _write_cache(self, network_id: str, day: NetworkDay) -> None:
        path = self._cache_path(network_id, day.date)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(_day_fields(day), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def _http_get(self, network_id: str, start: _dt.date, end: _dt.date) -> dict:
        query = urllib.parse.urlencode({"from": start.isoformat(), "to": end.isoformat()})
        url = f"{self.base_url}/networks/{urllib.parse.quote(network_id)}/days?{query}"
        self.fetch_count += 1
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as response:
                body = response.read()
        except urllib.error.HTTPError as exc:
            if exc.code == 404 or exc.code == 416:
                raise RangeUnavailable(
                    f"{network_id}: {start}..{end} not available ({exc.code})"
                ) from None
            raise Unreachable(f"{url}: HTTP {exc.code}") from None
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise Unreachable(f"{url}: {exc}") from None
        try:
            document = json.loads(body)
        except json.JSONDecodeError as exc:
            raise MalformedResponse(f"{url}: not valid JSON: {exc}") from None
        if not isinstance(document, dict) or not isinstance(document.get("days"), list):
            raise MalformedResponse(f"{url}: expected an object with a 'days' array")
        return document

    def fetch_days(
        self, network_id: str, start: _dt.date, end: _dt.date
    ) -> tuple[NetworkDay, ...]:
        """Days for [start, end] inclusive, from cache when fully covered.

        When any day is missing locally, the whole range is requested once,
        validated exactly like file ingestion, and written through the cache.
        """
        wanted = date_range(start, end)
        if not wanted:
            return ()
        cached: dict[_dt.date, NetworkDay] = {}
        for date in wanted:
            day = self._read_cached(network_id, date)
            if day is not None:
                cached[date] = day
        if len(cached) == len(wanted):
            return tuple(cached[d] for d in wanted)

        document = self._http_get(network_id, start, end)
        fetched: dict[_dt.date, NetworkDay] = {}
        for obj in document["days"]:
            day = self._day_from_object(obj, network_id)
            fetched[day.date] = day
        missing = [d for d in wanted if d not in fetched]
        if missing:
            listing = ", ".join(d.isoformat() for d in missing)
            raise RangeUnavailable(f"{network_id}: response does not cover {listing}")
        for date in wanted:
            self._write_cache(network_id, fetched[date])
        return tuple(fetched[d] for d in wanted)
