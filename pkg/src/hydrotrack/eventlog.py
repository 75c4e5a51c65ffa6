"""Append-only event log: newline-delimited `key=value` records.

One event per line: `seq=<int> ts=<int> kind=<KIND> k1=v1 ...`, UTF-8,
space-separated, `\\n` terminated.  Values that would contain spaces (or
`=`/`%`/newlines) are percent-encoded.  The format is crash-tolerant: a
write cut short leaves at most one trailing partial line, and every
complete line before it still parses.
"""

from __future__ import annotations

import os
import urllib.parse
from dataclasses import dataclass
from datetime import timedelta

from .hydration import local_datetime

SIP = "SIP"
REFILL = "REFILL"
NOTIFICATION = "NOTIFICATION"
TIER_CHANGE = "TIER_CHANGE"
HISTORICAL_VIEW = "HISTORICAL_VIEW"
PREF_CHANGE = "PREF_CHANGE"

WEEK = "WEEK"
DAY = "DAY"
SIPS = "SIPS"

RECENT_SIP_COUNT = 20

_SAFE = "-._~"  # keep encoded values space- and '='-free


class StorageFailure(OSError):
    """Disk-level failure while appending; fatal for the daemon."""


class UnparseableLog(ValueError):
    """A non-tail line of the log failed to parse."""


@dataclass(frozen=True)
class LoggedEvent:
    seq: int
    ts: int
    kind: str
    payload: tuple[tuple[str, str], ...] = ()  # ordered, values stored decoded

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.payload:
            if k == key:
                return v
        return default

    @property
    def volume_ml(self) -> float:
        return float(self.get("volume_ml", "0"))


@dataclass(frozen=True)
class HistorySeries:
    granularity: str                       # WEEK | DAY | SIPS
    points: tuple[tuple[str, float], ...]  # (bucket label, total_ml)


def format_event(ev: LoggedEvent) -> str:
    parts = [f"seq={ev.seq}", f"ts={ev.ts}", f"kind={ev.kind}"]
    for k, v in ev.payload:
        parts.append(f"{k}={urllib.parse.quote(v, safe=_SAFE)}")
    return " ".join(parts) + "\n"


def parse_line(line: str) -> LoggedEvent:
    fields = []
    for token in line.strip("\n").split(" "):
        if "=" not in token:
            raise UnparseableLog(f"bad token {token!r} in {line!r}")
        k, _, v = token.partition("=")
        fields.append((k, urllib.parse.unquote(v)))
    if len(fields) < 3 or [k for k, _ in fields[:3]] != ["seq", "ts", "kind"]:
        raise UnparseableLog(f"missing seq/ts/kind header in {line!r}")
    try:
        seq = int(fields[0][1])
        ts = int(fields[1][1])
    except ValueError as exc:
        raise UnparseableLog(f"non-integer seq/ts in {line!r}") from exc
    return LoggedEvent(seq=seq, ts=ts, kind=fields[2][1], payload=tuple(fields[3:]))


def read_log(path) -> tuple[list[LoggedEvent], int]:
    """Parse a log file.  Returns (events, partial_tail_count) where the
    count is 1 if the file ends in an incomplete or unparseable last line."""
    with open(path, "rb") as fh:
        data = fh.read()
    events: list[LoggedEvent] = []
    partial = 0
    lines = data.split(b"\n")
    complete, tail = lines[:-1], lines[-1]
    for raw in complete:
        try:
            events.append(parse_line(raw.decode("utf-8")))
        except UnicodeDecodeError as exc:
            raise UnparseableLog(f"non-UTF-8 line {raw!r}") from exc
    if tail:
        partial = 1
    return events, partial


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


class EventLog:
    """Single-writer append-only log backed by one file.

    Appends are durable (flush + fsync) before returning.  Late timestamps
    are clamped to the last appended one so the log stays time-ordered.
    """

    def __init__(self, path, fsync: bool = True):
        self.path = str(path)
        self._fsync = fsync
        self.clamped = 0
        try:
            existing, _ = read_log(self.path) if os.path.exists(self.path) else ([], 0)
            self._fh = open(self.path, "ab")
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        self.next_seq = existing[-1].seq + 1 if existing else 0
        self.last_ts = existing[-1].ts if existing else 0

    def append(self, ts: int, kind: str, **payload) -> LoggedEvent:
        if ts < self.last_ts:
            ts = self.last_ts
            self.clamped += 1
        ev = LoggedEvent(
            seq=self.next_seq, ts=ts, kind=kind,
            payload=tuple((k, _fmt_value(v)) for k, v in payload.items()),
        )
        try:
            self._fh.write(format_event(ev).encode("utf-8"))
            self._fh.flush()
            if self._fsync:
                os.fsync(self._fh.fileno())
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        self.next_seq += 1
        self.last_ts = ts
        return ev

    def close(self):
        self._fh.close()


def query(events, kinds=None, start_ts=None, end_ts=None) -> list[LoggedEvent]:
    """Filter by kind set and inclusive time range, preserving seq order."""
    if start_ts is not None and end_ts is not None and start_ts > end_ts:
        raise ValueError("range start must be <= end")
    out = []
    for ev in events:
        if kinds is not None and ev.kind not in kinds:
            continue
        if start_ts is not None and ev.ts < start_ts:
            continue
        if end_ts is not None and ev.ts > end_ts:
            continue
        out.append(ev)
    return out


def history_series(events, granularity: str, now_ms: int,
                   utc_offset_min: int = 0) -> HistorySeries:
    """Intake history for the dashboard graphs.

    WEEK: 7 daily buckets ending today; DAY: 24 hourly buckets of today;
    SIPS: the last `RECENT_SIP_COUNT` raw sips.
    """
    sips = [ev for ev in events if ev.kind == SIP]
    today = local_datetime(now_ms, utc_offset_min).date()

    if granularity == WEEK:
        days = [today - timedelta(days=d) for d in range(6, -1, -1)]
        totals = {d: 0.0 for d in days}
        for ev in sips:
            d = local_datetime(ev.ts, utc_offset_min).date()
            if d in totals:
                totals[d] += ev.volume_ml
        points = tuple((d.isoformat(), totals[d]) for d in days)
    elif granularity == DAY:
        totals = [0.0] * 24
        for ev in sips:
            dt = local_datetime(ev.ts, utc_offset_min)
            if dt.date() == today:
                totals[dt.hour] += ev.volume_ml
        points = tuple((f"{h:02d}", totals[h]) for h in range(24))
    elif granularity == SIPS:
        points = tuple(
            (str(ev.ts), ev.volume_ml) for ev in sips[-RECENT_SIP_COUNT:]
        )
    else:
        raise ValueError(f"unknown granularity {granularity!r}")
    return HistorySeries(granularity=granularity, points=points)
