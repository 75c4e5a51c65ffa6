"""Field-log analytics: effectiveness windows, chi-square tests, phase summaries.

An intervention event is "effective" when at least one sip lands in the
five minutes after it, window half-open (t, t+300000] ms.  Pairwise kind
comparisons use the Pearson chi-square statistic on the 2x2 table without
continuity correction; p-values are bucketed from the df=1 critical values.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from datetime import date, timedelta

from .eventlog import HISTORICAL_VIEW, NOTIFICATION, SIP, TIER_CHANGE
from .hydration import local_datetime

EFFECT_WINDOW_MS = 300_000

KIND_LABELS = (
    (HISTORICAL_VIEW, "Historical data"),
    (TIER_CHANGE, "Implicit feedback"),
    (NOTIFICATION, "Prompting"),
)

# df=1 critical values for the bucketed p-value report
_CRITICAL = ((10.828, "<0.001"), (6.635, "<0.01"), (3.841, "<0.05"))
P_NS = ">=0.05"


class OverlappingPhases(ValueError):
    """Phase date ranges must be ordered and non-overlapping."""


@dataclass(frozen=True)
class EffectivenessRow:
    kind: str
    label: str
    total: int
    effective: int

    @property
    def pct(self) -> float:
        return 100.0 * self.effective / self.total if self.total else 0.0


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_bucket: str


@dataclass(frozen=True)
class PhaseSummary:
    phase: str
    days: int
    mean_daily_ml: float
    per_day: tuple[tuple[date, float], ...]


def effective_count(event_ts, sip_ts, window_ms: int = EFFECT_WINDOW_MS) -> tuple[int, int]:
    """(effective, total) for time-ordered event and sip timestamp lists.

    An event counts as effective when some sip ts lies in (t, t+window_ms];
    one sip may satisfy several events.
    """
    sip_ts = list(sip_ts)
    effective = 0
    total = 0
    for t in event_ts:
        total += 1
        i = bisect.bisect_right(sip_ts, t)  # first sip strictly after t
        if i < len(sip_ts) and sip_ts[i] <= t + window_ms:
            effective += 1
    return effective, total


def effectiveness_table(events, window_ms: int = EFFECT_WINDOW_MS) -> list[EffectivenessRow]:
    """One row per intervention kind, pooled over the whole log."""
    sip_ts = sorted(ev.ts for ev in events if ev.kind == SIP)
    rows = []
    for kind, label in KIND_LABELS:
        ets = sorted(ev.ts for ev in events if ev.kind == kind)
        eff, total = effective_count(ets, sip_ts, window_ms)
        rows.append(EffectivenessRow(kind=kind, label=label, total=total, effective=eff))
    return rows


def chi_square_2x2(eff1: int, total1: int, eff2: int, total2: int) -> ChiSquareResult:
    """Pearson statistic (no continuity correction) comparing two
    effective/total proportions.  Degenerate margins give statistic 0."""
    if not (0 <= eff1 <= total1 and 0 <= eff2 <= total2) or total1 <= 0 or total2 <= 0:
        raise ValueError("need totals > 0 and 0 <= effective <= total")
    a, b = eff1, total1 - eff1
    c, d = eff2, total2 - eff2
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return ChiSquareResult(statistic=0.0, df=1, p_bucket=P_NS)
    stat = n * (a * d - b * c) ** 2 / denom
    for cutoff, bucket in _CRITICAL:
        if stat >= cutoff:
            return ChiSquareResult(statistic=stat, df=1, p_bucket=bucket)
    return ChiSquareResult(statistic=stat, df=1, p_bucket=P_NS)


def phase_summary(events, phases, utc_offset_min: int = 0) -> list[PhaseSummary]:
    """Per-phase daily intake from SIP events.

    `phases` is a list of (name, start_date, end_date) with inclusive dates,
    ordered and non-overlapping (e.g. A1/B/A2).
    """
    prev_end = None
    for name, start, end in phases:
        if start > end:
            raise OverlappingPhases(f"phase {name}: start after end")
        if prev_end is not None and start <= prev_end:
            raise OverlappingPhases(f"phase {name} overlaps the previous phase")
        prev_end = end

    daily: dict[date, float] = {}
    for ev in events:
        if ev.kind == SIP:
            d = local_datetime(ev.ts, utc_offset_min).date()
            daily[d] = daily.get(d, 0.0) + ev.volume_ml

    out = []
    for name, start, end in phases:
        days = (end - start).days + 1
        per_day = tuple(
            (start + timedelta(days=i), daily.get(start + timedelta(days=i), 0.0))
            for i in range(days)
        )
        mean = sum(v for _, v in per_day) / days if days else 0.0
        out.append(PhaseSummary(phase=name, days=days, mean_daily_ml=mean, per_day=per_day))
    return out
