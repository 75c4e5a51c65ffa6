"""Hydration model: intake pacing, prompt bands, feedback tiers.

The level is the percentage of the expected-by-now intake actually consumed,
where the expectation rises linearly from 0 at the start of the active window
to the daily goal at its end.  Two thresholds (20/80) split the level into
three prompt bands; five tiers (above 80/60/40/20/0) select the ambient
feedback artwork.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

MS_PER_MIN = 60_000
MS_PER_DAY = 86_400_000


class PromptBand(enum.IntEnum):
    LOW = 0
    MID = 1
    HIGH = 2


@dataclass(frozen=True)
class HydrationConfig:
    daily_goal_ml: float = 2500.0
    active_start_min: int = 9 * 60     # minutes since local midnight
    active_end_min: int = 18 * 60
    prompt_low_pct: float = 20.0
    prompt_high_pct: float = 80.0
    utc_offset_min: int = 0            # local-time offset used for day boundaries

    def __post_init__(self):
        if self.daily_goal_ml <= 0:
            raise ValueError("daily_goal_ml must be positive")
        if not 0 <= self.active_start_min < self.active_end_min <= 24 * 60:
            raise ValueError("active window must satisfy 0 <= start < end <= 24h")
        if not 0 < self.prompt_low_pct < self.prompt_high_pct < 100:
            raise ValueError("need 0 < prompt_low_pct < prompt_high_pct < 100")


@dataclass(frozen=True)
class HydrationSnapshot:
    ts: int
    level_pct: float
    consumed_ml: float
    expected_ml: float
    goal_ml: float
    band: PromptBand
    tier: int


def local_datetime(ts_ms: int, utc_offset_min: int = 0) -> datetime:
    tz = timezone(timedelta(minutes=utc_offset_min))
    return datetime.fromtimestamp(ts_ms / 1000.0, tz)


def minute_of_day(ts_ms: int, utc_offset_min: int = 0) -> float:
    dt = local_datetime(ts_ms, utc_offset_min)
    return dt.hour * 60 + dt.minute + dt.second / 60 + dt.microsecond / 6e7


def consumed_today(sips, now_ms: int, cfg: HydrationConfig) -> float:
    """Total volume of sips on the same local calendar date as `now_ms`.

    `sips` is any iterable of objects with `.ts` and `.volume_ml`.
    """
    today = local_datetime(now_ms, cfg.utc_offset_min).date()
    return sum(
        s.volume_ml for s in sips
        if local_datetime(s.ts, cfg.utc_offset_min).date() == today
    )


def expected_intake(now_ms: int, cfg: HydrationConfig) -> float:
    """Linear pacing: goal * clamp((now - start) / window, 0, 1) in local time."""
    mod = minute_of_day(now_ms, cfg.utc_offset_min)
    span = cfg.active_end_min - cfg.active_start_min
    frac = (mod - cfg.active_start_min) / span
    return cfg.daily_goal_ml * min(1.0, max(0.0, frac))


def hydration_level(consumed_ml: float, expected_ml: float) -> float:
    if expected_ml <= 0:
        return 100.0
    return min(1.0, max(0.0, consumed_ml / expected_ml)) * 100.0


def prompt_band(level_pct: float, cfg: HydrationConfig) -> PromptBand:
    if level_pct < cfg.prompt_low_pct:
        return PromptBand.LOW
    if level_pct < cfg.prompt_high_pct:
        return PromptBand.MID
    return PromptBand.HIGH


def feedback_tier(level_pct: float) -> int:
    """0 = most hydrated artwork, 4 = fully depleted; cutoffs are strict
    lower bounds (above 80 / 60 / 40 / 20 / 0)."""
    for tier, cutoff in enumerate((80.0, 60.0, 40.0, 20.0)):
        if level_pct > cutoff:
            return tier
    return 4


def goal_completion(sips, now_ms: int, cfg: HydrationConfig) -> tuple[float, float]:
    return consumed_today(sips, now_ms, cfg), cfg.daily_goal_ml


def snapshot(now_ms: int, sips, cfg: HydrationConfig) -> HydrationSnapshot:
    consumed = consumed_today(sips, now_ms, cfg)
    expected = expected_intake(now_ms, cfg)
    level = hydration_level(consumed, expected)
    return HydrationSnapshot(
        ts=now_ms,
        level_pct=level,
        consumed_ml=consumed,
        expected_ml=expected,
        goal_ml=cfg.daily_goal_ml,
        band=prompt_band(level, cfg),
        tier=feedback_tier(level),
    )
