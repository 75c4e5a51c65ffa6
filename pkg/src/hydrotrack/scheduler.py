"""Intervention scheduling: timed prompts and tier-change feedback.

Prompt spacing is the user's preferred interval scaled by a per-band
multiplier (prompt sooner when hydration is low, later when high).  Prompt
messages rotate round-robin through a fixed list of ten short phrases so
runs are reproducible.  Tier changes are emitted whenever the snapshot's
feedback tier differs from the last one seen.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .hydration import MS_PER_MIN, HydrationConfig, HydrationSnapshot, PromptBand, minute_of_day

NOTIFICATION = "NOTIFICATION"
TIER_CHANGE = "TIER_CHANGE"

# Three phrases are the classic hydration primes; the rest are neutral
# fillers (placeholder copy, swap freely).
DEFAULT_MESSAGES = (
    "water is good",
    "Drinking water helps you feel more energetic",
    "Drinking water can make you more productive",
    "A sip now keeps the slump away",
    "Your body is mostly water, top it up",
    "Small sips, steady focus",
    "Hydration helps concentration",
    "Keep the bottle close, keep drinking",
    "A glass of water never hurts",
    "Stay ahead of thirst",
)


@dataclass(frozen=True)
class SchedulerConfig:
    preferred_interval_min: int = 60
    band_multiplier: dict = field(default_factory=lambda: {
        PromptBand.LOW: 0.5, PromptBand.MID: 1.0, PromptBand.HIGH: 2.0,
    })
    messages: tuple = DEFAULT_MESSAGES
    quiet_outside_active_hours: bool = True

    def __post_init__(self):
        if self.preferred_interval_min <= 0:
            raise ValueError("preferred_interval_min must be positive")
        if len(self.messages) != 10:
            raise ValueError("exactly 10 messages required")
        m = self.band_multiplier
        if any(v <= 0 for v in m.values()):
            raise ValueError("band multipliers must be strictly positive")
        if not m[PromptBand.LOW] <= m[PromptBand.MID] <= m[PromptBand.HIGH]:
            raise ValueError("multipliers must be ordered LOW <= MID <= HIGH")


@dataclass(frozen=True)
class SchedulerState:
    last_prompt_ts: int
    message_cursor: int = 0
    current_tier: int = 0


@dataclass(frozen=True)
class InterventionEvent:
    ts: int
    kind: str                    # NOTIFICATION | TIER_CHANGE
    level_pct: float = 0.0       # NOTIFICATION
    message_index: int = 0       # NOTIFICATION
    old_tier: int = 0            # TIER_CHANGE
    new_tier: int = 0            # TIER_CHANGE


def next_prompt_delay(band: PromptBand, cfg: SchedulerConfig) -> int:
    """Delay until the next prompt for the given band, in milliseconds."""
    return round(cfg.preferred_interval_min * cfg.band_multiplier[band] * MS_PER_MIN)


def pick_message(state: SchedulerState) -> tuple[int, SchedulerState]:
    """Return the current message index and advance the cursor modulo 10."""
    idx = state.message_cursor
    return idx, replace(state, message_cursor=(idx + 1) % 10)


def within_active_hours(now_ms: int, hyd_cfg: HydrationConfig) -> bool:
    # end-inclusive so a prompt landing exactly on active_end still fires
    mod = minute_of_day(now_ms, hyd_cfg.utc_offset_min)
    return hyd_cfg.active_start_min <= mod <= hyd_cfg.active_end_min


def tick(
    now_ms: int,
    snap: HydrationSnapshot,
    state: SchedulerState,
    cfg: SchedulerConfig,
    hyd_cfg: HydrationConfig,
) -> tuple[SchedulerState, list[InterventionEvent]]:
    """One driver step.  May emit a TierChange, a Notification, or both."""
    events: list[InterventionEvent] = []

    if snap.tier != state.current_tier:
        events.append(InterventionEvent(ts=now_ms, kind=TIER_CHANGE,
                                        old_tier=state.current_tier,
                                        new_tier=snap.tier))
        state = replace(state, current_tier=snap.tier)

    due = now_ms - state.last_prompt_ts >= next_prompt_delay(snap.band, cfg)
    allowed = not cfg.quiet_outside_active_hours or within_active_hours(now_ms, hyd_cfg)
    if due and allowed:
        idx, state = pick_message(state)
        events.append(InterventionEvent(ts=now_ms, kind=NOTIFICATION,
                                        level_pct=snap.level_pct,
                                        message_index=idx))
        state = replace(state, last_prompt_ts=now_ms)

    return state, events
