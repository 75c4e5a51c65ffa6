"""Seeded generators for ground-truth-labeled weight traces and synthetic
multi-week study logs.

Both generators use ``random.Random(seed)`` (Mersenne Twister), so outputs
are reproducible across runs and platforms.

gen_trace scripts sips/refills as off-scale gaps followed by a return at
the adjusted weight, with uniform noise on every on-scale sample; the
scripted actions double as ground truth for the detector.

gen_study emits a complete event log for an A-B-A study: background sips
pace each day's intake target (phase B is boosted for the novelty window,
then decays back to baseline), and each intervention event draws a
response sip inside its five-minute window with the configured
probability.  Background sips are thinned against event windows and event
slots are spaced wider than the window, so the measured effective fraction
per kind is exactly the Bernoulli draw.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .analysis import EFFECT_WINDOW_MS
from .config import load_kv_file
from .eventlog import (
    DAY,
    HISTORICAL_VIEW,
    NOTIFICATION,
    SIP,
    SIPS,
    TIER_CHANGE,
    WEEK,
    LoggedEvent,
    format_event,
)
from .hydration import MS_PER_DAY
from .sensing import (
    BOTTLE_OFF,
    BOTTLE_ON,
    REFILL,
    DetectorConfig,
    SensorEvent,
    WeightSample,
)
from .sensing import SIP as SENSE_SIP

OFF_ON_NO_CHANGE = "OFF_ON_NO_CHANGE"

# Tue 2023-01-03 00:00 UTC; an arbitrary fixed study epoch
DEFAULT_STUDY_START_MS = 1_672_704_000_000

_EVENT_SLOT_MARGIN_MS = 2_000


class BadScenario(ValueError):
    """Scenario/profile description violates its invariants."""


class ScenarioOverflow(BadScenario):
    """Scripted volumes would drive the bottle weight below the off-scale
    threshold."""


@dataclass(frozen=True)
class ScriptedAction:
    ts: int
    kind: str            # SIP | REFILL | OFF_ON_NO_CHANGE
    volume_ml: float = 0.0


@dataclass(frozen=True)
class TraceScenario:
    seed: int = 0
    duration_ms: int = 60_000
    baseline_g: float = 500.0
    noise_amplitude_g: float = 0.0
    scripted: tuple[ScriptedAction, ...] = ()
    sample_period_ms: int = 200
    gap_ms: int = 5_000  # how long the bottle stays off the scale per action


@dataclass(frozen=True)
class StudyProfile:
    seed: int = 0
    phase_a1_days: int = 3
    phase_b_days: int = 15
    phase_a2_days: int = 3
    base_daily_ml: float = 2000.0
    novelty_boost: float = 0.35
    novelty_duration_days: int = 6
    novelty_decay_days: int = 2
    mean_sip_ml: float = 60.0
    start_ts_ms: int = DEFAULT_STUDY_START_MS
    response_prob: dict = field(default_factory=lambda: {
        HISTORICAL_VIEW: 0.304, TIER_CHANGE: 0.1708, NOTIFICATION: 0.0716,
    })
    events_total: dict = field(default_factory=lambda: {
        HISTORICAL_VIEW: 454, TIER_CHANGE: 638, NOTIFICATION: 1383,
    })

    @property
    def days(self) -> int:
        return self.phase_a1_days + self.phase_b_days + self.phase_a2_days


@dataclass(frozen=True)
class StudyResult:
    events: tuple[LoggedEvent, ...]
    # per intervention kind: (effective draws, total events), the generator's
    # own ground truth for the effectiveness analysis
    effective_counts: dict


def _validate_scenario(sc: TraceScenario, cfg: DetectorConfig):
    if sc.duration_ms <= 0 or sc.sample_period_ms <= 0 or sc.gap_ms <= 0:
        raise BadScenario("durations and periods must be positive")
    if sc.noise_amplitude_g < 0:
        raise BadScenario("noise amplitude must be non-negative")
    if sc.baseline_g < cfg.off_scale_threshold_g:
        raise ScenarioOverflow("baseline below off-scale threshold")
    min_spacing = sc.gap_ms + 3 * cfg.stable_window_ms
    prev = None
    weight = sc.baseline_g
    for a in sc.scripted:
        if prev is not None and a.ts - prev < min_spacing:
            raise BadScenario("scripted actions too close to settle between them")
        prev = a.ts
        if a.kind == SENSE_SIP:
            weight -= a.volume_ml * cfg.density_g_per_ml
        elif a.kind == REFILL:
            weight += a.volume_ml * cfg.density_g_per_ml
        elif a.kind != OFF_ON_NO_CHANGE:
            raise BadScenario(f"unknown scripted action kind {a.kind!r}")
        if weight < cfg.off_scale_threshold_g:
            raise ScenarioOverflow("scripted volumes drive weight below threshold")
    if sc.scripted and sc.scripted[-1].ts + min_spacing > sc.duration_ms:
        raise BadScenario("trace too short to settle after the last action")


def gen_trace(
    sc: TraceScenario, cfg: DetectorConfig | None = None
) -> tuple[list[WeightSample], list[SensorEvent]]:
    """Deterministic (seeded) weight trace plus its ground-truth events."""
    cfg = cfg or DetectorConfig()
    _validate_scenario(sc, cfg)
    rng = random.Random(sc.seed)

    # resting weight after each action, and the off-scale intervals
    segments = []  # (start_ms, weight) applying until next segment
    truth: list[SensorEvent] = []
    weight = sc.baseline_g
    off_intervals = []
    for a in sc.scripted:
        off_intervals.append((a.ts, a.ts + sc.gap_ms))
        truth.append(SensorEvent(ts=a.ts, kind=BOTTLE_OFF))
        if a.kind == SENSE_SIP:
            weight -= a.volume_ml * cfg.density_g_per_ml
        elif a.kind == REFILL:
            weight += a.volume_ml * cfg.density_g_per_ml
        truth.append(SensorEvent(ts=a.ts + sc.gap_ms, kind=BOTTLE_ON))
        if a.kind in (SENSE_SIP, REFILL) and a.volume_ml > 0:
            truth.append(SensorEvent(ts=a.ts + sc.gap_ms, kind=a.kind,
                                     volume_ml=a.volume_ml))
        segments.append((a.ts + sc.gap_ms, weight))

    samples: list[WeightSample] = []
    empty_reading_max = min(2.0, cfg.off_scale_threshold_g / 2)
    for t in range(0, sc.duration_ms, sc.sample_period_ms):
        if any(lo <= t < hi for lo, hi in off_intervals):
            grams = rng.uniform(0.0, empty_reading_max)
        else:
            w = sc.baseline_g
            for start, seg_weight in segments:
                if t >= start:
                    w = seg_weight
            grams = max(0.0, w + rng.uniform(-sc.noise_amplitude_g,
                                             sc.noise_amplitude_g))
        samples.append(WeightSample(ts=t, grams=grams))
    return samples, truth


def _schedule_day_events(rng, day_start: int, kinds: list[str],
                         window_ms: int) -> list[tuple[int, str]]:
    """Place the day's events in order with spacing > window_ms so no two
    effectiveness windows overlap."""
    n = len(kinds)
    if n == 0:
        return []
    usable = MS_PER_DAY - window_ms - _EVENT_SLOT_MARGIN_MS
    slot = usable / n
    slack = slot - window_ms - _EVENT_SLOT_MARGIN_MS
    if slack < 0:
        raise BadScenario("too many events per day for non-overlapping windows")
    kinds = list(kinds)
    rng.shuffle(kinds)
    return [
        (day_start + round(i * slot + rng.uniform(0, slack)), kinds[i])
        for i in range(n)
    ]


def _daily_target(profile: StudyProfile, day: int) -> float:
    """Intake target for day index `day` (0-based over the whole study)."""
    base = profile.base_daily_ml
    b_start = profile.phase_a1_days
    b_end = b_start + profile.phase_b_days
    if not b_start <= day < b_end:
        return base
    j = day - b_start
    boosted = base * (1.0 + profile.novelty_boost)
    if j < profile.novelty_duration_days:
        return boosted
    k = j - profile.novelty_duration_days
    if k < profile.novelty_decay_days:
        frac = (k + 1) / (profile.novelty_decay_days + 1)
        return boosted - (boosted - base) * frac
    return base


def _split_counts(total: int, days: int) -> list[int]:
    per = [total // days] * days
    for i in range(total % days):
        per[i] += 1
    return per


def gen_study(profile: StudyProfile,
              window_ms: int = EFFECT_WINDOW_MS) -> StudyResult:
    """Generate a full synthetic study log (see module docstring)."""
    if profile.days <= 0 or min(profile.phase_a1_days, profile.phase_b_days,
                                profile.phase_a2_days) < 0:
        raise BadScenario("phase day counts must be non-negative, days > 0")
    if any(not 0 <= p <= 1 for p in profile.response_prob.values()):
        raise BadScenario("response probabilities must lie in [0, 1]")
    rng = random.Random(profile.seed)

    b_start = profile.phase_a1_days
    b_end = b_start + profile.phase_b_days
    per_day_counts = {
        kind: _split_counts(total, profile.phase_b_days)
        for kind, total in profile.events_total.items()
    }

    records: list[tuple[int, str, dict]] = []  # (ts, kind, payload)
    effective_counts = {k: [0, 0] for k in profile.events_total}
    tier = 2
    msg_cursor = 0
    granularities = (WEEK, DAY, SIPS)

    for day in range(profile.days):
        day_start = profile.start_ts_ms + day * MS_PER_DAY
        target_ml = _daily_target(profile, day)

        day_events: list[tuple[int, str]] = []
        if b_start <= day < b_end:
            kinds: list[str] = []
            for kind, counts in per_day_counts.items():
                kinds.extend([kind] * counts[day - b_start])
            day_events = _schedule_day_events(rng, day_start, kinds, window_ms)

        sip_times: list[int] = []
        for ts, kind in day_events:
            payload: dict = {}
            if kind == NOTIFICATION:
                payload = {"level_pct": round(rng.uniform(0.0, 100.0), 1),
                           "message_index": msg_cursor}
                msg_cursor = (msg_cursor + 1) % 10
            elif kind == TIER_CHANGE:
                new = rng.choice([t for t in range(5) if t != tier])
                payload = {"old": tier, "new": new}
                tier = new
            elif kind == HISTORICAL_VIEW:
                payload = {"granularity": granularities[msg_cursor % 3]}
            records.append((ts, kind, payload))
            if kind in effective_counts:
                effective_counts[kind][1] += 1
                if rng.random() < profile.response_prob.get(kind, 0.0):
                    effective_counts[kind][0] += 1
                    sip_times.append(ts + rng.randint(1, window_ms))

        # background sips, thinned against every event window of the day
        n_total = max(1, round(target_ml / profile.mean_sip_ml)) if target_ml > 0 else 0
        n_bg = max(0, n_total - len(sip_times))
        windows = [(ts, ts + window_ms) for ts, _ in day_events]
        placed = 0
        attempts = 0
        while placed < n_bg and attempts < 100 * n_bg + 100:
            attempts += 1
            t = day_start + rng.randrange(0, MS_PER_DAY)
            if any(lo < t <= hi for lo, hi in windows):
                continue
            sip_times.append(t)
            placed += 1

        n_sips = len(sip_times)
        if n_sips:
            vol = target_ml / n_sips
            for t in sip_times:
                records.append((t, SIP, {"volume_ml": round(vol, 3)}))

    records.sort(key=lambda r: r[0])
    events = tuple(
        LoggedEvent(seq=i, ts=ts, kind=kind,
                    payload=tuple((k, _payload_str(v)) for k, v in payload.items()))
        for i, (ts, kind, payload) in enumerate(records)
    )
    return StudyResult(
        events=events,
        effective_counts={k: tuple(v) for k, v in effective_counts.items()},
    )


def gen_exact_effectiveness_log(
    totals: dict, effectives: dict,
    start_ts_ms: int = DEFAULT_STUDY_START_MS,
    seed: int = 0,
    window_ms: int = EFFECT_WINDOW_MS,
) -> list[LoggedEvent]:
    """A log with exactly `effectives[kind]` of `totals[kind]` events
    followed by a sip inside the window, and no stray sips anywhere."""
    rng = random.Random(seed)
    flags: dict[str, list[bool]] = {}
    for kind, total in totals.items():
        eff = effectives.get(kind, 0)
        if not 0 <= eff <= total:
            raise BadScenario("effectives must satisfy 0 <= eff <= total")
        f = [True] * eff + [False] * (total - eff)
        rng.shuffle(f)
        flags[kind] = f

    all_kinds: list[str] = []
    for kind, total in totals.items():
        all_kinds.extend([kind] * total)
    per_day_max = int((MS_PER_DAY - window_ms - _EVENT_SLOT_MARGIN_MS)
                      // (window_ms + _EVENT_SLOT_MARGIN_MS))
    days = math.ceil(len(all_kinds) / per_day_max) if all_kinds else 0
    per_day = _split_counts(len(all_kinds), days) if days else []
    rng.shuffle(all_kinds)

    records: list[tuple[int, str, dict]] = []
    tier = 2
    idx = 0
    cursors = {kind: 0 for kind in totals}
    for day in range(days):
        kinds = all_kinds[idx:idx + per_day[day]]
        idx += per_day[day]
        for ts, kind in _schedule_day_events(rng, start_ts_ms + day * MS_PER_DAY,
                                             kinds, window_ms):
            payload: dict = {}
            if kind == NOTIFICATION:
                payload = {"level_pct": 50.0, "message_index": cursors[kind] % 10}
            elif kind == TIER_CHANGE:
                new = (tier + 1) % 5
                payload = {"old": tier, "new": new}
                tier = new
            elif kind == HISTORICAL_VIEW:
                payload = {"granularity": WEEK}
            records.append((ts, kind, payload))
            if flags[kind][cursors[kind]]:
                sip_ts = ts + rng.randint(1, window_ms)
                records.append((sip_ts, SIP, {"volume_ml": 60.0}))
            cursors[kind] += 1

    records.sort(key=lambda r: r[0])
    return [
        LoggedEvent(seq=i, ts=ts, kind=kind,
                    payload=tuple((k, _payload_str(v)) for k, v in payload.items()))
        for i, (ts, kind, payload) in enumerate(records)
    ]


def _payload_str(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def write_events(events, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(format_event(ev))


def write_trace(samples, path):
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(f"{s.ts},{s.grams:.2f}\n")


# --- scenario / profile files (key = value) --------------------------------

def load_scenario(path) -> TraceScenario:
    kv = load_kv_file(path)
    if kv.get("type", "trace") != "trace":
        raise BadScenario("not a trace scenario file (type != trace)")
    actions = []
    for key in sorted(k for k in kv if k.startswith("action.")):
        parts = kv[key].split(",")
        if len(parts) not in (2, 3):
            raise BadScenario(f"bad action spec {kv[key]!r}")
        ts, kind = int(parts[0]), parts[1].strip().upper()
        vol = float(parts[2]) if len(parts) == 3 else 0.0
        actions.append(ScriptedAction(ts=ts, kind=kind, volume_ml=vol))
    try:
        return TraceScenario(
            seed=int(kv.get("seed", "0")),
            duration_ms=int(kv.get("duration_ms", "60000")),
            baseline_g=float(kv.get("baseline_g", "500")),
            noise_amplitude_g=float(kv.get("noise_amplitude_g", "0")),
            scripted=tuple(sorted(actions, key=lambda a: a.ts)),
            sample_period_ms=int(kv.get("sample_period_ms", "200")),
            gap_ms=int(kv.get("gap_ms", "5000")),
        )
    except ValueError as exc:
        raise BadScenario(str(exc)) from exc


def load_profile(path) -> StudyProfile:
    kv = load_kv_file(path)
    if kv.get("type", "study") != "study":
        raise BadScenario("not a study profile file (type != study)")
    defaults = StudyProfile()
    try:
        response_prob = dict(defaults.response_prob)
        events_total = dict(defaults.events_total)
        for kind in response_prob:
            lk = kind.lower()
            if f"response_prob.{lk}" in kv:
                response_prob[kind] = float(kv[f"response_prob.{lk}"])
            if f"events_total.{lk}" in kv:
                events_total[kind] = int(kv[f"events_total.{lk}"])
        return StudyProfile(
            seed=int(kv.get("seed", "0")),
            phase_a1_days=int(kv.get("phase_a1_days", "3")),
            phase_b_days=int(kv.get("phase_b_days", "15")),
            phase_a2_days=int(kv.get("phase_a2_days", "3")),
            base_daily_ml=float(kv.get("base_daily_ml", "2000")),
            novelty_boost=float(kv.get("novelty_boost", "0.35")),
            novelty_duration_days=int(kv.get("novelty_duration_days", "6")),
            novelty_decay_days=int(kv.get("novelty_decay_days", "2")),
            mean_sip_ml=float(kv.get("mean_sip_ml", "60")),
            start_ts_ms=int(kv.get("start_ts_ms", str(DEFAULT_STUDY_START_MS))),
            response_prob=response_prob,
            events_total=events_total,
        )
    except ValueError as exc:
        raise BadScenario(str(exc)) from exc
