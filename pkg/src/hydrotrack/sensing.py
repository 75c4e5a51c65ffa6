"""Weight-sample parsing and the bottle state machine.

The scale reports a stream of `<ts_ms>,<grams>` lines.  Removing the bottle
drops the reading below an off-scale threshold; when it comes back we wait
for the signal to settle (load cells ring after placement), then compare the
new resting weight against the old one.  A decrease of at least ``min_sip_g``
is a sip, an increase a refill.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from statistics import fmean

SIP = "SIP"
REFILL = "REFILL"
BOTTLE_OFF = "BOTTLE_OFF"
BOTTLE_ON = "BOTTLE_ON"

ON_SCALE = "ON_SCALE"
OFF_SCALE = "OFF_SCALE"
SETTLING = "SETTLING"


class MalformedRecord(ValueError):
    """A sensor wire-format line that cannot be decoded."""


@dataclass(frozen=True)
class WeightSample:
    ts: int          # milliseconds since Unix epoch (UTC)
    grams: float     # scale reading, >= 0


@dataclass(frozen=True)
class DetectorConfig:
    off_scale_threshold_g: float = 30.0
    stable_window_ms: int = 1500
    stable_band_g: float = 3.0
    min_sip_g: float = 5.0
    density_g_per_ml: float = 1.0

    def __post_init__(self):
        for name in ("off_scale_threshold_g", "stable_window_ms",
                     "stable_band_g", "min_sip_g", "density_g_per_ml"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.min_sip_g <= self.stable_band_g:
            raise ValueError("min_sip_g must exceed stable_band_g")


@dataclass(frozen=True)
class SensorEvent:
    ts: int
    kind: str                # SIP | REFILL | BOTTLE_OFF | BOTTLE_ON
    volume_ml: float = 0.0   # meaningful for SIP/REFILL only


@dataclass(frozen=True)
class BottleState:
    """Detector state: on the scale with a known baseline, off the scale
    remembering the old baseline, or settling after a return."""

    mode: str = SETTLING
    baseline_g: float | None = None          # last confirmed resting weight
    window: tuple[WeightSample, ...] = ()    # samples under consideration while settling


def parse_sample(line: str | bytes) -> WeightSample:
    """Decode one `<ts_ms>,<grams>` line; raise MalformedRecord otherwise."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRecord(f"not UTF-8: {line!r}") from exc
    parts = line.strip().split(",")
    if len(parts) != 2:
        raise MalformedRecord(f"expected 2 fields, got {len(parts)}: {line!r}")
    try:
        ts = int(parts[0])
        grams = float(parts[1])
    except ValueError as exc:
        raise MalformedRecord(f"non-numeric field in {line!r}") from exc
    if grams < 0 or grams != grams:  # reject negatives and NaN
        raise MalformedRecord(f"negative or NaN weight in {line!r}")
    if ts < 0:
        raise MalformedRecord(f"negative timestamp in {line!r}")
    return WeightSample(ts=ts, grams=grams)


def step_detect(
    state: BottleState, sample: WeightSample, cfg: DetectorConfig
) -> tuple[BottleState, list[SensorEvent]]:
    """Feed one sample through the state machine, returning the new state and
    any events it produced.  Total: never raises on sample content."""
    events: list[SensorEvent] = []

    if state.mode == ON_SCALE:
        if sample.grams < cfg.off_scale_threshold_g:
            events.append(SensorEvent(ts=sample.ts, kind=BOTTLE_OFF))
            state = BottleState(mode=OFF_SCALE, baseline_g=state.baseline_g)
        return state, events

    if state.mode == OFF_SCALE:
        if sample.grams >= cfg.off_scale_threshold_g:
            state = BottleState(mode=SETTLING, baseline_g=state.baseline_g,
                                window=(sample,))
        return state, events

    # SETTLING: wait for readings to stay within stable_band_g for stable_window_ms
    if sample.grams < cfg.off_scale_threshold_g:
        # bottle lifted again before settling; keep the old baseline
        return BottleState(mode=OFF_SCALE, baseline_g=state.baseline_g), events

    window = list(state.window)
    window.append(sample)
    # keep the newest consistent run of samples
    while max(s.grams for s in window) - min(s.grams for s in window) > cfg.stable_band_g:
        window.pop(0)

    if window[-1].ts - window[0].ts >= cfg.stable_window_ms:
        new_baseline = fmean(s.grams for s in window)
        events.append(SensorEvent(ts=sample.ts, kind=BOTTLE_ON))
        if state.baseline_g is not None:
            delta_g = state.baseline_g - new_baseline
            if delta_g >= cfg.min_sip_g:
                events.append(SensorEvent(ts=sample.ts, kind=SIP,
                                          volume_ml=delta_g / cfg.density_g_per_ml))
            elif -delta_g >= cfg.min_sip_g:
                events.append(SensorEvent(ts=sample.ts, kind=REFILL,
                                          volume_ml=-delta_g / cfg.density_g_per_ml))
        return BottleState(mode=ON_SCALE, baseline_g=new_baseline), events

    return replace(state, window=tuple(window)), events


def run_detector(samples, cfg: DetectorConfig | None = None) -> list[SensorEvent]:
    """Fold step_detect over an ordered sample sequence from the initial
    settling state.  Deterministic."""
    cfg = cfg or DetectorConfig()
    state = BottleState()
    out: list[SensorEvent] = []
    for sample in samples:
        state, events = step_detect(state, sample, cfg)
        out.extend(events)
    return out
