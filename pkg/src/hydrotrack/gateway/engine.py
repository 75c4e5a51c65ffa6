"""The daemon's single mutable-state owner.

One Engine instance wires sensing -> hydration -> scheduler -> eventlog.
All mutation funnels through a lock so HTTP handlers can read and submit
preference changes safely while the ingestion loop runs.
"""

from __future__ import annotations

import threading
import time
from dataclasses import replace

from .. import eventlog, hydration, scheduler, sensing

TICK_INTERVAL_MS = 60_000


class Engine:
    def __init__(self, log: eventlog.EventLog,
                 hyd_cfg: hydration.HydrationConfig | None = None,
                 sched_cfg: scheduler.SchedulerConfig | None = None,
                 det_cfg: sensing.DetectorConfig | None = None,
                 start_ts: int = 0, virtual_clock: bool = False):
        self.log = log
        self.hyd_cfg = hyd_cfg or hydration.HydrationConfig()
        self.sched_cfg = sched_cfg or scheduler.SchedulerConfig()
        self.det_cfg = det_cfg or sensing.DetectorConfig()
        self.bottle = sensing.BottleState()
        self.sched_state = scheduler.SchedulerState(last_prompt_ts=start_ts)
        self.sips: list[sensing.SensorEvent] = []
        self.last_sip_ts: int | None = None
        self.pending_message: str | None = None
        self.last_tick_ts = start_ts
        # virtual clock: "now" follows the sample stream instead of the wall,
        # so replayed historical data stays queryable at its own timestamps
        self.virtual_clock = virtual_clock
        self.last_seen_ts = start_ts
        self.lock = threading.RLock()
        self.new_event = threading.Condition(self.lock)
        self.running = True

        # recover sip history from an existing log
        events, _ = eventlog.read_log(log.path)
        for ev in events:
            if ev.kind == eventlog.SIP:
                self.sips.append(sensing.SensorEvent(
                    ts=ev.ts, kind=sensing.SIP, volume_ml=ev.volume_ml))
                self.last_sip_ts = ev.ts
        if events:
            self.last_seen_ts = max(self.last_seen_ts, events[-1].ts)

    # -- ingestion ---------------------------------------------------------

    def current_time(self) -> int:
        if self.virtual_clock:
            with self.lock:
                return self.last_seen_ts
        return int(time.time() * 1000)

    def ingest_sample(self, sample: sensing.WeightSample):
        with self.lock:
            self.last_seen_ts = max(self.last_seen_ts, sample.ts)
            self.bottle, events = sensing.step_detect(self.bottle, sample, self.det_cfg)
            for ev in events:
                if ev.kind == sensing.SIP:
                    self.log.append(ev.ts, eventlog.SIP, volume_ml=ev.volume_ml)
                    self.sips.append(ev)
                    self.last_sip_ts = ev.ts
                    self.new_event.notify_all()
                elif ev.kind == sensing.REFILL:
                    self.log.append(ev.ts, eventlog.REFILL, volume_ml=ev.volume_ml)
                    self.new_event.notify_all()
            if sample.ts - self.last_tick_ts >= TICK_INTERVAL_MS:
                self._tick_locked(sample.ts)

    def tick(self, now_ms: int):
        with self.lock:
            self._tick_locked(now_ms)

    def _tick_locked(self, now_ms: int):
        self.last_seen_ts = max(self.last_seen_ts, now_ms)
        snap = hydration.snapshot(now_ms, self.sips, self.hyd_cfg)
        self.sched_state, events = scheduler.tick(
            now_ms, snap, self.sched_state, self.sched_cfg, self.hyd_cfg)
        for ev in events:
            if ev.kind == scheduler.NOTIFICATION:
                self.log.append(ev.ts, eventlog.NOTIFICATION,
                                level_pct=ev.level_pct,
                                message_index=ev.message_index)
                self.pending_message = self.sched_cfg.messages[ev.message_index]
            else:
                self.log.append(ev.ts, eventlog.TIER_CHANGE,
                                old=ev.old_tier, new=ev.new_tier)
        if events:
            self.new_event.notify_all()
        self.last_tick_ts = now_ms

    # -- API-facing reads/writes ------------------------------------------

    def state_payload(self, now_ms: int) -> dict:
        with self.lock:
            snap = hydration.snapshot(now_ms, self.sips, self.hyd_cfg)
            consumed, goal = hydration.goal_completion(self.sips, now_ms, self.hyd_cfg)
            return {
                "snapshot": {
                    "ts": snap.ts,
                    "level_pct": snap.level_pct,
                    "consumed_ml": snap.consumed_ml,
                    "expected_ml": snap.expected_ml,
                    "goal_ml": snap.goal_ml,
                    "band": snap.band.name,
                    "tier": snap.tier,
                },
                "goal_completion": {"consumed_ml": consumed, "goal_ml": goal},
                "last_sip_ts": self.last_sip_ts,
                "pending_message": self.pending_message,
            }

    def history(self, granularity: str, now_ms: int) -> eventlog.HistorySeries:
        with self.lock:
            events, _ = eventlog.read_log(self.log.path)
            return eventlog.history_series(events, granularity, now_ms,
                                           self.hyd_cfg.utc_offset_min)

    def record_historical_view(self, granularity: str, now_ms: int):
        with self.lock:
            self.log.append(now_ms, eventlog.HISTORICAL_VIEW, granularity=granularity)
            self.new_event.notify_all()

    def update_prefs(self, now_ms: int, daily_goal_ml=None,
                     preferred_interval_min=None, active_start_min=None,
                     active_end_min=None) -> dict:
        with self.lock:
            hyd = self.hyd_cfg
            if daily_goal_ml is not None:
                hyd = replace(hyd, daily_goal_ml=float(daily_goal_ml))
            if active_start_min is not None:
                hyd = replace(hyd, active_start_min=int(active_start_min))
            if active_end_min is not None:
                hyd = replace(hyd, active_end_min=int(active_end_min))
            hyd.__post_init__()  # re-validate combined window
            sched = self.sched_cfg
            if preferred_interval_min is not None:
                sched = replace(sched, preferred_interval_min=int(preferred_interval_min))
            self.hyd_cfg, self.sched_cfg = hyd, sched
            self.log.append(
                now_ms, eventlog.PREF_CHANGE,
                daily_goal_ml=self.hyd_cfg.daily_goal_ml,
                preferred_interval_min=self.sched_cfg.preferred_interval_min,
                active_start_min=self.hyd_cfg.active_start_min,
                active_end_min=self.hyd_cfg.active_end_min,
            )
            self.new_event.notify_all()
            return {"daily_goal_ml": self.hyd_cfg.daily_goal_ml,
                    "preferred_interval_min": self.sched_cfg.preferred_interval_min,
                    "active_start_min": self.hyd_cfg.active_start_min,
                    "active_end_min": self.hyd_cfg.active_end_min}

    def events_since(self, cursor: int, wait_s: float = 0.0) -> list[eventlog.LoggedEvent]:
        """Incremental feed: events with seq > cursor, long-polling up to
        wait_s when none are available yet."""
        deadline = wait_s
        with self.lock:
            events, _ = eventlog.read_log(self.log.path)
            fresh = [ev for ev in events if ev.seq > cursor]
            if not fresh and deadline > 0 and self.running:
                self.new_event.wait(timeout=deadline)
                events, _ = eventlog.read_log(self.log.path)
                fresh = [ev for ev in events if ev.seq > cursor]
            return fresh

    def stop(self):
        with self.lock:
            self.running = False
            self.new_event.notify_all()
