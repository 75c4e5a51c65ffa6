// Pure view state and its reducers; no DOM access here so tests can run
// headless.  Feed events are applied idempotently by sequence number: the
// cursor only moves forward and replaying the feed yields the same state.

import type { FeedEvent, SeriesPoint, StatePayload, Granularity } from "./api.js";

// Mirrors the engine's default rotation; shown when a notification event
// arrives through the feed.
export const PROMPT_MESSAGES = [
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
];

export interface Toast {
  message: string;
  levelPct: number;
  seq: number;
}

export interface ViewModel {
  levelPct: number;
  consumedMl: number;
  goalMl: number;
  band: string;
  tier: number;
  lastSipTs: number | null;
  cursor: number; // highest feed seq applied
  toast: Toast | null;
  granularity: Granularity;
  series: SeriesPoint[];
  stale: boolean; // engine unreachable
}

export function initialViewModel(): ViewModel {
  return {
    levelPct: 0,
    consumedMl: 0,
    goalMl: 0,
    band: "LOW",
    tier: 4,
    lastSipTs: null,
    cursor: -1,
    toast: null,
    granularity: "day",
    series: [],
    stale: false,
  };
}

export function applyState(vm: ViewModel, state: StatePayload): ViewModel {
  return {
    ...vm,
    levelPct: state.snapshot.level_pct,
    consumedMl: state.goal_completion.consumed_ml,
    goalMl: state.goal_completion.goal_ml,
    band: state.snapshot.band,
    tier: state.snapshot.tier,
    lastSipTs: state.last_sip_ts,
    stale: false,
  };
}

export function applyFeedEvent(vm: ViewModel, event: FeedEvent): ViewModel {
  if (event.seq <= vm.cursor) {
    return vm; // duplicate delivery; idempotent by seq
  }
  let next: ViewModel = { ...vm, cursor: event.seq };
  if (event.kind === "TIER_CHANGE") {
    next.tier = parseInt(event.payload["new"] ?? `${vm.tier}`, 10);
  } else if (event.kind === "NOTIFICATION") {
    const index = parseInt(event.payload["message_index"] ?? "0", 10);
    next.toast = {
      message: PROMPT_MESSAGES[index % PROMPT_MESSAGES.length],
      levelPct: parseFloat(event.payload["level_pct"] ?? "0"),
      seq: event.seq,
    };
  }
  return next;
}

export function applyFeed(vm: ViewModel, events: FeedEvent[]): ViewModel {
  return events.reduce(applyFeedEvent, vm);
}

export function dismissToast(vm: ViewModel): ViewModel {
  return { ...vm, toast: null };
}

export function markStale(vm: ViewModel): ViewModel {
  return { ...vm, stale: true };
}

// The five fixed "wallpaper" artworks, keyed by feedback tier
// (0 = fully hydrated .. 4 = depleted).  Placeholder gradients; the legend
// documents the intent.
export const TIER_ARTWORKS = [
  { name: "lush", css: "linear-gradient(160deg, #0e7a3d, #57c785)" },
  { name: "fresh", css: "linear-gradient(160deg, #2a8f6b, #9bd4a2)" },
  { name: "fading", css: "linear-gradient(160deg, #9c8a3a, #d8c878)" },
  { name: "parched", css: "linear-gradient(160deg, #a85f2a, #d9a06b)" },
  { name: "barren", css: "linear-gradient(160deg, #6e2f2f, #a86f5f)" },
] as const;

export function tierArtwork(tier: number): (typeof TIER_ARTWORKS)[number] {
  const clamped = Math.min(4, Math.max(0, tier | 0));
  return TIER_ARTWORKS[clamped];
}

export function validatePrefsForm(form: {
  dailyGoalMl: string;
  intervalMin: string;
}): { ok: true; daily_goal_ml: number; preferred_interval_min: number } | { ok: false; error: string } {
  const goal = Number(form.dailyGoalMl);
  const interval = Number(form.intervalMin);
  if (!Number.isFinite(goal) || goal <= 0) {
    return { ok: false, error: "daily goal must be a positive number of mL" };
  }
  if (!Number.isInteger(interval) || interval <= 0) {
    return { ok: false, error: "prompt interval must be a positive whole number of minutes" };
  }
  return { ok: true, daily_goal_ml: goal, preferred_interval_min: interval };
}
