// Dashboard wiring: one UI loop, one in-flight poll, cursor persisted in
// localStorage so reloads resume the feed without duplicates.

import { EngineClient, type Granularity } from "./api.js";
import { renderBars } from "./chart.js";
import {
  applyFeed,
  applyState,
  dismissToast,
  initialViewModel,
  markStale,
  tierArtwork,
  validatePrefsForm,
  type ViewModel,
} from "./viewmodel.js";

const ENGINE_URL =
  new URLSearchParams(location.search).get("engine") ?? "http://127.0.0.1:8787";
const CURSOR_KEY = `hydrotrack-cursor:${ENGINE_URL}`;
const TOAST_MS = 10_000;
const POLL_WAIT_S = 20;
const STATE_REFRESH_MS = 15_000;

const client = new EngineClient(ENGINE_URL);
let vm: ViewModel = initialViewModel();
vm = { ...vm, cursor: Number(localStorage.getItem(CURSOR_KEY) ?? "-1") };
let toastTimer: number | undefined;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function render(): void {
  const art = tierArtwork(vm.tier);
  document.body.style.background = art.css;
  $("tier-name").textContent = `tier ${vm.tier} - ${art.name}`;

  $("gauge-level").textContent = `${vm.levelPct.toFixed(0)}%`;
  ($("gauge-fill") as HTMLElement).style.height = `${Math.min(100, vm.levelPct)}%`;
  $("goal-text").textContent =
    `${vm.consumedMl.toFixed(0)} of ${vm.goalMl.toFixed(0)} mL`;
  $("band-text").textContent = vm.band;
  $("stale-badge").hidden = !vm.stale;

  const toast = $("toast");
  if (vm.toast) {
    toast.hidden = false;
    $("toast-message").textContent = vm.toast.message;
    $("toast-level").textContent = `${vm.toast.levelPct.toFixed(0)}%`;
  } else {
    toast.hidden = true;
  }
}

function setViewModel(next: ViewModel): void {
  const hadToast = vm.toast?.seq;
  vm = next;
  localStorage.setItem(CURSOR_KEY, String(vm.cursor));
  if (vm.toast && vm.toast.seq !== hadToast) {
    window.clearTimeout(toastTimer);
    toastTimer = window.setTimeout(() => {
      setViewModel(dismissToast(vm));
      render();
    }, TOAST_MS);
  }
  render();
}

async function refreshState(): Promise<void> {
  try {
    setViewModel(applyState(vm, await client.getState()));
  } catch {
    setViewModel(markStale(vm));
  }
}

async function pollLoop(): Promise<void> {
  let backoffMs = 1_000;
  for (;;) {
    try {
      const events = await client.getEvents(vm.cursor, POLL_WAIT_S);
      setViewModel(applyFeed(vm, events));
      if (events.some((e) => e.kind === "SIP" || e.kind === "TIER_CHANGE")) {
        await refreshState();
      }
      backoffMs = 1_000;
    } catch {
      setViewModel(markStale(vm));
      await new Promise((r) => setTimeout(r, backoffMs));
      backoffMs = Math.min(backoffMs * 2, 30_000);
    }
  }
}

async function openHistory(granularity: Granularity): Promise<void> {
  try {
    const points = await client.getHistory(granularity);
    renderBars($("history-chart"), points);
    // every successful open is reported so it counts as an interaction
    await client.reportHistoricalView(granularity);
    vm = { ...vm, granularity, series: points };
  } catch {
    $("history-chart").textContent = "history unavailable";
  }
}

function wireForms(): void {
  for (const gran of ["week", "day", "sips"] as Granularity[]) {
    $(`history-${gran}`).addEventListener("click", () => void openHistory(gran));
  }
  $("prefs-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const parsed = validatePrefsForm({
      dailyGoalMl: ($("pref-goal") as HTMLInputElement).value,
      intervalMin: ($("pref-interval") as HTMLInputElement).value,
    });
    const errorEl = $("prefs-error");
    if (!parsed.ok) {
      errorEl.textContent = parsed.error;
      return;
    }
    errorEl.textContent = "";
    client
      .updatePrefs({
        daily_goal_ml: parsed.daily_goal_ml,
        preferred_interval_min: parsed.preferred_interval_min,
      })
      .then(refreshState)
      .catch((err) => {
        errorEl.textContent = String(err);
      });
  });
  $("toast-dismiss").addEventListener("click", () => setViewModel(dismissToast(vm)));
}

wireForms();
render();
void refreshState();
void pollLoop();
window.setInterval(() => void refreshState(), STATE_REFRESH_MS);
