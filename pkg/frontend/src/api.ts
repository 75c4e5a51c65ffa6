// Typed client for the engine's HTTP API.

export interface SnapshotPayload {
  ts: number;
  level_pct: number;
  consumed_ml: number;
  expected_ml: number;
  goal_ml: number;
  band: "LOW" | "MID" | "HIGH";
  tier: number;
}

export interface StatePayload {
  snapshot: SnapshotPayload;
  goal_completion: { consumed_ml: number; goal_ml: number };
  last_sip_ts: number | null;
  pending_message: string | null;
}

export interface FeedEvent {
  seq: number;
  ts: number;
  kind: string;
  payload: Record<string, string>;
}

export interface SeriesPoint {
  label: string;
  total_ml: number;
}

export type Granularity = "week" | "day" | "sips";

export interface PrefsUpdate {
  daily_goal_ml?: number;
  preferred_interval_min?: number;
  active_start_min?: number;
  active_end_min?: number;
}

export class EngineClient {
  constructor(readonly baseUrl: string) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) {
      const body = await resp.text();
      throw new Error(`engine ${resp.status}: ${body}`);
    }
    return (await resp.json()) as T;
  }

  getState(): Promise<StatePayload> {
    return this.json("/state");
  }

  async getEvents(sinceSeq: number, waitSeconds = 0): Promise<FeedEvent[]> {
    const body = await this.json<{ events: FeedEvent[] }>(
      `/events?since=${sinceSeq}&wait=${waitSeconds}`,
    );
    return body.events;
  }

  async getHistory(granularity: Granularity): Promise<SeriesPoint[]> {
    const body = await this.json<{ points: SeriesPoint[] }>(
      `/history?granularity=${granularity}`,
    );
    return body.points;
  }

  reportHistoricalView(granularity: Granularity): Promise<{ logged: boolean }> {
    return this.json("/interactions/historical", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ granularity }),
    });
  }

  updatePrefs(update: PrefsUpdate): Promise<Record<string, number>> {
    return this.json("/prefs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(update),
    });
  }
}
