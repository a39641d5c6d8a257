/**
 * Typed client for every gateway endpoint. The UI never re-ranks or
 * post-processes: whatever this client returns is what gets displayed.
 */

import type {
  HealthInfo,
  JudgmentPayload,
  KeyframeInfo,
  MapExport,
  MapSummary,
  ResultSetPayload,
  ShotViewPayload,
  SpectatorSnapshot,
  TaskInfo,
  UsageRow,
} from "./types.js";

type FetchLike = typeof fetch;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly errorName: string,
    detail: string,
  ) {
    super(`${errorName}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    public readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload.error ?? "HttpError", payload.detail ?? "");
    }
    return payload as T;
  }

  health(): Promise<HealthInfo> {
    return this.request("GET", "/health");
  }

  async createSession(user: string, role: "expert" | "novice"): Promise<string> {
    const body = await this.request<{ session: string }>("POST", "/sessions", { user, role });
    return body.session;
  }

  async listMaps(query?: string, session?: string): Promise<MapSummary[]> {
    const params = new URLSearchParams();
    if (query !== undefined) params.set("query", query);
    if (session !== undefined) params.set("session", session);
    const suffix = params.size > 0 ? `?${params}` : "";
    const body = await this.request<{ maps: MapSummary[] }>("GET", `/maps${suffix}`);
    return body.maps;
  }

  getMap(mapId: string, withWeights = false): Promise<MapExport> {
    const suffix = withWeights ? "?weights=true" : "";
    return this.request("GET", `/maps/${encodeURIComponent(mapId)}${suffix}`);
  }

  videoShots(videoId: string): Promise<ShotViewPayload> {
    return this.request("GET", `/videos/${encodeURIComponent(videoId)}/shots`);
  }

  keyframe(keyframeId: string): Promise<KeyframeInfo> {
    return this.request("GET", `/keyframes/${encodeURIComponent(keyframeId)}`);
  }

  conceptSearch(
    session: string,
    query: string,
    theta = 0.5,
    limit = 20,
  ): Promise<ResultSetPayload> {
    return this.request("POST", "/search/concept", { session, query, theta, limit });
  }

  colorSearch(
    session: string,
    colors: (number | string)[],
    coverageTheta = 0.15,
  ): Promise<ResultSetPayload> {
    return this.request("POST", "/search/color", {
      session,
      colors,
      coverage_theta: coverageTheta,
    });
  }

  similaritySearch(
    session: string,
    probe: string,
    k = 20,
    space: "color" | "concept" = "color",
  ): Promise<ResultSetPayload> {
    return this.request("POST", "/search/similarity", { session, probe, k, space });
  }

  sketchSearch(
    session: string,
    cells: Record<string, number>,
    minMatch: number,
  ): Promise<ResultSetPayload> {
    return this.request("POST", "/search/sketch", { session, cells, min_match: minMatch });
  }

  shotFilter(session: string, video: string): Promise<ResultSetPayload> {
    return this.request("POST", "/search/shot-filter", { session, video });
  }

  async historyBack(session: string): Promise<ResultSetPayload | null> {
    const body = await this.request<{ results: ResultSetPayload | null }>(
      "POST",
      "/history/back",
      { session },
    );
    return body.results;
  }

  async similarityTab(session: string): Promise<ResultSetPayload | null> {
    const body = await this.request<{ results: ResultSetPayload | null }>(
      "GET",
      `/similarity-tab?session=${encodeURIComponent(session)}`,
    );
    return body.results;
  }

  async listTasks(): Promise<{ tasks: TaskInfo[]; active: string | null }> {
    return this.request("GET", "/tasks");
  }

  startTask(taskId: string, at?: number): Promise<{ task: string; started_at: number }> {
    return this.request("POST", `/tasks/${encodeURIComponent(taskId)}/start`, {
      at: at ?? null,
    });
  }

  submit(
    taskId: string,
    session: string,
    video: string,
    shotIndex: number,
    timestampSec: number,
    atSec?: number,
  ): Promise<JudgmentPayload> {
    return this.request("POST", `/tasks/${encodeURIComponent(taskId)}/submit`, {
      session,
      video,
      shot_index: shotIndex,
      timestamp_sec: timestampSec,
      at_sec: atSec ?? null,
    });
  }

  recordUsage(session: string, feature: string): Promise<{ recorded: boolean }> {
    return this.request("POST", "/usage", { session, feature });
  }

  async usageReport(): Promise<UsageRow[]> {
    const body = await this.request<{ rows: UsageRow[] }>("GET", "/reports/usage");
    return body.rows;
  }

  spectator(sessionId: string): Promise<SpectatorSnapshot> {
    return this.request("GET", `/spectator/${encodeURIComponent(sessionId)}`);
  }

  collabUrl(sessionId: string): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/collab/${encodeURIComponent(sessionId)}`;
  }
}
