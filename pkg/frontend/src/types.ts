/** Payload types of the gateway API (mirrors the server's JSON shapes). */

export interface HealthInfo {
  status: string;
  videos: number;
  keyframes: number;
  maps: number;
  tasks: number;
}

export interface MapSummary {
  id: string;
  title: string;
  kind: "color" | "concept";
  concept_label: string | null;
  members: number;
}

export interface MapExport {
  id: string;
  title: string;
  kind: "color" | "concept";
  concept_label: string | null;
  width: number;
  height: number;
  cells: string[][];
  weights?: number[][];
}

export interface KeyframeInfo {
  id: string;
  video: string;
  shot_index: number;
  timestamp_s: number;
  spatial_grid: number[] | null;
  concepts: Record<string, number>;
}

export interface ShotInfo {
  index: number;
  start_frame: number;
  end_frame: number;
  keyframe: KeyframeInfo;
}

export interface ShotViewPayload {
  video: string;
  shots: ShotInfo[];
}

export interface ResultEntry {
  keyframe: string;
  score: number;
}

export interface ResultSetPayload {
  feature: string;
  parameters: Record<string, string>;
  issued_at_ms: number;
  entries: ResultEntry[];
}

export interface TaskInfo {
  id: string;
  type: "kis_visual" | "kis_textual" | "avs";
  duration_sec: number;
  prompt: string;
  target?: { video: string; start_sec: number; end_sec: number };
  relevant?: { video: string; shot_index: number }[];
}

export interface JudgmentPayload {
  verdict: "correct" | "wrong" | "duplicate" | "too_late";
  score_delta: number;
}

export interface UsageRow {
  role: string;
  task_type: string;
  feature: string;
  count: number;
}

export interface SpectatorUser {
  role: string;
  map: string | null;
  cell: number | null;
}

export interface HintPayload {
  user: string;
  to: string | null;
  video: string;
  shot: number;
  note: string;
}

export interface SpectatorSnapshot {
  session: string;
  revision: number;
  users: Record<string, SpectatorUser>;
  hints: HintPayload[];
}

export type CollabWireMessage =
  | { type: "join"; session: string; user: string; role: "expert" | "novice" }
  | { type: "leave"; session: string; user: string }
  | { type: "position"; session: string; user: string; map: string; cell: number; seq: number }
  | {
      type: "hint";
      session: string;
      user: string;
      to?: string;
      video: string;
      shot: number;
      note: string;
    };

export type CollabServerFrame =
  | { kind: "ack"; effect: string; revision: number }
  | { kind: "event"; message: CollabWireMessage; revision: number }
  | { kind: "error"; error: string; detail: string };
