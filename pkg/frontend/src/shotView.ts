/**
 * Shot view model: the storyboard strip of one video and the keyframe
 * slideshow that stands in for real playback. Speed scales the slide
 * interval: 2x shows each keyframe for half as long.
 */

import type { ShotInfo, ShotViewPayload } from "./types.js";

export const PLAYBACK_SPEEDS = [0.5, 1, 2, 4] as const;
export type PlaybackSpeed = (typeof PLAYBACK_SPEEDS)[number];

export const BASE_SLIDE_INTERVAL_MS = 800;

export function slideIntervalMs(speed: PlaybackSpeed, baseMs = BASE_SLIDE_INTERVAL_MS): number {
  return baseMs / speed;
}

export interface SubmissionDraft {
  video: string;
  shotIndex: number;
  timestampSec: number;
}

export function submissionForShot(payload: ShotViewPayload, shot: ShotInfo): SubmissionDraft {
  return {
    video: payload.video,
    shotIndex: shot.index,
    timestampSec: shot.keyframe.timestamp_s,
  };
}

/** Cyclic keyframe slideshow over the shots of one video. */
export class Slideshow {
  private index = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  speed: PlaybackSpeed = 1;

  constructor(
    private readonly shotCount: number,
    private readonly onFrame: (shotIndex: number) => void,
  ) {}

  get position(): number {
    return this.index;
  }

  get playing(): boolean {
    return this.timer !== null;
  }

  play(): void {
    if (this.timer !== null || this.shotCount === 0) return;
    this.timer = setInterval(() => this.step(), slideIntervalMs(this.speed));
  }

  pause(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  setSpeed(speed: PlaybackSpeed): void {
    this.speed = speed;
    if (this.playing) {
      this.pause();
      this.play();
    }
  }

  seek(shotIndex: number): void {
    this.index = Math.max(0, Math.min(this.shotCount - 1, shotIndex));
    this.onFrame(this.index);
  }

  step(): void {
    this.index = (this.index + 1) % this.shotCount;
    this.onFrame(this.index);
  }
}
