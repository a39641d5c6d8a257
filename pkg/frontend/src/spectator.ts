/**
 * Spectator polling model: fetch snapshots on an interval but only trigger a
 * re-render when the revision actually moved.
 */

import type { SpectatorSnapshot } from "./types.js";

export class SpectatorModel {
  private lastRevision = -1;
  renders = 0;

  constructor(private readonly onChange: (snapshot: SpectatorSnapshot) => void) {}

  /** Returns true when the snapshot was new and a render was triggered. */
  offer(snapshot: SpectatorSnapshot): boolean {
    if (snapshot.revision === this.lastRevision) return false;
    this.lastRevision = snapshot.revision;
    this.renders += 1;
    this.onChange(snapshot);
    return true;
  }
}

export interface PresenceMarker {
  user: string;
  role: string;
  cell: number;
}

/** Markers to draw on a given map: every user positioned on that map. */
export function presenceMarkers(
  snapshot: SpectatorSnapshot,
  mapId: string,
  exceptUser?: string,
): PresenceMarker[] {
  const markers: PresenceMarker[] = [];
  for (const [user, info] of Object.entries(snapshot.users)) {
    if (user === exceptUser) continue;
    if (info.map === mapId && info.cell !== null) {
      markers.push({ user, role: info.role, cell: info.cell });
    }
  }
  markers.sort((a, b) => (a.user < b.user ? -1 : a.user > b.user ? 1 : 0));
  return markers;
}
