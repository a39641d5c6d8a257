/**
 * Map grid view-model: the W x H cell layout of one feature map, each cell
 * with its representative keyframe (first member) and full member list.
 */

import type { MapExport } from "./types.js";

export interface GridCell {
  unit: number;
  x: number;
  y: number;
  representative: string | null;
  members: string[];
}

export interface GridViewModel {
  id: string;
  title: string;
  width: number;
  height: number;
  cells: GridCell[];
}

export function buildGridViewModel(map: MapExport): GridViewModel {
  const cells: GridCell[] = map.cells.map((members, unit) => ({
    unit,
    x: unit % map.width,
    y: Math.floor(unit / map.width),
    representative: members[0] ?? null,
    members: [...members],
  }));
  if (cells.length !== map.width * map.height) {
    throw new Error(
      `map ${map.id}: expected ${map.width * map.height} cells, got ${cells.length}`,
    );
  }
  return { id: map.id, title: map.title, width: map.width, height: map.height, cells };
}

export function occupiedCellCount(grid: GridViewModel): number {
  return grid.cells.filter((c) => c.members.length > 0).length;
}
