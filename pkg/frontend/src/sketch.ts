/**
 * 3x3 color sketch editor model. Cells are palette indices or unset; the
 * request payload contains exactly the set cells (unset cells are omitted,
 * never sent as null).
 */

export class SketchModel {
  private cells: (number | null)[] = Array(9).fill(null);

  set(cell: number, palette: number): void {
    if (cell < 0 || cell > 8) throw new Error(`cell out of range: ${cell}`);
    if (palette < 0 || palette > 11) throw new Error(`palette index out of range: ${palette}`);
    this.cells[cell] = palette;
  }

  unset(cell: number): void {
    this.cells[cell] = null;
  }

  /** Cycle: unset -> palette 0 -> 1 -> ... -> 11 -> unset. */
  cycle(cell: number): number | null {
    const current = this.cells[cell] ?? null;
    const next = current === null ? 0 : current === 11 ? null : current + 1;
    this.cells[cell] = next;
    return next;
  }

  get(cell: number): number | null {
    return this.cells[cell] ?? null;
  }

  clear(): void {
    this.cells = Array(9).fill(null);
  }

  setCount(): number {
    return this.cells.filter((c) => c !== null).length;
  }

  /** The exact wire format of the sketch endpoint. */
  payload(): Record<string, number> {
    const out: Record<string, number> = {};
    this.cells.forEach((palette, cell) => {
      if (palette !== null) out[String(cell)] = palette;
    });
    return out;
  }
}
