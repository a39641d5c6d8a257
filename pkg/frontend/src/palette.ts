/** The engine's fixed 12-color palette; indices must match the server. */

export const PALETTE: { name: string; rgb: [number, number, number] }[] = [
  { name: "black", rgb: [0, 0, 0] },
  { name: "white", rgb: [255, 255, 255] },
  { name: "gray", rgb: [128, 128, 128] },
  { name: "red", rgb: [220, 40, 40] },
  { name: "orange", rgb: [240, 140, 30] },
  { name: "yellow", rgb: [240, 220, 40] },
  { name: "green", rgb: [40, 160, 60] },
  { name: "cyan", rgb: [40, 200, 200] },
  { name: "blue", rgb: [40, 70, 220] },
  { name: "purple", rgb: [140, 60, 180] },
  { name: "pink", rgb: [240, 150, 190] },
  { name: "brown", rgb: [130, 80, 40] },
];

export function paletteCss(index: number): string {
  const entry = PALETTE[index];
  if (!entry) return "transparent";
  const [r, g, b] = entry.rgb;
  return `rgb(${r}, ${g}, ${b})`;
}
