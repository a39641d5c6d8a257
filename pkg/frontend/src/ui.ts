/** Small DOM helpers shared by the operator app and the spectator page. */

import { paletteCss } from "./palette.js";
import type { ResultSetPayload } from "./types.js";

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

/** A keyframe stand-in: its 3x3 spatial color grid as a patch. */
export function keyframePatch(grid: number[] | null, title = ""): HTMLElement {
  const patch = el("div", { class: "patch", title });
  if (grid === null) {
    patch.classList.add("patch-unknown");
    return patch;
  }
  for (const palette of grid) {
    const cell = el("div", { class: "patch-cell" });
    cell.style.background = paletteCss(palette);
    patch.append(cell);
  }
  return patch;
}

export function resultList(
  results: ResultSetPayload,
  actions: {
    onOpen?: (keyframeId: string) => void;
    onSimilar?: (keyframeId: string) => void;
  },
  patchFor: (keyframeId: string, container: HTMLElement) => void,
): HTMLElement {
  const list = el("div", { class: "result-list" });
  const header = el(
    "div",
    { class: "result-header" },
    `${results.feature} — ${results.entries.length} results`,
  );
  list.append(header);
  for (const entry of results.entries) {
    const patchSlot = el("div", { class: "patch-slot" });
    patchFor(entry.keyframe, patchSlot);
    const row = el(
      "div",
      { class: "result-row" },
      patchSlot,
      el("span", { class: "result-id" }, entry.keyframe),
      el("span", { class: "result-score" }, entry.score.toFixed(3)),
    );
    if (actions.onOpen) {
      const open = el("button", { class: "mini" }, "shots");
      open.addEventListener("click", () => actions.onOpen?.(entry.keyframe));
      row.append(open);
    }
    if (actions.onSimilar) {
      const similar = el("button", { class: "mini" }, "similar");
      similar.addEventListener("click", () => actions.onSimilar?.(entry.keyframe));
      row.append(similar);
    }
    list.append(row);
  }
  return list;
}

export interface ToastAction {
  label: string;
  run: () => void;
}

export class ToastArea {
  constructor(private readonly container: HTMLElement) {}

  show(text: string, kind: "info" | "good" | "bad" = "info", action?: ToastAction): void {
    const toast = el("div", { class: `toast toast-${kind}` }, text);
    if (action) {
      const button = el("button", { class: "mini" }, action.label);
      button.addEventListener("click", () => {
        action.run();
        toast.remove();
      });
      toast.append(button);
    }
    this.container.append(toast);
    setTimeout(() => toast.remove(), 6000);
  }
}

export function judgmentToastText(verdict: string, scoreDelta: number): string {
  const delta = scoreDelta > 0 ? ` (+${scoreDelta})` : scoreDelta < 0 ? ` (${scoreDelta})` : "";
  return `submission: ${verdict}${delta}`;
}
