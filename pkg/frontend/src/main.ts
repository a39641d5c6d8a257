/** Operator app: map browser, shot view, searches, collaboration, submits. */

import { ApiClient } from "./api.js";
import { CollabClient } from "./collab.js";
import { buildGridViewModel, type GridViewModel } from "./mapGrid.js";
import { PALETTE, paletteCss } from "./palette.js";
import { SketchModel } from "./sketch.js";
import { PLAYBACK_SPEEDS, Slideshow, submissionForShot, type PlaybackSpeed } from "./shotView.js";
import { SpectatorModel, presenceMarkers } from "./spectator.js";
import { ViewStateStore } from "./state.js";
import { el, judgmentToastText, keyframePatch, resultList, ToastArea } from "./ui.js";
import type {
  KeyframeInfo,
  MapSummary,
  ResultSetPayload,
  ShotViewPayload,
  SpectatorSnapshot,
} from "./types.js";

const $ = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
};

class App {
  api = new ApiClient(location.origin);
  state = new ViewStateStore();
  toast = new ToastArea($("toasts"));
  session: string | null = null;
  collab: CollabClient | null = null;
  activeTaskId: string | null = null;
  currentGrid: GridViewModel | null = null;
  currentShots: ShotViewPayload | null = null;
  currentResults: ResultSetPayload | null = null;
  slideshow: Slideshow | null = null;
  lastSnapshot: SpectatorSnapshot | null = null;
  sketch = new SketchModel();
  private keyframeCache = new Map<string, Promise<KeyframeInfo>>();

  keyframeInfo(id: string): Promise<KeyframeInfo> {
    let cached = this.keyframeCache.get(id);
    if (!cached) {
      cached = this.api.keyframe(id);
      this.keyframeCache.set(id, cached);
    }
    return cached;
  }

  patchInto(keyframeId: string, container: HTMLElement): void {
    this.keyframeInfo(keyframeId).then(
      (info) => container.replaceChildren(keyframePatch(info.spatial_grid, keyframeId)),
      () => container.replaceChildren(keyframePatch(null, keyframeId)),
    );
  }

  // -- connection -----------------------------------------------------------

  async connect(user: string, role: "expert" | "novice", team: string): Promise<void> {
    this.session = await this.api.createSession(user, role);
    const collab = new CollabClient(this.api.collabUrl(team), team, user, role, {
      onEvent: (message) => {
        if (message.type === "hint") {
          this.toast.show(`hint from ${message.user}: ${message.video}/${message.shot} — ${message.note}`,
            "info",
            { label: "jump", run: () => void this.openShotView(message.video) });
        }
        if (message.type === "position" || message.type === "join" || message.type === "leave") {
          void this.refreshPresence();
        }
      },
      onError: (error, detail) => this.toast.show(`${error}: ${detail}`, "bad"),
    });
    collab.connect();
    this.collab = collab;
    $("who").textContent = `${user} (${role}) in ${team}`;
    (document.getElementById("connect-form") as HTMLElement).hidden = true;
    ($("app") as HTMLElement).hidden = false;
    const spectatorLink = $("spectator-link") as unknown as HTMLAnchorElement;
    spectatorLink.href = `spectator.html?session=${encodeURIComponent(team)}`;
    await Promise.all([this.refreshHealth(), this.refreshMaps(""), this.refreshTasks()]);
    setInterval(() => void this.refreshPresence(), 1500);
  }

  async refreshHealth(): Promise<void> {
    const health = await this.api.health();
    $("health").textContent =
      `${health.videos} videos · ${health.keyframes} keyframes · ${health.maps} maps`;
  }

  // -- maps ------------------------------------------------------------------

  async refreshMaps(query: string): Promise<void> {
    const maps = query.trim()
      ? await this.api.listMaps(query, this.session ?? undefined)
      : await this.api.listMaps();
    const list = $("map-list");
    list.replaceChildren();
    $("map-count").textContent = `${maps.length} maps`;
    for (const map of maps) list.append(this.mapRow(map));
  }

  private mapRow(map: MapSummary): HTMLElement {
    const row = el(
      "div",
      { class: "map-row" },
      el("span", { class: "map-title" }, map.title),
      el("span", { class: "map-meta" }, `${map.kind} · ${map.members}`),
    );
    row.addEventListener("click", () => void this.openMap(map.id));
    return row;
  }

  async openMap(mapId: string): Promise<void> {
    const map = await this.api.getMap(mapId);
    this.currentGrid = buildGridViewModel(map);
    this.state.selectMap(mapId);
    this.state.showView("mapBrowser");
    if (this.activeTaskId && this.session) void this.api.recordUsage(this.session, "map_browsing");
    this.renderGrid();
  }

  renderGrid(): void {
    const grid = this.currentGrid;
    if (!grid) return;
    const host = $("map-grid");
    host.replaceChildren();
    host.style.gridTemplateColumns = `repeat(${grid.width}, 1fr)`;
    $("map-grid-title").textContent = `${grid.title} (${grid.width}x${grid.height})`;
    const markers = this.lastSnapshot
      ? presenceMarkers(this.lastSnapshot, grid.id, this.collab?.user)
      : [];
    for (const cell of grid.cells) {
      const cellNode = el("div", { class: "grid-cell" });
      if (cell.representative === null) {
        cellNode.classList.add("grid-cell-empty");
      } else {
        const slot = el("div", { class: "patch-slot" });
        this.patchInto(cell.representative, slot);
        cellNode.append(slot, el("span", { class: "cell-count" }, String(cell.members.length)));
      }
      for (const marker of markers.filter((m) => m.cell === cell.unit)) {
        cellNode.append(el("span", { class: "presence", title: marker.user }, marker.user[0] ?? "?"));
      }
      cellNode.addEventListener("click", () => this.clickCell(cell.unit));
      host.append(cellNode);
    }
  }

  clickCell(unit: number): void {
    const grid = this.currentGrid;
    if (!grid) return;
    this.state.selectCell(unit);
    this.collab?.sendPosition(grid.id, unit);
    const members = grid.cells[unit]?.members ?? [];
    const host = $("cell-members");
    host.replaceChildren(el("h3", {}, `cell ${unit} — ${members.length} keyframes`));
    for (const kfId of members) {
      const slot = el("div", { class: "patch-slot" });
      this.patchInto(kfId, slot);
      const row = el("div", { class: "result-row" }, slot, el("span", { class: "result-id" }, kfId));
      const open = el("button", { class: "mini" }, "shots");
      open.addEventListener("click", () => {
        void this.keyframeInfo(kfId).then((info) => this.openShotView(info.video));
      });
      const similar = el("button", { class: "mini" }, "similar");
      similar.addEventListener("click", () => void this.runSimilarity(kfId));
      row.append(open, similar);
      host.append(row);
    }
  }

  async refreshPresence(): Promise<void> {
    if (!this.collab) return;
    const snapshot = await this.api.spectator(this.collab.session);
    const changed = !this.lastSnapshot || this.lastSnapshot.revision !== snapshot.revision;
    this.lastSnapshot = snapshot;
    if (changed && this.state.get().activeView === "mapBrowser") this.renderGrid();
  }

  // -- shot view ---------------------------------------------------------------

  async openShotView(videoId: string): Promise<void> {
    this.currentShots = await this.api.videoShots(videoId);
    this.state.selectVideo(videoId);
    this.state.showView("shotView");
    if (this.activeTaskId && this.session) {
      void this.api.recordUsage(this.session, "video_inspection");
    }
    this.renderShotView();
  }

  renderShotView(): void {
    const payload = this.currentShots;
    if (!payload) return;
    $("shot-title").textContent = `${payload.video} — ${payload.shots.length} shots`;
    const strip = $("shot-strip");
    strip.replaceChildren();
    payload.shots.forEach((shot, i) => {
      const slot = el("div", { class: "patch-slot" });
      this.patchInto(shot.keyframe.id, slot);
      const tile = el(
        "div",
        { class: "shot-tile", id: `shot-${i}` },
        el("div", { class: "shot-boundary" }, `${shot.start_frame}–${shot.end_frame}`),
        slot,
        el("div", { class: "shot-ts" }, `#${shot.index} @${shot.keyframe.timestamp_s}s`),
      );
      const submit = el("button", { class: "mini submit" }, "submit this shot");
      submit.addEventListener("click", () => void this.submitShot(shot.index));
      tile.append(submit);
      strip.append(tile);
    });
    this.slideshow?.pause();
    this.slideshow = new Slideshow(payload.shots.length, (i) => this.highlightShot(i));
    this.highlightShot(0);
  }

  highlightShot(index: number): void {
    document.querySelectorAll(".shot-tile").forEach((node) => node.classList.remove("playing"));
    document.getElementById(`shot-${index}`)?.classList.add("playing");
  }

  async submitShot(shotIndex: number): Promise<void> {
    const payload = this.currentShots;
    if (!payload || !this.session) return;
    if (!this.activeTaskId) {
      this.toast.show("no active task — start one first", "bad");
      return;
    }
    const shot = payload.shots.find((s) => s.index === shotIndex);
    if (!shot) return;
    const draft = submissionForShot(payload, shot);
    const judgment = await this.api.submit(
      this.activeTaskId,
      this.session,
      draft.video,
      draft.shotIndex,
      draft.timestampSec,
    );
    this.toast.show(
      judgmentToastText(judgment.verdict, judgment.score_delta),
      judgment.verdict === "correct" ? "good" : "bad",
    );
  }

  // -- searches ----------------------------------------------------------------

  showResults(results: ResultSetPayload, view: "searchResults" | "similarityTab" = "searchResults"): void {
    this.currentResults = results;
    this.state.showView(view);
    if (view === "searchResults") this.state.pushedResult();
    const host = view === "searchResults" ? $("results") : $("similarity-results");
    host.replaceChildren(
      resultList(
        results,
        {
          onOpen: (kfId) => void this.keyframeInfo(kfId).then((info) => this.openShotView(info.video)),
          onSimilar: (kfId) => void this.runSimilarity(kfId),
        },
        (kfId, container) => this.patchInto(kfId, container),
      ),
    );
  }

  async runConceptSearch(query: string, theta: number): Promise<void> {
    if (!this.session) return;
    this.showResults(await this.api.conceptSearch(this.session, query, theta));
  }

  async runColorSearch(colors: number[]): Promise<void> {
    if (!this.session) return;
    this.showResults(await this.api.colorSearch(this.session, colors));
  }

  async runSimilarity(probe: string): Promise<void> {
    if (!this.session) return;
    this.showResults(await this.api.similaritySearch(this.session, probe, 20), "similarityTab");
  }

  async runSketch(): Promise<void> {
    if (!this.session) return;
    const minMatch = Math.min(
      this.sketch.setCount(),
      Number((document.getElementById("sketch-min") as HTMLInputElement).value) || 1,
    );
    this.showResults(await this.api.sketchSearch(this.session, this.sketch.payload(), minMatch));
  }

  async goBack(): Promise<void> {
    if (!this.session) return;
    const previous = await this.api.historyBack(this.session);
    this.state.wentBack();
    if (previous) this.showResults(previous);
    else this.toast.show("history is empty", "info");
  }

  async openSimilarityTab(): Promise<void> {
    if (!this.session) return;
    const results = await this.api.similarityTab(this.session);
    if (results) this.showResults(results, "similarityTab");
    else {
      this.state.showView("similarityTab");
      $("similarity-results").replaceChildren(el("p", {}, "no similarity search yet"));
    }
  }

  // -- tasks ---------------------------------------------------------------------

  async refreshTasks(): Promise<void> {
    const body = await this.api.listTasks();
    this.activeTaskId = body.active;
    const select = $("task-select") as unknown as HTMLSelectElement;
    select.replaceChildren();
    for (const task of body.tasks) {
      select.append(el("option", { value: task.id }, `${task.id} (${task.type})`));
    }
    if (body.active) select.value = body.active;
    $("task-prompt").textContent =
      body.tasks.find((t) => t.id === select.value)?.prompt ?? "";
  }

  async startSelectedTask(): Promise<void> {
    const select = $("task-select") as unknown as HTMLSelectElement;
    if (!select.value) return;
    await this.api.startTask(select.value);
    this.activeTaskId = select.value;
    this.toast.show(`task ${select.value} started`, "info");
    await this.refreshTasks();
  }
}

function wire(): void {
  const app = new App();

  $("connect").addEventListener("click", () => {
    const user = ($("user") as HTMLInputElement).value.trim() || "anonymous";
    const role = (($("role") as HTMLSelectElement).value as "expert" | "novice") || "novice";
    const team = ($("team") as HTMLInputElement).value.trim() || "team1";
    void app.connect(user, role, team).catch((err) => app.toast.show(String(err), "bad"));
  });

  app.state.subscribe((state) => {
    for (const view of ["mapBrowser", "shotView", "searchResults", "similarityTab"] as const) {
      const panel = document.getElementById(`view-${view}`);
      if (panel) panel.hidden = state.activeView !== view;
    }
    $("history-depth").textContent = String(state.historyDepth);
  });

  $("map-search").addEventListener("input", (event) => {
    void app.refreshMaps((event.target as HTMLInputElement).value);
  });

  $("concept-go").addEventListener("click", () => {
    const query = ($("concept-query") as HTMLInputElement).value;
    const theta = Number(($("concept-theta") as HTMLInputElement).value) || 0.5;
    void app.runConceptSearch(query, theta).catch((err) => app.toast.show(String(err), "bad"));
  });

  const swatches = $("color-swatches");
  PALETTE.forEach((entry, index) => {
    const swatch = el("button", { class: "swatch", title: entry.name });
    swatch.style.background = paletteCss(index);
    swatch.addEventListener("click", () => swatch.classList.toggle("selected"));
    swatch.dataset.palette = String(index);
    swatches.append(swatch);
  });
  $("color-go").addEventListener("click", () => {
    const selected = [...swatches.querySelectorAll(".swatch.selected")].map((node) =>
      Number((node as HTMLElement).dataset.palette),
    );
    if (selected.length === 0) {
      app.toast.show("pick at least one color", "bad");
      return;
    }
    void app.runColorSearch(selected).catch((err) => app.toast.show(String(err), "bad"));
  });

  const sketchGrid = $("sketch-grid");
  for (let cell = 0; cell < 9; cell++) {
    const cellNode = el("button", { class: "sketch-cell" });
    cellNode.addEventListener("click", () => {
      const palette = app.sketch.cycle(cell);
      cellNode.style.background = palette === null ? "" : paletteCss(palette);
      cellNode.classList.toggle("set", palette !== null);
    });
    sketchGrid.append(cellNode);
  }
  $("sketch-go").addEventListener("click", () => {
    if (app.sketch.setCount() === 0) {
      app.toast.show("sketch is empty", "bad");
      return;
    }
    void app.runSketch().catch((err) => app.toast.show(String(err), "bad"));
  });

  $("history-back").addEventListener("click", () => void app.goBack());
  $("similarity-tab-button").addEventListener("click", () => void app.openSimilarityTab());
  $("task-start").addEventListener("click", () => void app.startSelectedTask());
  ($("task-select") as unknown as HTMLSelectElement).addEventListener("change", () =>
    void app.refreshTasks(),
  );

  for (const speed of PLAYBACK_SPEEDS) {
    const button = el("button", { class: "mini" }, `${speed}x`);
    button.addEventListener("click", () => {
      app.slideshow?.setSpeed(speed as PlaybackSpeed);
      app.slideshow?.play();
    });
    $("speed-buttons").append(button);
  }
  $("shot-pause").addEventListener("click", () => app.slideshow?.pause());
}

wire();
