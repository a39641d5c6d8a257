/**
 * UI view state. A plain observable store: views mutate it through the
 * setters (which keep the selection invariants) and re-render on change.
 */

export type ActiveView = "mapBrowser" | "shotView" | "searchResults" | "similarityTab" | "spectator";

export interface ViewState {
  activeView: ActiveView;
  selectedMapId: string | null;
  selectedCell: number | null;
  selectedVideoId: string | null;
  historyDepth: number;
}

type Listener = (state: ViewState) => void;

export class ViewStateStore {
  private state: ViewState = {
    activeView: "mapBrowser",
    selectedMapId: null,
    selectedCell: null,
    selectedVideoId: null,
    historyDepth: 0,
  };
  private listeners: Listener[] = [];

  get(): ViewState {
    return { ...this.state };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.get());
  }

  showView(view: ActiveView): void {
    this.state.activeView = view;
    this.emit();
  }

  selectMap(mapId: string | null): void {
    this.state.selectedMapId = mapId;
    this.state.selectedCell = null; // a cell only makes sense within a map
    this.emit();
  }

  selectCell(cell: number): void {
    if (this.state.selectedMapId === null) {
      throw new Error("cannot select a cell without a selected map");
    }
    this.state.selectedCell = cell;
    this.emit();
  }

  selectVideo(videoId: string | null): void {
    this.state.selectedVideoId = videoId;
    this.emit();
  }

  pushedResult(): void {
    this.state.historyDepth += 1;
    this.emit();
  }

  wentBack(): void {
    this.state.historyDepth = Math.max(0, this.state.historyDepth - 1);
    this.emit();
  }
}
