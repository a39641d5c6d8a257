/**
 * Collaboration socket client. Keeps the local per-user sequence counter
 * (monotonic, incremented on every position sent) and dispatches incoming
 * broadcast events and acks to handlers in arrival order.
 */

import type { CollabServerFrame, CollabWireMessage } from "./types.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((event: { data: unknown }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface CollabHandlers {
  onAck?: (effect: string, revision: number) => void;
  onEvent?: (message: CollabWireMessage, revision: number) => void;
  onError?: (error: string, detail: string) => void;
  onOpen?: () => void;
  onClose?: () => void;
}

export class CollabClient {
  private socket: SocketLike | null = null;
  private seq = 0;
  sentPositions = 0;

  constructor(
    private readonly url: string,
    readonly session: string,
    readonly user: string,
    readonly role: "expert" | "novice",
    private readonly handlers: CollabHandlers = {},
    private readonly socketFactory: SocketFactory = (u) =>
      new WebSocket(u) as unknown as SocketLike,
  ) {}

  get nextSeq(): number {
    return this.seq + 1;
  }

  connect(): void {
    const socket = this.socketFactory(this.url);
    socket.onopen = () => {
      this.send({ type: "join", session: this.session, user: this.user, role: this.role });
      this.handlers.onOpen?.();
    };
    socket.onmessage = (event) => {
      const frame = JSON.parse(String(event.data)) as CollabServerFrame;
      if (frame.kind === "ack") this.handlers.onAck?.(frame.effect, frame.revision);
      else if (frame.kind === "event") this.handlers.onEvent?.(frame.message, frame.revision);
      else this.handlers.onError?.(frame.error, frame.detail);
    };
    socket.onclose = () => this.handlers.onClose?.();
    this.socket = socket;
  }

  private send(message: CollabWireMessage): void {
    if (!this.socket) throw new Error("collab socket is not connected");
    this.socket.send(JSON.stringify(message));
  }

  /** One position message per call, seq = previous + 1. */
  sendPosition(mapId: string, cell: number): CollabWireMessage {
    this.seq += 1;
    this.sentPositions += 1;
    const message: CollabWireMessage = {
      type: "position",
      session: this.session,
      user: this.user,
      map: mapId,
      cell,
      seq: this.seq,
    };
    this.send(message);
    return message;
  }

  sendHint(video: string, shot: number, note: string, to?: string): CollabWireMessage {
    const message: CollabWireMessage = {
      type: "hint",
      session: this.session,
      user: this.user,
      video,
      shot,
      note,
      ...(to === undefined ? {} : { to }),
    };
    this.send(message);
    return message;
  }

  leave(): void {
    if (!this.socket) return;
    this.send({ type: "leave", session: this.session, user: this.user });
    this.socket.close();
    this.socket = null;
  }
}
