import { describe, expect, it } from "vitest";

import { CollabClient, type SocketLike } from "../src/collab.js";
import type { CollabWireMessage } from "../src/types.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  closed = false;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  receive(frame: unknown): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

function connected(handlers = {}) {
  let socket!: FakeSocket;
  const client = new CollabClient(
    "ws://test/collab/team1",
    "team1",
    "alice",
    "expert",
    handlers,
    () => {
      socket = new FakeSocket();
      return socket;
    },
  );
  client.connect();
  socket.onopen?.();
  return { client, socket };
}

describe("CollabClient", () => {
  it("joins on open with the session's user and role", () => {
    const { socket } = connected();
    expect(JSON.parse(socket.sent[0]!)).toEqual({
      type: "join",
      session: "team1",
      user: "alice",
      role: "expert",
    });
  });

  it("increments seq by exactly one per position message", () => {
    const { client, socket } = connected();
    const first = client.sendPosition("concept:faces", 5);
    const second = client.sendPosition("concept:faces", 9);
    expect(first).toMatchObject({ seq: 1, cell: 5 });
    expect(second).toMatchObject({ seq: 2, cell: 9 });
    expect(socket.sent).toHaveLength(3); // join + 2 positions
    expect(client.sentPositions).toBe(2);
  });

  it("emits hint messages without a to-field when broadcasting", () => {
    const { client, socket } = connected();
    client.sendHint("v03", 4, "check this");
    const wire = JSON.parse(socket.sent.at(-1)!) as Record<string, unknown>;
    expect(wire).toEqual({
      type: "hint",
      session: "team1",
      user: "alice",
      video: "v03",
      shot: 4,
      note: "check this",
    });
    expect("to" in wire).toBe(false);
  });

  it("dispatches acks, events and errors to handlers", () => {
    const acks: [string, number][] = [];
    const events: CollabWireMessage[] = [];
    const errors: string[] = [];
    const { socket } = connected({
      onAck: (effect: string, revision: number) => acks.push([effect, revision]),
      onEvent: (message: CollabWireMessage) => events.push(message),
      onError: (error: string) => errors.push(error),
    });
    socket.receive({ kind: "ack", effect: "applied", revision: 1 });
    socket.receive({
      kind: "event",
      message: { type: "leave", session: "team1", user: "bob" },
      revision: 2,
    });
    socket.receive({ kind: "error", error: "MalformedWire", detail: "bad" });
    expect(acks).toEqual([["applied", 1]]);
    expect(events).toEqual([{ type: "leave", session: "team1", user: "bob" }]);
    expect(errors).toEqual(["MalformedWire"]);
  });

  it("sends leave and closes on leave()", () => {
    const { client, socket } = connected();
    client.leave();
    expect(JSON.parse(socket.sent.at(-1)!)).toEqual({
      type: "leave",
      session: "team1",
      user: "alice",
    });
    expect(socket.closed).toBe(true);
  });
});
