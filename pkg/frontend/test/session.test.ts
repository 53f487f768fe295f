import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ConsoleSession, SocketLike } from "../src/session.js";
import { decodeFrame, encodeFrame } from "../src/wire.js";

class MockSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.closed = true;
    this.onclose?.();
  }
  // test-side controls
  open(): void {
    this.onopen?.();
  }
  receive(text: string): void {
    this.onmessage?.({ data: text });
  }
  drop(): void {
    this.onclose?.();
  }
}

function makeStub() {
  const sockets: MockSocket[] = [];
  const createdAt: number[] = [];
  const factory = () => {
    const socket = new MockSocket();
    sockets.push(socket);
    createdAt.push(Date.now());
    return socket;
  };
  return { sockets, createdAt, factory };
}

function pubFrame(topic: string, payload: unknown, id = `srv_${Math.random()}`): string {
  return encodeFrame({ v: 1, kind: "pub", id, topic, ts: 0, payload });
}

describe("ConsoleSession", () => {
  beforeEach(() => {
    vi.useFakeTimers();
    vi.spyOn(console, "warn").mockImplementation(() => {});
  });
  afterEach(() => {
    vi.useRealTimers();
    vi.restoreAllMocks();
  });

  it("send_chat emits exactly one correct frame", () => {
    const stub = makeStub();
    const session = new ConsoleSession("ws://test/ws", {}, { socketFactory: stub.factory });
    session.connect();
    stub.sockets[0].open();
    session.sendChat("Navigate to the chair");

    expect(stub.sockets[0].sent).toHaveLength(1);
    const env = decodeFrame(stub.sockets[0].sent[0]);
    expect(env).not.toBeNull();
    expect(env!.kind).toBe("pub");
    expect(env!.topic).toBe("hri/in");
    expect(env!.corr).toBeUndefined();
    expect(env!.payload).toEqual({ text: "Navigate to the chair" });
    expect(session.framesSent).toBe(1);
  });

  it("relays nothing but operator chat frames", () => {
    const stub = makeStub();
    const session = new ConsoleSession("ws://test/ws", {}, { socketFactory: stub.factory });
    session.connect();
    stub.sockets[0].open();
    stub.sockets[0].receive(pubFrame("hri/out", { text: "hello" }));
    stub.sockets[0].receive(pubFrame("mission/status",
      { mission_id: "m1", prompt: "p", status: "executing", report: "" }));
    stub.sockets[0].receive(pubFrame("world/snapshot",
      { tick: 1, bounds: [0, 0, 4, 4], robot: { x: 1, y: 1, heading: 0 }, objects: [] }));
    session.sendChat("hi");
    expect(stub.sockets[0].sent).toHaveLength(1); // the chat line and nothing else
  });

  it("renders 100 injected hri/out frames exactly once, in order", () => {
    const stub = makeStub();
    const seen: string[] = [];
    const session = new ConsoleSession(
      "ws://test/ws",
      { onChat: (entry) => seen.push(entry.text) },
      { socketFactory: stub.factory },
    );
    session.connect();
    stub.sockets[0].open();
    for (let i = 0; i < 100; i++) {
      stub.sockets[0].receive(pubFrame("hri/out", { text: `msg ${i}` }, `id_${i}`));
    }
    expect(seen).toHaveLength(100);
    expect(seen).toEqual(Array.from({ length: 100 }, (_, i) => `msg ${i}`));
    expect(session.chatHistory).toHaveLength(100);
  });

  it("reconnects with 1/2/4/8s backoff, capped at 8s", () => {
    const stub = makeStub();
    const session = new ConsoleSession("ws://test/ws", {}, { socketFactory: stub.factory });
    session.connect();
    expect(stub.sockets).toHaveLength(1);

    // never opens; every attempt drops immediately
    for (let i = 0; i < 5; i++) {
      stub.sockets[stub.sockets.length - 1].drop();
      vi.runOnlyPendingTimers();
    }
    const deltas = stub.createdAt.slice(1).map((t, i) => t - stub.createdAt[i]);
    expect(deltas).toEqual([1000, 2000, 4000, 8000, 8000]);
  });

  it("a successful open resets the backoff schedule", () => {
    const stub = makeStub();
    const session = new ConsoleSession("ws://test/ws", {}, { socketFactory: stub.factory });
    session.connect();
    stub.sockets[0].drop();
    vi.runOnlyPendingTimers(); // +1000 -> socket 1
    stub.sockets[1].drop();
    vi.runOnlyPendingTimers(); // +2000 -> socket 2
    stub.sockets[2].open();
    stub.sockets[2].drop();
    vi.runOnlyPendingTimers(); // reset -> +1000 -> socket 3
    const deltas = stub.createdAt.slice(1).map((t, i) => t - stub.createdAt[i]);
    expect(deltas).toEqual([1000, 2000, 1000]);
  });

  it("shows a banner state while disconnected", () => {
    const stub = makeStub();
    const states: string[] = [];
    const session = new ConsoleSession(
      "ws://test/ws",
      { onState: (state) => states.push(state) },
      { socketFactory: stub.factory },
    );
    session.connect();
    stub.sockets[0].open();
    stub.sockets[0].drop();
    expect(states).toEqual(["connecting", "open", "reconnecting"]);
  });

  it("ignores malformed frames with a warning and keeps going", () => {
    const stub = makeStub();
    const seen: string[] = [];
    const session = new ConsoleSession(
      "ws://test/ws",
      { onChat: (entry) => seen.push(entry.text) },
      { socketFactory: stub.factory },
    );
    session.connect();
    stub.sockets[0].open();
    stub.sockets[0].receive("{broken json");
    stub.sockets[0].receive(pubFrame("hri/out", { text: "fine" }));
    expect(console.warn).toHaveBeenCalled();
    expect(seen).toEqual(["fine"]);
  });

  it("updates mission panel state per record", () => {
    const stub = makeStub();
    let latest: Array<{ status: string }> = [];
    const session = new ConsoleSession(
      "ws://test/ws",
      { onMissions: (records) => (latest = records) },
      { socketFactory: stub.factory },
    );
    session.connect();
    stub.sockets[0].open();
    stub.sockets[0].receive(pubFrame("mission/status",
      { mission_id: "m1", prompt: "go", status: "executing", report: "" }));
    stub.sockets[0].receive(pubFrame("mission/status",
      { mission_id: "m1", prompt: "go", status: "succeeded", report: "reached it" }));
    expect(latest).toHaveLength(1);
    expect(latest[0].status).toBe("succeeded");
  });

  it("keeps the latest snapshot for rendering", () => {
    const stub = makeStub();
    const session = new ConsoleSession("ws://test/ws", {}, { socketFactory: stub.factory });
    session.connect();
    stub.sockets[0].open();
    stub.sockets[0].receive(pubFrame("world/snapshot",
      { tick: 10, bounds: [0, 0, 8, 5], robot: { x: 2, y: 2, heading: 90 }, objects: [] }));
    expect(session.latestSnapshot?.tick).toBe(10);
  });

  it("drops chat lines while disconnected instead of inventing traffic", () => {
    const stub = makeStub();
    const session = new ConsoleSession("ws://test/ws", {}, { socketFactory: stub.factory });
    session.connect(); // not yet open
    session.sendChat("hello?");
    expect(stub.sockets[0].sent).toHaveLength(0);
    expect(console.warn).toHaveBeenCalled();
  });

  it("close() stops reconnecting", () => {
    const stub = makeStub();
    const session = new ConsoleSession("ws://test/ws", {}, { socketFactory: stub.factory });
    session.connect();
    stub.sockets[0].open();
    session.close();
    vi.advanceTimersByTime(20_000);
    expect(stub.sockets).toHaveLength(1);
    expect(session.state).toBe("closed");
  });
});
