/**
 * Console session: one WebSocket to the bridge, display-and-relay only.
 *
 * The session sends nothing but operator-typed chat frames (PUB hri/in).
 * Inbound frames update append-only chat history, the mission panel
 * model, and the latest world snapshot. Unexpected disconnects trigger
 * automatic reconnects with doubling backoff: 1s, 2s, 4s, then capped at
 * 8s; a successful open resets the schedule. Malformed frames are
 * ignored with a console warning.
 */

import { decodeFrame, encodeFrame, Envelope, newId } from "./wire.js";

export type ConnectionState = "connecting" | "open" | "reconnecting" | "closed";

export interface ChatEntry {
  who: "operator" | "robot";
  text: string;
  failed?: boolean;
}

export interface MissionRecord {
  mission_id: string;
  prompt: string;
  status: string;
  report: string;
}

export interface WorldSnapshot {
  tick: number;
  bounds: [number, number, number, number];
  robot: { x: number; y: number; heading: number; width?: number };
  objects: Array<{
    id: string;
    label: string;
    x: number;
    y: number;
    hx: number;
    hy: number;
    fixed?: boolean;
  }>;
}

export interface SessionListeners {
  onChat?: (entry: ChatEntry) => void;
  onMissions?: (records: MissionRecord[]) => void;
  onSnapshot?: (snapshot: WorldSnapshot) => void;
  onState?: (state: ConnectionState, detail: string) => void;
}

/** The subset of WebSocket the session needs; injectable for tests. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SessionOptions {
  socketFactory?: SocketFactory;
  baseBackoffMs?: number;
  maxBackoffMs?: number;
  now?: () => number;
}

const defaultFactory: SocketFactory = (url) =>
  new WebSocket(url) as unknown as SocketLike;

export class ConsoleSession {
  readonly chatHistory: ChatEntry[] = [];
  readonly missions = new Map<string, MissionRecord>();
  latestSnapshot: WorldSnapshot | null = null;
  state: ConnectionState = "closed";
  framesSent = 0;

  private socket: SocketLike | null = null;
  private readonly factory: SocketFactory;
  private readonly baseBackoffMs: number;
  private readonly maxBackoffMs: number;
  private nextBackoffMs: number;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;
  private readonly now: () => number;

  constructor(
    readonly url: string,
    private readonly listeners: SessionListeners = {},
    options: SessionOptions = {},
  ) {
    this.factory = options.socketFactory ?? defaultFactory;
    this.baseBackoffMs = options.baseBackoffMs ?? 1000;
    this.maxBackoffMs = options.maxBackoffMs ?? 8000;
    this.nextBackoffMs = this.baseBackoffMs;
    this.now = options.now ?? Date.now;
  }

  connect(): void {
    this.closedByUser = false;
    this.openSocket();
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.setState("closed", "closed by operator");
  }

  /** Relay one operator line as a single PUB frame on hri/in. */
  sendChat(text: string): void {
    if (this.state !== "open" || this.socket === null) {
      console.warn("console: not connected; chat line dropped");
      return;
    }
    const envelope: Envelope = {
      v: 1,
      kind: "pub",
      id: newId(),
      topic: "hri/in",
      ts: Math.floor(this.now()),
      payload: { text },
    };
    this.socket.send(encodeFrame(envelope));
    this.framesSent += 1;
    this.pushChat({ who: "operator", text });
  }

  // -- internals -------------------------------------------------------------

  private openSocket(): void {
    this.setState(this.chatHistory.length > 0 ? "reconnecting" : "connecting", this.url);
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.nextBackoffMs = this.baseBackoffMs;
      this.setState("open", "connected");
    };
    socket.onmessage = (ev) => {
      if (typeof ev.data === "string") this.handleFrame(ev.data);
    };
    socket.onerror = () => {
      /* the close handler owns recovery */
    };
    socket.onclose = () => {
      this.socket = null;
      if (this.closedByUser) return;
      const delay = this.nextBackoffMs;
      this.nextBackoffMs = Math.min(this.nextBackoffMs * 2, this.maxBackoffMs);
      this.setState("reconnecting", `retrying in ${delay / 1000}s`);
      this.reconnectTimer = setTimeout(() => {
        this.reconnectTimer = null;
        this.openSocket();
      }, delay);
    };
  }

  private handleFrame(text: string): void {
    const envelope = decodeFrame(text);
    if (envelope === null) {
      console.warn("console: ignored malformed frame", text.slice(0, 120));
      return;
    }
    if (envelope.kind !== "pub") return; // console only watches broadcasts
    const payload = envelope.payload as Record<string, unknown> | null;
    switch (envelope.topic) {
      case "hri/out": {
        // Every hri/out frame lands in the history exactly once; relayed
        // mission records are rendered as a one-line summary.
        let text0: string;
        if (typeof payload?.text === "string") {
          text0 = payload.text as string;
        } else if (payload && typeof payload.mission_id === "string") {
          text0 = `[mission ${payload.mission_id}] ${payload.status}` +
            (payload.report ? `: ${payload.report}` : "");
        } else {
          text0 = JSON.stringify(payload);
        }
        this.pushChat({
          who: "robot",
          text: text0,
          failed: payload?.status === "failed" || undefined,
        });
        break;
      }
      case "mission/status": {
        if (payload && typeof payload.mission_id === "string") {
          const record = payload as unknown as MissionRecord;
          this.missions.set(record.mission_id, record);
          this.listeners.onMissions?.(Array.from(this.missions.values()));
        }
        break;
      }
      case "world/snapshot": {
        if (payload && Array.isArray(payload.bounds)) {
          this.latestSnapshot = payload as unknown as WorldSnapshot;
          this.listeners.onSnapshot?.(this.latestSnapshot);
        }
        break;
      }
      case "bridge/errors": {
        console.warn("console: bridge reported", payload);
        break;
      }
      default:
        break; // other topics are visible but not rendered
    }
  }

  private pushChat(entry: ChatEntry): void {
    this.chatHistory.push(entry);
    this.listeners.onChat?.(entry);
  }

  private setState(state: ConnectionState, detail: string): void {
    this.state = state;
    this.listeners.onState?.(state, detail);
  }
}
