/**
 * Bus wire protocol, console side: one JSON envelope per WebSocket text
 * frame, fields v/kind/id/topic/corr/ts/payload, corr omitted when absent.
 */

export type Kind =
  | "pub"
  | "srv_req"
  | "srv_res"
  | "act_goal"
  | "act_accept"
  | "act_feedback"
  | "act_result";

const KINDS: ReadonlySet<string> = new Set([
  "pub",
  "srv_req",
  "srv_res",
  "act_goal",
  "act_accept",
  "act_feedback",
  "act_result",
]);

const REPLY_KINDS: ReadonlySet<string> = new Set([
  "srv_res",
  "act_accept",
  "act_feedback",
  "act_result",
]);

export interface Envelope {
  v: 1;
  kind: Kind;
  id: string;
  topic: string;
  corr?: string;
  ts: number;
  payload: unknown;
}

const TOPIC_RE = /^[a-z0-9_]+(\/[a-z0-9_]+)*$/;

/** Parse one frame; returns null (never throws) when the frame is bad. */
export function decodeFrame(text: string): Envelope | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) return null;
  const d = doc as Record<string, unknown>;
  if (d.v !== 1) return null;
  if (typeof d.kind !== "string" || !KINDS.has(d.kind)) return null;
  if (typeof d.id !== "string" || d.id.length === 0) return null;
  if (typeof d.topic !== "string" || !TOPIC_RE.test(d.topic)) return null;
  if (typeof d.ts !== "number" || !Number.isInteger(d.ts)) return null;
  if (!("payload" in d)) return null;
  const isReply = REPLY_KINDS.has(d.kind);
  if (isReply && (typeof d.corr !== "string" || d.corr.length === 0)) return null;
  if (!isReply && "corr" in d) return null;
  return d as unknown as Envelope;
}

export function encodeFrame(envelope: Envelope): string {
  const doc: Record<string, unknown> = {
    v: envelope.v,
    kind: envelope.kind,
    id: envelope.id,
    topic: envelope.topic,
  };
  if (envelope.corr !== undefined) doc.corr = envelope.corr;
  doc.ts = envelope.ts;
  doc.payload = envelope.payload;
  return JSON.stringify(doc);
}

let counter = 0;

export function newId(): string {
  const c = globalThis.crypto as Crypto | undefined;
  if (c && typeof c.randomUUID === "function") return c.randomUUID();
  counter += 1;
  return `console_${Date.now()}_${counter}`;
}
