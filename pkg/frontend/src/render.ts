/**
 * DOM and canvas rendering. Pure "state in, DOM out" helpers so the
 * session stays testable without a browser; everything degrades
 * gracefully when data (or a 2D context) is missing.
 */

import { ChatEntry, ConnectionState, MissionRecord, WorldSnapshot } from "./session.js";

export function appendChatEntry(list: HTMLElement, entry: ChatEntry): void {
  const item = document.createElement("li");
  item.className = `chat chat-${entry.who}${entry.failed ? " chat-failed" : ""}`;
  const who = document.createElement("span");
  who.className = "who";
  who.textContent = entry.who === "operator" ? "you" : "robot";
  const text = document.createElement("span");
  text.className = "text";
  text.textContent = entry.text;
  item.append(who, text);
  list.appendChild(item);
  list.scrollTop = list.scrollHeight;
}

export function renderMissions(panel: HTMLElement, records: MissionRecord[]): void {
  panel.textContent = "";
  for (const record of records) {
    const row = document.createElement("div");
    row.className = `mission mission-${record.status}`;
    const badge = document.createElement("span");
    badge.className = "badge";
    badge.textContent = record.status;
    const label = document.createElement("span");
    label.className = "label";
    label.textContent = record.prompt;
    row.append(badge, label);
    if (record.report) {
      const report = document.createElement("span");
      report.className = "report";
      report.textContent = record.report;
      row.append(report);
    }
    panel.appendChild(row);
  }
}

export function renderBanner(banner: HTMLElement, state: ConnectionState, detail: string): void {
  banner.dataset.state = state;
  banner.textContent = state === "open" ? "" : `${state}: ${detail}`;
  banner.style.display = state === "open" ? "none" : "block";
}

/** World units -> canvas pixels, preserving aspect, 10px margin. */
export function worldToCanvas(
  bounds: [number, number, number, number],
  width: number,
  height: number,
): (x: number, y: number) => [number, number] {
  const [x0, y0, x1, y1] = bounds;
  const margin = 10;
  const sx = (width - 2 * margin) / Math.max(x1 - x0, 1e-9);
  const sy = (height - 2 * margin) / Math.max(y1 - y0, 1e-9);
  const s = Math.min(sx, sy);
  // canvas y grows downward; world y grows upward
  return (x, y) => [margin + (x - x0) * s, height - margin - (y - y0) * s];
}

export function drawWorld(canvas: HTMLCanvasElement, snapshot: WorldSnapshot | null): void {
  const ctx = canvas.getContext ? canvas.getContext("2d") : null;
  if (!ctx || !snapshot) return; // degrade gracefully without a context/snapshot
  const toPx = worldToCanvas(snapshot.bounds, canvas.width, canvas.height);
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const [x0, y0, x1, y1] = snapshot.bounds;
  const [bx0, by1] = toPx(x0, y0);
  const [bx1, by0] = toPx(x1, y1);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(bx0, by0, bx1 - bx0, by1 - by0);

  for (const obj of snapshot.objects) {
    const [px0, py1] = toPx(obj.x - obj.hx, obj.y - obj.hy);
    const [px1, py0] = toPx(obj.x + obj.hx, obj.y + obj.hy);
    ctx.fillStyle = obj.fixed ? "#999" : "#4a7";
    ctx.fillRect(px0, py0, px1 - px0, py1 - py0);
    ctx.fillStyle = "#222";
    ctx.font = "10px sans-serif";
    const [lx, ly] = toPx(obj.x, obj.y);
    ctx.fillText(obj.label, lx + 3, ly - 3);
  }

  const { x, y, heading } = snapshot.robot;
  const [rx, ry] = toPx(x, y);
  const rad = (heading * Math.PI) / 180;
  ctx.fillStyle = "#d33";
  ctx.beginPath();
  ctx.arc(rx, ry, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = "#d33";
  ctx.beginPath();
  ctx.moveTo(rx, ry);
  // canvas y is flipped, so the heading ray flips its y component
  ctx.lineTo(rx + 12 * Math.cos(rad), ry - 12 * Math.sin(rad));
  ctx.stroke();
}
