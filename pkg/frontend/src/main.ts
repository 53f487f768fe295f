/** Bootstrap: wire the session to the page. */

import { appendChatEntry, drawWorld, renderBanner, renderMissions } from "./render.js";
import { ConsoleSession } from "./session.js";

function requireElement<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

export function bootstrap(doc: Document = document): ConsoleSession {
  const chatList = requireElement<HTMLElement>("chat");
  const missionPanel = requireElement<HTMLElement>("missions");
  const banner = requireElement<HTMLElement>("banner");
  const canvas = requireElement<HTMLCanvasElement>("world");
  const input = requireElement<HTMLInputElement>("chat-input");
  const sendButton = requireElement<HTMLElement>("chat-send");

  const scheme = doc.location.protocol === "https:" ? "wss" : "ws";
  const url = `${scheme}://${doc.location.host}/ws`;
  const session = new ConsoleSession(url, {
    onChat: (entry) => appendChatEntry(chatList, entry),
    onMissions: (records) => renderMissions(missionPanel, records),
    onSnapshot: (snapshot) => drawWorld(canvas, snapshot),
    onState: (state, detail) => renderBanner(banner, state, detail),
  });

  const send = () => {
    const text = input.value.trim();
    if (!text) return;
    session.sendChat(text);
    input.value = "";
  };
  sendButton.addEventListener("click", send);
  input.addEventListener("keydown", (ev) => {
    if ((ev as KeyboardEvent).key === "Enter") send();
  });

  session.connect();
  return session;
}

if (typeof document !== "undefined" && document.getElementById("chat")) {
  bootstrap();
}
