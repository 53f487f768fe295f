"""Conversational agent: a persistent ReAct conversation over bus topics.

Per iteration it first relays configured status topics to the outbox
verbatim, then answers every pending inbox message with a full ReAct turn.
Relaying is procedural (no model in the path), which is what keeps the
operator channel responsive while other agents grind away at missions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from embark.agents.base import Agent
from embark.agents.react import EventHook, react_turn
from embark.llm.messages import ChatMessage
from embark.llm.providers import CompletionParams, Provider
from embark.msgbus.bus import MessageBus
from embark.toolkit.registry import ToolContext, ToolRegistry


@dataclass
class ConversationalConfig:
    system_prompt: str
    provider: Provider
    registry: ToolRegistry
    inbox_topic: str
    outbox_topic: str
    relay_topics: Sequence[str] = ()
    max_steps: int = 16
    params: CompletionParams = field(default_factory=CompletionParams)

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.inbox_topic == self.outbox_topic:
            raise ValueError("inbox and outbox must differ")


class ConversationalAgent(Agent):
    def __init__(
        self,
        agent_id: str,
        bus: MessageBus,
        config: ConversationalConfig,
        ctx: Optional[ToolContext] = None,
        on_event: EventHook = None,
    ) -> None:
        super().__init__(agent_id)
        self.bus = bus
        self.config = config
        self.ctx = ctx if ctx is not None else ToolContext(bus=bus, clock=bus.clock)
        self.on_event = on_event
        self.messages: list[ChatMessage] = [ChatMessage.system(config.system_prompt)]
        self._inbox = bus.subscribe(config.inbox_topic)
        self._relays = [bus.subscribe(t) for t in config.relay_topics]
        self.turns = 0
        self.failures = 0
        self._emit("message", {"role": "system", "text": config.system_prompt, "image_refs": []})

    def _emit(self, kind: str, payload: dict[str, Any]) -> None:
        if self.on_event:
            self.on_event(kind, payload)

    @staticmethod
    def _payload_text(payload: Any) -> str:
        if isinstance(payload, dict) and isinstance(payload.get("text"), str):
            return payload["text"]
        return str(payload)

    def _iterate(self) -> None:
        for relay in self._relays:
            for env in relay.drain():
                self.bus.publish(self.config.outbox_topic, env.payload)
                self._emit("relay", {"from": relay.topic, "payload": env.payload})
        for env in self._inbox.drain():
            self._answer(self._payload_text(env.payload))

    def _answer(self, text: str) -> None:
        self.turns += 1
        self.messages.append(ChatMessage.user(text))
        self._emit("message", {"role": "user", "text": text, "image_refs": []})
        result = react_turn(
            self.config.provider,
            self.config.registry,
            self.ctx,
            self.messages,
            max_steps=self.config.max_steps,
            params=self.config.params,
            on_event=self.on_event,
        )
        if result.ok:
            self.bus.publish(self.config.outbox_topic, {"text": result.final_text})
        else:
            self.failures += 1
            failure_text = result.final_text or f"turn failed: {result.error}"
            self.bus.publish(
                self.config.outbox_topic, {"text": failure_text, "status": "failed"}
            )
