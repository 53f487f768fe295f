"""The ReAct loop: call the model, execute tool calls, repeat until final.

Tool calls in one reply run sequentially in listed order so transcripts
stay deterministic. The loop is bounded: after ``max_steps`` model calls
without final text it gives up with the fixed text "step limit reached".
Provider failures abort the turn; they never escape as exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from embark.llm.messages import ChatMessage, Role
from embark.llm.providers import CompletionParams, Provider, ProviderError
from embark.toolkit.registry import ToolContext, ToolRegistry, execute
from embark.toolkit.spec import OutcomeStatus

STEP_LIMIT_TEXT = "step limit reached"

# Called with ("model_reply" | "tool_outcome" | "message", payload dict).
EventHook = Optional[Callable[[str, dict[str, Any]], None]]


@dataclass
class ReactResult:
    status: str  # "ok" | "failed"
    final_text: str
    provider_calls: int
    error: Optional[str] = None
    transcript: list[ChatMessage] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def react_turn(
    provider: Provider,
    registry: ToolRegistry,
    ctx: ToolContext,
    messages: list[ChatMessage],
    max_steps: int = 16,
    params: CompletionParams = CompletionParams(),
    on_event: EventHook = None,
) -> ReactResult:
    """Run one conversation turn in place, appending to `messages`."""
    specs = registry.specs()
    calls_made = 0
    for _ in range(max_steps):
        try:
            reply = provider.complete(messages, specs, params)
        except ProviderError as exc:
            error = f"{type(exc).__name__}: {exc}"
            if on_event:
                on_event("provider_error", {"error": error})
            return ReactResult("failed", "", calls_made, error=error, transcript=list(messages))
        calls_made += 1
        if reply.is_final:
            final = ChatMessage.assistant(reply.final_text)
            messages.append(final)
            if on_event:
                on_event("model_reply", {"final_text": reply.final_text})
            return ReactResult("ok", reply.final_text, calls_made, transcript=list(messages))
        messages.append(ChatMessage.assistant_calls(reply.tool_calls))
        if on_event:
            on_event(
                "model_reply",
                {"tool_calls": [{"id": c.id, "name": c.name, "arguments": dict(c.arguments)}
                                for c in reply.tool_calls]},
            )
        for call in reply.tool_calls:
            outcome = execute(call, registry, ctx)
            prefix = "" if outcome.status is OutcomeStatus.OK else "ERROR: "
            image_refs = tuple(p.image_ref for p in outcome.content if p.image_ref)
            messages.append(ChatMessage.tool(call.id, prefix + outcome.text, image_refs))
            if on_event:
                on_event(
                    "tool_outcome",
                    {"tool": call.name, "status": outcome.status.value, "text": outcome.text},
                )
    return ReactResult(
        "failed", STEP_LIMIT_TEXT, calls_made, error=STEP_LIMIT_TEXT, transcript=list(messages)
    )


def run_react_loop(
    provider: Provider,
    registry: ToolRegistry,
    ctx: ToolContext,
    system_prompt: str,
    user_message: ChatMessage | str,
    max_steps: int = 16,
    params: CompletionParams = CompletionParams(),
    bus: Any = None,
    outbox_topic: Optional[str] = None,
    on_event: EventHook = None,
) -> ReactResult:
    """Fresh conversation from a system prompt and one user message.

    The final text (or the step-limit text) is published on the outbox
    topic when one is configured.
    """
    opening = (
        user_message if isinstance(user_message, ChatMessage) else ChatMessage.user(user_message)
    )
    if opening.role is not Role.USER:
        raise ValueError("opening message must be a USER turn")
    messages = [ChatMessage.system(system_prompt), opening]
    if on_event:
        for m in messages:
            on_event("message", {"role": m.role.value, "text": m.text,
                                 "image_refs": list(m.image_refs)})
    result = react_turn(provider, registry, ctx, messages, max_steps, params, on_event)
    if bus is not None and outbox_topic and result.final_text:
        bus.publish(outbox_topic, {"text": result.final_text, "status": result.status})
    return result
