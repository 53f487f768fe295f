"""Conversation turns and model replies, independent of any provider."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from embark.toolkit.spec import ToolCall


class Role(str, Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"
    TOOL = "tool"


@dataclass(frozen=True)
class MessagePart:
    """Text or a reference to an image asset (multimodal observations)."""

    text: Optional[str] = None
    image_ref: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.text is None) == (self.image_ref is None):
            raise ValueError("part must be exactly one of text / image_ref")


@dataclass(frozen=True)
class ChatMessage:
    role: Role
    parts: tuple[MessagePart, ...]
    tool_call_id: Optional[str] = None
    tool_calls: tuple[ToolCall, ...] = ()

    def __post_init__(self) -> None:
        if (self.tool_call_id is not None) != (self.role is Role.TOOL):
            raise ValueError("tool_call_id is present exactly on TOOL messages")
        if self.tool_calls and self.role is not Role.ASSISTANT:
            raise ValueError("only ASSISTANT messages carry tool calls")
        if any(p.image_ref for p in self.parts) and self.role not in (Role.USER, Role.TOOL):
            raise ValueError("image parts appear only in USER or TOOL messages")

    @property
    def text(self) -> str:
        return "\n".join(p.text for p in self.parts if p.text is not None)

    @property
    def image_refs(self) -> tuple[str, ...]:
        return tuple(p.image_ref for p in self.parts if p.image_ref is not None)

    @classmethod
    def system(cls, text: str) -> "ChatMessage":
        return cls(Role.SYSTEM, (MessagePart(text=text),))

    @classmethod
    def user(cls, text: str, image_refs: tuple[str, ...] = ()) -> "ChatMessage":
        parts = (MessagePart(text=text),) + tuple(MessagePart(image_ref=r) for r in image_refs)
        return cls(Role.USER, parts)

    @classmethod
    def assistant(cls, text: str) -> "ChatMessage":
        return cls(Role.ASSISTANT, (MessagePart(text=text),))

    @classmethod
    def assistant_calls(cls, calls: tuple[ToolCall, ...]) -> "ChatMessage":
        return cls(Role.ASSISTANT, (), tool_calls=calls)

    @classmethod
    def tool(cls, call_id: str, text: str, image_refs: tuple[str, ...] = ()) -> "ChatMessage":
        parts = (MessagePart(text=text),) + tuple(MessagePart(image_ref=r) for r in image_refs)
        return cls(Role.TOOL, parts, tool_call_id=call_id)


@dataclass(frozen=True)
class ModelReply:
    """Either final text or a non-empty batch of tool calls, never both."""

    final_text: Optional[str] = None
    tool_calls: tuple[ToolCall, ...] = ()

    def __post_init__(self) -> None:
        if (self.final_text is None) == (len(self.tool_calls) == 0):
            raise ValueError("reply is exactly one of final_text / tool_calls")

    @property
    def is_final(self) -> bool:
        return self.final_text is not None
