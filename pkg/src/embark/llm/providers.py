"""Model providers: a deterministic scripted one and an OpenAI-compatible
HTTP client.

The scripted provider replays a fixture: an ordered list of entries, each
with an optional substring predicate on the latest message and a reply
(final text or tool calls). On every completion the remaining entries are
scanned in order and the first match fires and is consumed; entries whose
predicate does not match stay for later turns. Running out of matching
entries raises ScriptExhausted, which is a test failure signal rather than
something agents should hide.
"""

from __future__ import annotations

import base64
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Protocol, Sequence

import httpx

from embark.llm.messages import ChatMessage, ModelReply, Role
from embark.timing import Clock, WallClock
from embark.toolkit.spec import ToolCall, ToolSpec

ENV_BASE_URL = "RAI_LLM_BASE_URL"
ENV_API_KEY = "RAI_LLM_API_KEY"


class ProviderError(Exception):
    """Transport or provider failure.

    `status` is the HTTP status when one exists; `retryable` reflects the
    retry policy (429 and 5xx only).
    """

    def __init__(self, message: str, status: Optional[int] = None, retryable: bool = False):
        super().__init__(message)
        self.status = status
        self.retryable = retryable


class MalformedReply(ProviderError):
    """Provider output could not be interpreted as a valid reply."""

    def __init__(self, message: str):
        super().__init__(message, status=None, retryable=False)


class ScriptExhausted(ProviderError):
    """The scripted provider has no entry matching the current turn."""

    def __init__(self, message: str):
        super().__init__(message, status=None, retryable=False)


@dataclass(frozen=True)
class CompletionParams:
    temperature: float = 0.0
    max_output: int = 1024


class Provider(Protocol):
    def complete(
        self,
        messages: Sequence[ChatMessage],
        tools: Sequence[ToolSpec],
        params: CompletionParams = CompletionParams(),
    ) -> ModelReply:
        ...


def _check_reply_names_known_tools(reply: ModelReply, tools: Sequence[ToolSpec]) -> ModelReply:
    known = {t.name for t in tools}
    for call in reply.tool_calls:
        if call.name not in known:
            raise MalformedReply(f"reply names unknown tool {call.name!r}")
    return reply


def _validate_messages(messages: Sequence[ChatMessage]) -> None:
    if not messages:
        raise ValueError("messages must be non-empty")
    if messages[0].role not in (Role.SYSTEM, Role.USER):
        raise ValueError("conversation must open with SYSTEM or USER")


class ScriptedProvider:
    """Replays scripted replies selected by ordered substring matchers."""

    def __init__(self, entries: Sequence[dict[str, Any]]) -> None:
        self._entries: list[dict[str, Any]] = [self._parse_entry(e) for e in entries]
        self._call_counter = 0
        self.completions = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedProvider":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(doc, list):
            raise ValueError("script fixture must be a JSON list")
        return cls(doc)

    @staticmethod
    def _parse_entry(entry: dict[str, Any]) -> dict[str, Any]:
        if "reply" not in entry:
            raise ValueError("script entry missing 'reply'")
        reply = entry["reply"]
        has_text = "text" in reply
        has_calls = "tool_calls" in reply
        if has_text == has_calls:
            raise ValueError("entry reply must be exactly one of text / tool_calls")
        when = entry.get("when")
        if when is not None and "contains" not in when:
            raise ValueError("entry 'when' supports only {contains: text}")
        return {"when": when, "reply": reply}

    def _matches(self, entry: dict[str, Any], latest: ChatMessage) -> bool:
        when = entry["when"]
        if when is None:
            return True
        needle = when["contains"]
        haystack = latest.text + "".join(f"[image:{r}]" for r in latest.image_refs)
        return needle in haystack

    def complete(
        self,
        messages: Sequence[ChatMessage],
        tools: Sequence[ToolSpec],
        params: CompletionParams = CompletionParams(),
    ) -> ModelReply:
        _validate_messages(messages)
        self.completions += 1
        latest = messages[-1]
        for i, entry in enumerate(self._entries):
            if self._matches(entry, latest):
                del self._entries[i]
                return _check_reply_names_known_tools(self._to_reply(entry["reply"]), tools)
        raise ScriptExhausted(
            f"no script entry matches turn (latest: {latest.text[:80]!r}, "
            f"{len(self._entries)} unmatched entries left)"
        )

    def _to_reply(self, reply: dict[str, Any]) -> ModelReply:
        if "text" in reply:
            return ModelReply(final_text=reply["text"])
        calls = []
        for spec in reply["tool_calls"]:
            self._call_counter += 1
            calls.append(
                ToolCall(
                    id=spec.get("id", f"call_{self._call_counter}"),
                    name=spec["name"],
                    arguments=spec.get("arguments", {}),
                )
            )
        return ModelReply(tool_calls=tuple(calls))

    @property
    def remaining(self) -> int:
        return len(self._entries)


AssetLoader = Callable[[str], tuple[str, bytes]]


class HttpProvider:
    """OpenAI-compatible chat completions with tool calling.

    Endpoint and key default to the RAI_LLM_BASE_URL / RAI_LLM_API_KEY
    environment variables. Retries twice with exponential backoff on 429
    and 5xx; everything else fails immediately as ProviderError.
    """

    def __init__(
        self,
        base_url: Optional[str] = None,
        api_key: Optional[str] = None,
        model: str = "default",
        asset_loader: Optional[AssetLoader] = None,
        transport: Optional[httpx.BaseTransport] = None,
        clock: Optional[Clock] = None,
        max_retries: int = 2,
        backoff_ms: int = 500,
    ) -> None:
        self.base_url = (base_url or os.environ.get(ENV_BASE_URL, "")).rstrip("/")
        if not self.base_url:
            raise ValueError(f"no base URL configured (set {ENV_BASE_URL})")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY, "")
        self.model = model
        self.asset_loader = asset_loader
        self.clock = clock if clock is not None else WallClock()
        self.max_retries = max_retries
        self.backoff_ms = backoff_ms
        self._client = httpx.Client(transport=transport, timeout=60.0)

    # -- request building ---------------------------------------------------

    def _part_to_json(self, part: Any) -> dict[str, Any]:
        if part.text is not None:
            return {"type": "text", "text": part.text}
        if self.asset_loader is None:
            raise ProviderError(f"no asset loader for image {part.image_ref!r}")
        mime, blob = self.asset_loader(part.image_ref)
        data = base64.b64encode(blob).decode("ascii")
        return {"type": "image_url", "image_url": {"url": f"data:{mime};base64,{data}"}}

    def _message_to_json(self, msg: ChatMessage) -> dict[str, Any]:
        if msg.role is Role.ASSISTANT and msg.tool_calls:
            return {
                "role": "assistant",
                "content": msg.text or None,
                "tool_calls": [
                    {
                        "id": c.id,
                        "type": "function",
                        "function": {"name": c.name, "arguments": json.dumps(dict(c.arguments))},
                    }
                    for c in msg.tool_calls
                ],
            }
        if msg.role is Role.TOOL:
            return {"role": "tool", "tool_call_id": msg.tool_call_id, "content": msg.text}
        if any(p.image_ref for p in msg.parts):
            return {"role": msg.role.value, "content": [self._part_to_json(p) for p in msg.parts]}
        return {"role": msg.role.value, "content": msg.text}

    def _build_body(
        self,
        messages: Sequence[ChatMessage],
        tools: Sequence[ToolSpec],
        params: CompletionParams,
    ) -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": self.model,
            "messages": [self._message_to_json(m) for m in messages],
            "temperature": params.temperature,
            "max_tokens": params.max_output,
        }
        if tools:
            body["tools"] = [{"type": "function", "function": t.to_function_schema()} for t in tools]
            body["tool_choice"] = "auto"
        return body

    # -- completion -----------------------------------------------------------

    def complete(
        self,
        messages: Sequence[ChatMessage],
        tools: Sequence[ToolSpec],
        params: CompletionParams = CompletionParams(),
    ) -> ModelReply:
        _validate_messages(messages)
        body = self._build_body(messages, tools, params)
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        attempt = 0
        while True:
            try:
                response = self._client.post(
                    f"{self.base_url}/v1/chat/completions", json=body, headers=headers
                )
            except httpx.HTTPError as exc:
                raise ProviderError(f"transport failure: {exc}") from exc
            if response.status_code == 200:
                return _check_reply_names_known_tools(self._parse_reply(response), tools)
            retryable = response.status_code == 429 or response.status_code >= 500
            if retryable and attempt < self.max_retries:
                self.clock.sleep(self.backoff_ms * (2**attempt))
                attempt += 1
                continue
            raise ProviderError(
                f"HTTP {response.status_code}: {response.text[:200]}",
                status=response.status_code,
                retryable=retryable,
            )

    def _parse_reply(self, response: httpx.Response) -> ModelReply:
        try:
            doc = response.json()
            message = doc["choices"][0]["message"]
        except (ValueError, LookupError, TypeError) as exc:
            raise MalformedReply(f"unparseable completion: {exc}") from exc
        raw_calls = message.get("tool_calls") or []
        if raw_calls:
            calls = []
            for rc in raw_calls:
                try:
                    fn = rc["function"]
                    args = json.loads(fn.get("arguments") or "{}")
                    if not isinstance(args, dict):
                        raise ValueError("arguments must be an object")
                    calls.append(ToolCall(id=rc["id"], name=fn["name"], arguments=args))
                except (KeyError, TypeError, ValueError) as exc:
                    raise MalformedReply(f"bad tool call in reply: {exc}") from exc
            return ModelReply(tool_calls=tuple(calls))
        content = message.get("content")
        if not isinstance(content, str):
            raise MalformedReply("reply has neither text content nor tool calls")
        return ModelReply(final_text=content)
