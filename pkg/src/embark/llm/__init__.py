"""Provider-agnostic model access: chat completion and embeddings."""

from embark.llm.messages import ChatMessage, MessagePart, ModelReply, Role
from embark.llm.providers import (
    CompletionParams,
    HttpProvider,
    MalformedReply,
    Provider,
    ProviderError,
    ScriptedProvider,
    ScriptExhausted,
)
from embark.llm.embeddings import Embedder, HashEmbedder, fnv1a64

__all__ = [
    "ChatMessage",
    "CompletionParams",
    "Embedder",
    "HashEmbedder",
    "HttpProvider",
    "MalformedReply",
    "MessagePart",
    "ModelReply",
    "Provider",
    "ProviderError",
    "Role",
    "ScriptExhausted",
    "ScriptedProvider",
    "fnv1a64",
]
