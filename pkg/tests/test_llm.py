"""Providers and embeddings: scripted replay, HTTP client, hash embedder."""

from __future__ import annotations

import json
import math
import random
import re

import httpx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embark.llm import (
    ChatMessage,
    CompletionParams,
    HashEmbedder,
    HttpProvider,
    MalformedReply,
    ModelReply,
    ProviderError,
    Role,
    ScriptedProvider,
    ScriptExhausted,
    fnv1a64,
)
from embark.timing import FakeClock
from embark.toolkit.spec import FieldSpec, FieldType, ToolSpec

DIST_TOOL = ToolSpec(
    "get_distance_to_objects", "d", {"object_names": FieldSpec(FieldType.TEXT_LIST)}
)


# -- hash embedder -------------------------------------------------------------


def oracle_embed(text: str, dim: int = 64) -> list[float]:
    """Independent reimplementation: tokenize, FNV-1a bucket counts, unit norm."""
    tokens = re.findall(r"[a-z0-9]+", text.lower())
    counts = [0.0] * dim
    for tok in tokens:
        h = 0xCBF29CE484222325
        for ch in tok.encode("utf-8"):
            h = ((h ^ ch) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
        counts[h % dim] += 1.0
    norm = math.sqrt(sum(c * c for c in counts))
    if norm == 0.0:
        counts[0] = 1.0
        return counts
    return [c / norm for c in counts]


def test_fnv1a64_known_vectors():
    # Published FNV-1a 64 test vectors.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_empty_text_embeds_to_e0():
    vec = HashEmbedder().embed_one("")
    assert vec[0] == 1.0 and float(np.sum(np.abs(vec[1:]))) == 0.0


def test_normalization_cancels_repeats():
    emb = HashEmbedder()
    assert np.allclose(emb.embed_one("chair chair"), emb.embed_one("chair"), atol=0, rtol=0)


def test_unit_norm():
    emb = HashEmbedder()
    for text in ("a", "red cube on table", "x y z w", "42"):
        assert abs(float(np.linalg.norm(emb.embed_one(text))) - 1.0) <= 1e-9


def test_embed_preserves_order_and_determinism():
    emb = HashEmbedder()
    a, b = emb.embed(["a", "a"])
    assert np.array_equal(a, b)
    va, vb = emb.embed(["a", "b"])
    assert float(np.dot(va, vb)) < 1.0


def test_embedder_matches_independent_oracle():
    emb = HashEmbedder()
    for text in ("red cube", "red cube on table", "Orchard ROW 7!", "", "a b a b c"):
        assert np.allclose(emb.embed_one(text), np.array(oracle_embed(text)), atol=1e-12)


def test_cosine_of_overlapping_texts_matches_oracle():
    emb = HashEmbedder()
    a = emb.embed_one("red cube")
    b = emb.embed_one("red cube on table")
    oa, ob = oracle_embed("red cube"), oracle_embed("red cube on table")
    expected = sum(x * y for x, y in zip(oa, ob))
    assert abs(float(np.dot(a, b)) - expected) <= 1e-12
    assert expected < 1.0


@given(st.lists(st.sampled_from(["red", "cube", "on", "table", "7", "éé"]), max_size=8))
@settings(max_examples=100, deadline=None)
def test_token_order_never_matters(tokens):
    emb = HashEmbedder()
    rng = random.Random(1)
    shuffled = tokens[:]
    rng.shuffle(shuffled)
    assert np.array_equal(emb.embed_one(" ".join(tokens)), emb.embed_one(" ".join(shuffled)))


# -- scripted provider ----------------------------------------------------------


def test_scripted_entries_fire_in_order():
    provider = ScriptedProvider(
        [{"reply": {"text": "one"}}, {"reply": {"text": "two"}}]
    )
    msgs = [ChatMessage.user("hi")]
    assert provider.complete(msgs, []).final_text == "one"
    assert provider.complete(msgs, []).final_text == "two"


def test_script_exhaustion_raises():
    provider = ScriptedProvider([{"reply": {"text": "only"}}])
    msgs = [ChatMessage.user("hi")]
    provider.complete(msgs, [])
    with pytest.raises(ScriptExhausted):
        provider.complete(msgs, [])


def test_predicate_skips_until_present():
    provider = ScriptedProvider(
        [
            {"when": {"contains": "branch"}, "reply": {"text": "saw branch"}},
            {"reply": {"text": "fallback"}},
        ]
    )
    assert provider.complete([ChatMessage.user("all clear")], []).final_text == "fallback"
    # The predicate entry stayed in the script and fires now.
    assert provider.complete([ChatMessage.user("a branch ahead")], []).final_text == "saw branch"
    with pytest.raises(ScriptExhausted):
        provider.complete([ChatMessage.user("nothing matches")], [])


def test_scripted_tool_call_reply():
    provider = ScriptedProvider(
        [
            {
                "reply": {
                    "tool_calls": [
                        {"name": "get_distance_to_objects", "arguments": {"object_names": ["chair"]}}
                    ]
                }
            }
        ]
    )
    reply = provider.complete([ChatMessage.user("where is the chair?")], [DIST_TOOL])
    assert not reply.is_final
    (call,) = reply.tool_calls
    assert call.name == "get_distance_to_objects"
    assert call.arguments == {"object_names": ["chair"]}


def test_unknown_tool_in_reply_is_malformed():
    provider = ScriptedProvider([{"reply": {"tool_calls": [{"name": "nope"}]}}])
    with pytest.raises(MalformedReply):
        provider.complete([ChatMessage.user("x")], [DIST_TOOL])


def test_fixture_parse_errors_at_load():
    with pytest.raises(ValueError):
        ScriptedProvider([{"reply": {}}])
    with pytest.raises(ValueError):
        ScriptedProvider([{"reply": {"text": "a", "tool_calls": []}}])
    with pytest.raises(ValueError):
        ScriptedProvider([{"when": {"regex": "x"}, "reply": {"text": "a"}}])


def test_conversation_must_open_properly():
    provider = ScriptedProvider([{"reply": {"text": "x"}}])
    with pytest.raises(ValueError):
        provider.complete([], [])
    with pytest.raises(ValueError):
        provider.complete([ChatMessage.assistant("hi")], [])


# -- message invariants ----------------------------------------------------------


def test_model_reply_variants_are_exclusive():
    with pytest.raises(ValueError):
        ModelReply()
    with pytest.raises(ValueError):
        ModelReply(final_text="x", tool_calls=(object(),))  # type: ignore[arg-type]


def test_image_parts_only_on_user_or_tool():
    ChatMessage.user("look", image_refs=("img1",))
    ChatMessage.tool("c1", "saw", image_refs=("img1",))
    with pytest.raises(ValueError):
        ChatMessage(Role.SYSTEM, (ChatMessage.user("x", ("i",)).parts[1],))


def test_tool_call_id_only_on_tool_messages():
    with pytest.raises(ValueError):
        ChatMessage(Role.USER, (ChatMessage.user("x").parts[0],), tool_call_id="c")


# -- HTTP provider ----------------------------------------------------------------


def make_http_provider(handler, **kwargs) -> HttpProvider:
    return HttpProvider(
        base_url="http://llm.test",
        api_key="key",
        transport=httpx.MockTransport(handler),
        clock=FakeClock(),
        **kwargs,
    )


def test_http_final_text_reply():
    def handler(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        assert body["tool_choice"] == "auto"
        assert body["tools"][0]["function"]["name"] == "get_distance_to_objects"
        assert request.headers["Authorization"] == "Bearer key"
        return httpx.Response(
            200, json={"choices": [{"message": {"role": "assistant", "content": "hello"}}]}
        )

    provider = make_http_provider(handler)
    reply = provider.complete([ChatMessage.user("hi")], [DIST_TOOL])
    assert reply.final_text == "hello"


def test_http_tool_call_reply():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(
            200,
            json={
                "choices": [
                    {
                        "message": {
                            "role": "assistant",
                            "content": None,
                            "tool_calls": [
                                {
                                    "id": "call_9",
                                    "type": "function",
                                    "function": {
                                        "name": "get_distance_to_objects",
                                        "arguments": '{"object_names": ["chair"]}',
                                    },
                                }
                            ],
                        }
                    }
                ]
            },
        )

    reply = make_http_provider(handler).complete([ChatMessage.user("hi")], [DIST_TOOL])
    (call,) = reply.tool_calls
    assert call.id == "call_9" and call.arguments == {"object_names": ["chair"]}


def test_http_retries_on_429_then_succeeds():
    attempts = []

    def handler(request: httpx.Request) -> httpx.Response:
        attempts.append(1)
        if len(attempts) < 3:
            return httpx.Response(429, json={})
        return httpx.Response(
            200, json={"choices": [{"message": {"role": "assistant", "content": "ok"}}]}
        )

    provider = make_http_provider(handler)
    assert provider.complete([ChatMessage.user("hi")], []).final_text == "ok"
    assert len(attempts) == 3


def test_http_400_fails_without_retry():
    attempts = []

    def handler(request: httpx.Request) -> httpx.Response:
        attempts.append(1)
        return httpx.Response(400, json={"error": "bad"})

    with pytest.raises(ProviderError) as info:
        make_http_provider(handler).complete([ChatMessage.user("hi")], [])
    assert info.value.status == 400 and not info.value.retryable
    assert len(attempts) == 1


def test_http_5xx_exhausts_retries():
    attempts = []

    def handler(request: httpx.Request) -> httpx.Response:
        attempts.append(1)
        return httpx.Response(503, json={})

    with pytest.raises(ProviderError) as info:
        make_http_provider(handler).complete([ChatMessage.user("hi")], [])
    assert info.value.status == 503 and info.value.retryable
    assert len(attempts) == 3  # initial + 2 retries


def test_http_malformed_reply():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"choices": [{"message": {"role": "assistant"}}]})

    with pytest.raises(MalformedReply):
        make_http_provider(handler).complete([ChatMessage.user("hi")], [])


def test_http_unknown_tool_reply_is_malformed():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(
            200,
            json={
                "choices": [
                    {
                        "message": {
                            "role": "assistant",
                            "tool_calls": [
                                {"id": "c", "type": "function",
                                 "function": {"name": "ghost", "arguments": "{}"}}
                            ],
                        }
                    }
                ]
            },
        )

    with pytest.raises(MalformedReply):
        make_http_provider(handler).complete([ChatMessage.user("hi")], [DIST_TOOL])


def test_http_images_sent_as_data_urls():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen.update(json.loads(request.content))
        return httpx.Response(
            200, json={"choices": [{"message": {"role": "assistant", "content": "ok"}}]}
        )

    provider = make_http_provider(handler, asset_loader=lambda ref: ("image/png", b"PNG8"))
    provider.complete([ChatMessage.user("look at this", image_refs=("self",))], [])
    content = seen["messages"][0]["content"]
    assert content[0] == {"type": "text", "text": "look at this"}
    assert content[1]["image_url"]["url"] == "data:image/png;base64,UE5HOA=="
