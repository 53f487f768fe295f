"""Chunking arithmetic, exact retrieval vs brute force, prompts, assets."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from embark.identity import (
    EmptyDocument,
    EmptyStore,
    IdentityBundle,
    SourceDocument,
    UnknownAsset,
    WrongKind,
    attach_self_image,
    build_system_prompt,
    chunk_spans,
    ingest,
    load_bundle,
    opening_user_message,
)
from embark.identity.bundle import Asset, AssetKind, EmbodimentCondition
from embark.llm.embeddings import HashEmbedder


def spans_oracle(length: int, size: int, overlap: int) -> list[tuple[int, int]]:
    """Independent tiling oracle: ceil(max(L-ov,1)/step) chunks at k*step."""
    step = size - overlap
    count = max(1, math.ceil(max(length - overlap, 1) / step))
    out = []
    for k in range(count):
        start = k * step
        end = length if k == count - 1 else min(start + size, length)
        out.append((start, end))
    return out


# -- chunking -------------------------------------------------------------------


def test_chunk_count_formula_doc250():
    spans = chunk_spans(250, 100, 20)
    assert spans == spans_oracle(250, 100, 20)
    assert [s for s, _ in spans] == [0, 80, 160]
    assert spans[-1][1] == 250


def test_single_chunk_short_doc():
    assert chunk_spans(50, 100, 20) == [(0, 50)]


def test_exact_size_doc_is_one_chunk():
    # ceil(max(100-20,1)/80) == 1: no trailing sliver past full coverage.
    assert chunk_spans(100, 100, 20) == [(0, 100)]


def test_tiling_covers_body_with_exact_overlaps():
    rng = random.Random(3)
    for _ in range(200):
        size = rng.randint(32, 200)
        overlap = rng.randint(0, size - 1)
        length = rng.randint(1, 1000)
        spans = chunk_spans(length, size, overlap)
        assert spans[0][0] == 0 and spans[-1][1] == length
        for (s0, e0), (s1, e1) in zip(spans, spans[1:]):
            assert s1 == s0 + (size - overlap)
            assert s1 <= e0  # next start never skips uncovered text
            if e0 != length:
                assert e0 - s1 == overlap
        covered = set()
        for s, e in spans:
            covered.update(range(s, e))
        assert covered == set(range(length))


def test_chunk_params_validated():
    with pytest.raises(ValueError):
        chunk_spans(10, 16, 0)  # below minimum size
    with pytest.raises(ValueError):
        chunk_spans(10, 64, 64)
    with pytest.raises(ValueError):
        chunk_spans(10, 64, -1)


def test_ingest_rejects_empty_document():
    with pytest.raises(EmptyDocument):
        ingest([SourceDocument("d", "t", "")])


def test_ingest_chunks_carry_text_slices():
    body = "x" * 120 + "y" * 120
    store = ingest([SourceDocument("d", "t", body)], size=100, overlap=20)
    for chunk in store.chunks:
        s, e = chunk.span
        assert chunk.text == body[s:e]


# -- retrieval -------------------------------------------------------------------


def brute_force_topk(store, question: str, k: int):
    """Full-scan oracle with the same tie-break, pure-python selection."""
    qvec = store.embedder.embed([question])[0]
    qnorm = math.sqrt(float(np.dot(qvec, qvec)))
    scored = []
    for i, chunk in enumerate(store.chunks):
        vec = store._vectors[i]
        denom = qnorm * math.sqrt(float(np.dot(vec, vec)))
        score = float(np.dot(qvec, vec)) / denom if denom else 0.0
        scored.append((chunk, score))
    ordered = sorted(scored, key=lambda cs: (-cs[1], cs[0].doc_id, cs[0].seq))
    return ordered[: min(k, len(ordered))]


WORDS = ["robot", "camera", "wheel", "red", "cube", "table", "orchard", "row",
         "sensor", "lidar", "arm", "gripper", "battery", "motor", "frame"]


def random_store(rng: random.Random, n_docs: int = 6):
    docs = []
    for d in range(n_docs):
        body = " ".join(rng.choice(WORDS) for _ in range(rng.randint(40, 300)))
        docs.append(SourceDocument(f"doc{d}", f"doc{d}", body))
    return ingest(docs, size=rng.choice([32, 64, 100]), overlap=rng.choice([0, 8, 16]))


def test_query_exact_text_scores_one():
    store = ingest([SourceDocument("d", "t", "the quick brown fox jumps")], size=32, overlap=0)
    (top, score), *_ = store.query("the quick brown fox jumps", 1)
    assert top.doc_id == "d" and abs(score - 1.0) <= 1e-9


def test_query_k_larger_than_store_returns_all():
    store = ingest([SourceDocument("d", "t", "a b c")], size=32, overlap=0)
    assert len(store.query("a", 10)) == len(store)


def test_query_empty_store_raises():
    store = ingest([])
    with pytest.raises(EmptyStore):
        store.query("x", 1)


def test_query_matches_brute_force_on_random_stores():
    rng = random.Random(11)
    for _ in range(10):
        store = random_store(rng)
        question = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 10)))
        for k in (1, 5, len(store) + 10):
            got = store.query(question, k)
            want = brute_force_topk(store, question, k)
            assert [(c.doc_id, c.seq) for c, _ in got] == [(c.doc_id, c.seq) for c, _ in want]
            assert [s for _, s in got] == pytest.approx([s for _, s in want], abs=0)


def test_tie_break_by_doc_then_seq():
    # Two identical bodies produce identical vectors; order must follow ids.
    docs = [SourceDocument("b", "b", "same text here"), SourceDocument("a", "a", "same text here")]
    store = ingest(docs, size=32, overlap=0)
    got = store.query("same text here", 2)
    assert [c.doc_id for c, _ in got] == ["a", "b"]


# -- prompts and assets ------------------------------------------------------------


def make_bundle(tmp_path, with_image=True) -> IdentityBundle:
    assets = {}
    if with_image:
        img = tmp_path / "self.png"
        img.write_bytes(b"\x89PNG fake")
        assets["self"] = Asset("self", AssetKind.IMAGE, img)
    body = tmp_path / "frame.txt"
    body.write_text("frame description")
    assets["frame"] = Asset("frame", AssetKind.BODY_DESCRIPTION, body)
    return IdentityBundle("I am a field robot.", "Never exceed 2 m/s.", None, assets)


def test_prompt_contains_identity_verbatim(tmp_path):
    bundle = make_bundle(tmp_path)
    prompt = build_system_prompt(bundle, include_rules=False)
    assert "I am a field robot." in prompt
    assert "Never exceed" not in prompt


def test_prompt_includes_rules_after_identity(tmp_path):
    prompt = build_system_prompt(make_bundle(tmp_path), include_rules=True)
    assert prompt.index("I am a field robot.") < prompt.index("Never exceed 2 m/s.")
    assert "query_identity" in prompt


def test_prompt_is_deterministic(tmp_path):
    bundle = make_bundle(tmp_path)
    assert build_system_prompt(bundle) == build_system_prompt(bundle)


def test_attach_self_image_conditions(tmp_path):
    bundle = make_bundle(tmp_path)
    condition = attach_self_image(bundle, "self")
    msg = opening_user_message(condition, "anomaly ahead")
    assert msg.image_refs == ("self",)
    plain = opening_user_message(EmbodimentCondition(), "anomaly ahead")
    assert plain.image_refs == ()


def test_attach_missing_or_wrong_kind(tmp_path):
    bundle = make_bundle(tmp_path)
    with pytest.raises(UnknownAsset):
        attach_self_image(bundle, "ghost")
    with pytest.raises(WrongKind):
        attach_self_image(bundle, "frame")


def test_load_bundle_directory(tmp_path):
    (tmp_path / "identity.txt").write_text("I am a test rig.")
    (tmp_path / "rules.txt").write_text("Be careful.")
    docs = tmp_path / "docs"
    docs.mkdir()
    (docs / "sensors.txt").write_text("camera and lidar on the mast " * 20)
    (docs / "notes.md").write_text("wheel diameter twenty centimeters " * 20)
    (docs / "ignored.bin").write_bytes(b"\x00")
    assets = tmp_path / "assets"
    assets.mkdir()
    (assets / "self.png").write_bytes(b"png")
    (assets / "manifest.json").write_text('{"self": {"kind": "image", "file": "self.png"}}')

    bundle = load_bundle(tmp_path, embedder=HashEmbedder())
    assert bundle.identity_text.startswith("I am a test rig.")
    assert bundle.rules_text.startswith("Be careful.")
    assert bundle.store is not None and len(bundle.store) >= 2
    assert bundle.asset("self").kind is AssetKind.IMAGE
    (top, _), *_ = bundle.store.query("lidar camera mast", 1)
    assert top.doc_id == "sensors"
