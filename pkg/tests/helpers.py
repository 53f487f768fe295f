"""Shared test generators and oracles."""

from __future__ import annotations

import math
import random
import string
import struct
from typing import Any

from embark.msgbus.envelope import Envelope, Kind, REPLY_KINDS

_TOPIC_ALPHABET = string.ascii_lowercase + string.digits + "_"
_TEXT_POOL = (
    string.ascii_letters + string.digits + " _-/.,:;!?" + "éüßñ" + "☃é世界"
)


def random_topic(rng: random.Random) -> str:
    segments = rng.randint(1, 3)
    return "/".join(
        "".join(rng.choice(_TOPIC_ALPHABET) for _ in range(rng.randint(1, 8)))
        for _ in range(segments)
    )


def random_text(rng: random.Random, max_len: int = 24) -> str:
    return "".join(rng.choice(_TEXT_POOL) for _ in range(rng.randint(0, max_len)))


def random_finite_float(rng: random.Random) -> float:
    while True:
        value = struct.unpack("<d", struct.pack("<Q", rng.getrandbits(64)))[0]
        if math.isfinite(value):
            return value


def random_document(rng: random.Random, depth: int = 0) -> Any:
    choices = ["str", "int", "float", "bool", "null"]
    if depth < 3:
        choices += ["map", "list"]
    pick = rng.choice(choices)
    if pick == "str":
        return random_text(rng)
    if pick == "int":
        return rng.randint(-(2**53), 2**53)
    if pick == "float":
        return random_finite_float(rng)
    if pick == "bool":
        return rng.random() < 0.5
    if pick == "null":
        return None
    if pick == "list":
        return [random_document(rng, depth + 1) for _ in range(rng.randint(0, 4))]
    return {
        random_text(rng, 8) or "k": random_document(rng, depth + 1)
        for _ in range(rng.randint(0, 4))
    }


def random_envelope(rng: random.Random) -> Envelope:
    kind = rng.choice(list(Kind))
    corr = f"corr-{rng.getrandbits(48):012x}" if kind in REPLY_KINDS else None
    return Envelope(
        kind=kind,
        id=f"id-{rng.getrandbits(48):012x}",
        topic=random_topic(rng),
        ts=rng.randint(0, 2**48),
        payload=random_document(rng),
        corr=corr,
    )
