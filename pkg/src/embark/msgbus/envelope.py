"""The universal message unit and action lifecycle states."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from embark.msgbus.errors import InvalidTopic

WIRE_VERSION = 1

_TOPIC_SEGMENT = re.compile(r"[a-z0-9_]+\Z")


class Kind(str, Enum):
    """Message kinds carried on the bus; the `str` value is the wire form."""

    PUB = "pub"
    SRV_REQ = "srv_req"
    SRV_RES = "srv_res"
    ACT_GOAL = "act_goal"
    ACT_ACCEPT = "act_accept"
    ACT_FEEDBACK = "act_feedback"
    ACT_RESULT = "act_result"


# Kinds that reply to an earlier message and therefore must carry `corr`.
REPLY_KINDS = frozenset({Kind.SRV_RES, Kind.ACT_ACCEPT, Kind.ACT_FEEDBACK, Kind.ACT_RESULT})


class ActionStatus(str, Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    EXECUTING = "executing"
    SUCCEEDED = "succeeded"
    ABORTED = "aborted"
    CANCELED = "canceled"


TERMINAL_STATUSES = frozenset(
    {ActionStatus.REJECTED, ActionStatus.SUCCEEDED, ActionStatus.ABORTED, ActionStatus.CANCELED}
)

# Legal transition graph; terminal states have no successors.
ACTION_TRANSITIONS: dict[ActionStatus, frozenset[ActionStatus]] = {
    ActionStatus.PENDING: frozenset({ActionStatus.ACCEPTED, ActionStatus.REJECTED}),
    ActionStatus.ACCEPTED: frozenset({ActionStatus.EXECUTING}),
    ActionStatus.EXECUTING: frozenset(
        {ActionStatus.SUCCEEDED, ActionStatus.ABORTED, ActionStatus.CANCELED}
    ),
    ActionStatus.REJECTED: frozenset(),
    ActionStatus.SUCCEEDED: frozenset(),
    ActionStatus.ABORTED: frozenset(),
    ActionStatus.CANCELED: frozenset(),
}


def is_legal_status_path(path: list[ActionStatus]) -> bool:
    """True when `path` is a walk in the action transition graph from PENDING."""
    if not path or path[0] is not ActionStatus.PENDING:
        return False
    for prev, nxt in zip(path, path[1:]):
        if nxt not in ACTION_TRANSITIONS[prev]:
            return False
    return True


def validate_topic(topic: str) -> str:
    """Check a channel name: non-empty '/'-separated segments of [a-z0-9_]."""
    if not isinstance(topic, str) or not topic:
        raise InvalidTopic("topic must be a non-empty string")
    for segment in topic.split("/"):
        if not _TOPIC_SEGMENT.match(segment):
            raise InvalidTopic(f"malformed topic {topic!r}")
    return topic


@dataclass(frozen=True)
class Envelope:
    """One message on the bus.

    `corr` holds the id of the request or goal this message replies to and
    is present exactly for the reply kinds (SRV_RES, ACT_ACCEPT,
    ACT_FEEDBACK, ACT_RESULT).
    """

    kind: Kind
    id: str
    topic: str
    ts: int
    payload: Any
    corr: Optional[str] = None
    version: int = field(default=WIRE_VERSION)

    def __post_init__(self) -> None:
        validate_topic(self.topic)
        if self.kind in REPLY_KINDS:
            if not self.corr:
                raise ValueError(f"{self.kind.value} envelope requires corr")
        elif self.corr is not None:
            raise ValueError(f"{self.kind.value} envelope must not carry corr")
        if not self.id:
            raise ValueError("envelope id must be non-empty")
