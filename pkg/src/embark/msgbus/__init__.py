"""Connector layer: publish-subscribe, services, and actions.

Three communication modes over one channel namespace:

* publish/subscribe -- best effort, bounded per-subscription queues;
* services -- request/response with a definite outcome (result, timeout,
  or failure) for every call;
* actions -- long-running goals with an acceptance decision, streamed
  feedback, and exactly one terminal result.
"""

from embark.msgbus.envelope import (
    ActionStatus,
    Envelope,
    Kind,
    TERMINAL_STATUSES,
    validate_topic,
)
from embark.msgbus.errors import (
    ActionServerNotFound,
    AlreadyTerminal,
    BusError,
    DuplicateService,
    HandlerError,
    InvalidTopic,
    MalformedFrame,
    ServiceNotFound,
    Timeout,
)
from embark.msgbus.wire import decode_envelope, encode_envelope
from embark.msgbus.bus import MessageBus, ServiceRegistration, Subscription
from embark.msgbus.actions import ActionServer, GoalContext, GoalHandle

__all__ = [
    "ActionServer",
    "ActionServerNotFound",
    "ActionStatus",
    "AlreadyTerminal",
    "BusError",
    "DuplicateService",
    "Envelope",
    "GoalContext",
    "GoalHandle",
    "HandlerError",
    "InvalidTopic",
    "Kind",
    "MalformedFrame",
    "MessageBus",
    "ServiceNotFound",
    "ServiceRegistration",
    "Subscription",
    "TERMINAL_STATUSES",
    "Timeout",
    "decode_envelope",
    "encode_envelope",
    "validate_topic",
]
