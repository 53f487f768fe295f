"""Bus error types."""

from __future__ import annotations


class BusError(Exception):
    """Base class for all bus failures."""


class InvalidTopic(BusError):
    """Topic name is empty or malformed."""


class ServiceNotFound(BusError):
    """No handler registered under the requested service name."""


class DuplicateService(BusError):
    """A handler is already registered under this name."""


class Timeout(BusError):
    """The handler did not respond within the caller's deadline."""


class HandlerError(BusError):
    """The handler signalled failure; the message carries its reason."""


class ActionServerNotFound(BusError):
    """No action server registered on the requested channel."""


class AlreadyTerminal(BusError):
    """The goal already reached a terminal status."""


class MalformedFrame(BusError):
    """A wire frame could not be decoded into a valid envelope."""
