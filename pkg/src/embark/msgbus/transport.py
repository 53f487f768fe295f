"""Network transport: remote access to a bus over newline-delimited frames.

A :class:`WireSession` is framing-agnostic session logic shared by the raw
TCP server here and the WebSocket bridge in :mod:`embark.service`. Inbound
frames are injected into the local bus; envelopes on the session's forward
topics flow back out. There is no subscribe frame in the protocol, so what
a remote peer sees is fixed server-side by ``forward_topics``.

Inbound handling:

* ``pub``       -- published locally on its topic.
* ``srv_req``   -- calls the local service; replies ``srv_res`` (or an
  error report on the error topic).
* ``act_goal``  -- submits the goal; accept/feedback/result frames are
  relayed back as the goal progresses.
* reply kinds   -- not valid inbound; reported as errors.

Malformed frames produce one ``pub`` frame on ``bridge/errors`` addressed
only to the offending peer; the connection stays open.
"""

from __future__ import annotations

import logging
import socket
import threading
from typing import Any, Callable, Optional, Sequence

from embark.msgbus.bus import MessageBus, Subscription
from embark.msgbus.envelope import Envelope, Kind
from embark.msgbus.errors import BusError, MalformedFrame
from embark.msgbus.wire import decode_envelope, encode_envelope

logger = logging.getLogger(__name__)

ERROR_TOPIC = "bridge/errors"
SERVICE_TIMEOUT_MS = 5000


class WireSession:
    """One remote peer attached to a local bus."""

    def __init__(self, bus: MessageBus, forward_topics: Sequence[str] = ()) -> None:
        self.bus = bus
        self._subs: list[Subscription] = [bus.subscribe(t) for t in forward_topics]
        self._goals: dict[str, Any] = {}
        self._lock = threading.Lock()

    def handle_frame(self, frame: bytes | str) -> list[Envelope]:
        """Process one inbound frame, returning frames owed to this peer."""
        try:
            env = decode_envelope(frame)
        except MalformedFrame as exc:
            return [self._error_frame(f"malformed frame: {exc}")]
        try:
            return self._dispatch(env)
        except BusError as exc:
            return [self._error_frame(f"{type(exc).__name__}: {exc}", corr_id=env.id)]

    def _dispatch(self, env: Envelope) -> list[Envelope]:
        if env.kind is Kind.PUB:
            self.bus.publish(env.topic, env.payload)
            return []
        if env.kind is Kind.SRV_REQ:
            response = self.bus.call_service(env.topic, env.payload, SERVICE_TIMEOUT_MS)
            return [
                Envelope(
                    kind=Kind.SRV_RES,
                    id=self._new_id(),
                    topic=env.topic,
                    ts=self.bus.clock.now_ms(),
                    payload=response,
                    corr=env.id,
                )
            ]
        if env.kind is Kind.ACT_GOAL:
            handle = self.bus.send_goal(env.topic, env.payload)
            with self._lock:
                self._goals[handle.goal_id] = handle
            accepted = handle.status.value != "rejected"
            return [
                Envelope(
                    kind=Kind.ACT_ACCEPT,
                    id=self._new_id(),
                    topic=env.topic,
                    ts=self.bus.clock.now_ms(),
                    payload={"accepted": accepted, "goal_id": handle.goal_id},
                    corr=env.id,
                )
            ]
        return [self._error_frame(f"kind {env.kind.value!r} is not valid inbound", corr_id=env.id)]

    def pending_outbound(self) -> list[Envelope]:
        """Frames to push to the peer: forwarded topics plus goal progress."""
        out: list[Envelope] = []
        for sub in self._subs:
            out.extend(sub.drain())
        with self._lock:
            goals = list(self._goals.items())
        for goal_id, handle in goals:
            out.extend(handle.feedback.drain())
            res = handle.result()
            if res is not None:
                status, result = res
                out.append(
                    Envelope(
                        kind=Kind.ACT_RESULT,
                        id=self._new_id(),
                        topic=handle.action,
                        ts=self.bus.clock.now_ms(),
                        payload={"status": status.value, "result": result},
                        corr=goal_id,
                    )
                )
                with self._lock:
                    self._goals.pop(goal_id, None)
        return out

    def close(self) -> None:
        for sub in self._subs:
            sub.close()

    def _new_id(self) -> str:
        return self.bus._new_id()

    def _error_frame(self, message: str, corr_id: Optional[str] = None) -> Envelope:
        payload: dict[str, Any] = {"error": message}
        if corr_id is not None:
            payload["for"] = corr_id
        return Envelope(
            kind=Kind.PUB,
            id=self._new_id(),
            topic=ERROR_TOPIC,
            ts=self.bus.clock.now_ms(),
            payload=payload,
        )


class TcpBridgeServer:
    """Serves the wire protocol on a TCP port, one WireSession per client.

    Threaded and wall-clock only; deterministic scenario runs never use it.
    """

    def __init__(
        self,
        bus: MessageBus,
        host: str = "127.0.0.1",
        port: int = 0,
        forward_topics: Sequence[str] = (),
        poll_interval_s: float = 0.02,
    ) -> None:
        self.bus = bus
        self.forward_topics = tuple(forward_topics)
        self._poll = poll_interval_s
        self._sock = socket.create_server((host, port))
        self.address = self._sock.getsockname()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)

    def start(self) -> None:
        self._accept_thread.start()

    def stop(self) -> None:
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass
        for t in self._threads:
            t.join(timeout=1.0)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _addr = self._sock.accept()
            except OSError:
                return
            t = threading.Thread(target=self._serve_client, args=(conn,), daemon=True)
            self._threads.append(t)
            t.start()

    def _serve_client(self, conn: socket.socket) -> None:
        session = WireSession(self.bus, self.forward_topics)
        conn.settimeout(self._poll)
        buffer = b""
        write_lock = threading.Lock()

        def send(frames: list[Envelope]) -> None:
            with write_lock:
                for env in frames:
                    conn.sendall(encode_envelope(env))

        try:
            while not self._stop.is_set():
                send(session.pending_outbound())
                try:
                    data = conn.recv(65536)
                except socket.timeout:
                    continue
                except OSError:
                    break
                if not data:
                    break
                buffer += data
                while b"\n" in buffer:
                    line, buffer = buffer.split(b"\n", 1)
                    if line.strip():
                        send(session.handle_frame(line))
        finally:
            session.close()
            try:
                conn.close()
            except OSError:
                pass


class TcpBridgeClient:
    """Minimal blocking client for the TCP bridge (tests, remote tools)."""

    def __init__(self, host: str, port: int, timeout_s: float = 5.0) -> None:
        self._sock = socket.create_connection((host, port), timeout=timeout_s)
        self._file = self._sock.makefile("rb")
        self._new_id = _counter_ids("client")

    def send(self, envelope: Envelope) -> None:
        self._sock.sendall(encode_envelope(envelope))

    def publish(self, topic: str, payload: Any, ts: int = 0) -> None:
        self.send(Envelope(kind=Kind.PUB, id=self._new_id(), topic=topic, ts=ts, payload=payload))

    def recv(self) -> Envelope:
        line = self._file.readline()
        if not line:
            raise ConnectionError("bridge closed the connection")
        return decode_envelope(line)

    def close(self) -> None:
        try:
            self._file.close()
            self._sock.close()
        except OSError:
            pass


def _counter_ids(prefix: str) -> Callable[[], str]:
    n = 0

    def make() -> str:
        nonlocal n
        n += 1
        return f"{prefix}_{n}"

    return make
