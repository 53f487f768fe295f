"""Live service: WebSocket bridge plus a small REST surface.

The bridge speaks exactly the bus wire protocol, one envelope per
WebSocket text frame. Inbound console frames become bus traffic (chat
goes to ``hri/in``); the console receives ``hri/out``, ``mission/status``,
and periodic ``world/snapshot`` frames. Malformed frames earn an error
frame on ``bridge/errors`` and the connection stays open.
"""

from __future__ import annotations

import asyncio
import logging
import threading
from pathlib import Path
from typing import Optional, Sequence

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from embark.msgbus.transport import WireSession
from embark.msgbus.wire import encode_envelope
from embark.scenario.runner import ScenarioRunner

logger = logging.getLogger(__name__)

FORWARD_TOPICS = ("hri/out", "mission/status", "world/snapshot", "anomaly/events")
POLL_INTERVAL_S = 0.02


class HealthResponse(BaseModel):
    status: str
    scenario: str
    tick: int
    live: bool


class AgentInfo(BaseModel):
    id: str
    type: str
    state: str


class ScenarioInfo(BaseModel):
    name: str
    world: str
    max_ticks: int
    tick: int
    agents: list[AgentInfo]
    forward_topics: list[str]


def create_app(
    runner: ScenarioRunner,
    forward_topics: Sequence[str] = FORWARD_TOPICS,
    console_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="embark bridge")
    topics = tuple(forward_topics)
    agent_types = {spec.id: spec.type for spec in runner.config.agents}

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok",
            scenario=runner.config.name,
            tick=runner.world.tick,
            live=runner.live,
        )

    @app.get("/scenario", response_model=ScenarioInfo)
    def scenario() -> ScenarioInfo:
        return ScenarioInfo(
            name=runner.config.name,
            world=runner.config.world_file.name,
            max_ticks=runner.config.max_ticks,
            tick=runner.world.tick,
            agents=[
                AgentInfo(id=a.id, type=agent_types.get(a.id, "?"), state=a.state.value)
                for a in runner.agents
            ],
            forward_topics=list(topics),
        )

    @app.websocket("/ws")
    async def bridge(websocket: WebSocket) -> None:
        await websocket.accept()
        session = WireSession(runner.bus, topics)

        async def send_all(frames) -> None:
            for env in frames:
                await websocket.send_text(encode_envelope(env).decode("utf-8").rstrip("\n"))

        try:
            while True:
                await send_all(session.pending_outbound())
                try:
                    text = await asyncio.wait_for(
                        websocket.receive_text(), timeout=POLL_INTERVAL_S
                    )
                except asyncio.TimeoutError:
                    continue
                for line in text.splitlines():
                    if line.strip():
                        await send_all(session.handle_frame(line))
        except WebSocketDisconnect:
            pass
        finally:
            session.close()

    if console_dir is not None and (console_dir / "index.html").is_file():
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")

    return app


class LiveService:
    """Scenario loop on a background thread plus the FastAPI app."""

    def __init__(
        self,
        runner: ScenarioRunner,
        forward_topics: Sequence[str] = FORWARD_TOPICS,
        console_dir: Optional[Path] = None,
    ):
        self.runner = runner
        self.app = create_app(runner, forward_topics, console_dir)
        self._thread: Optional[threading.Thread] = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self.runner.run, daemon=True)
        self._thread.start()

    def stop(self, timeout_s: float = 5.0) -> None:
        self.runner.stop()
        if self._thread is not None:
            self._thread.join(timeout=timeout_s)


def serve(
    runner: ScenarioRunner, host: str, port: int, console_dir: Optional[Path] = None
) -> None:
    """Run the bridge under uvicorn until interrupted (CLI entry)."""
    import uvicorn

    service = LiveService(runner, console_dir=console_dir)
    service.start()
    try:
        uvicorn.run(service.app, host=host, port=port, log_level="warning")
    finally:
        service.stop()
