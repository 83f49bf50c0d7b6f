from __future__ import annotations

import shutil
import socket
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import pytest
import uvicorn

from proxicast.calibration import default_profile, default_profile_bytes
from proxicast.server.app import create_app
from proxicast.server.config import ServerConfig
from proxicast.server.eventlog import MemoryEventLog
from proxicast.server.rooms import RoomRegistry

REPO_ROOT = Path(__file__).resolve().parents[1]
STUDY_DIR = REPO_ROOT / "src" / "proxicast" / "data" / "study"


class FakeClock:
    def __init__(self, start: float = 0.0):
        self.t = start

    def __call__(self) -> float:
        return self.t

    def advance(self, dt: float) -> float:
        self.t += dt
        return self.t


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def profile_path(tmp_path) -> Path:
    path = tmp_path / "profile.json"
    path.write_bytes(default_profile_bytes())
    return path


@pytest.fixture
def registry(clock) -> RoomRegistry:
    return RoomRegistry(
        default_profile().slots,
        clock=clock,
        event_sink=MemoryEventLog(),
    )


@pytest.fixture
def study_events_path(tmp_path) -> Path:
    dest = tmp_path / "events.jsonl"
    shutil.copy(STUDY_DIR / "events.jsonl", dest)
    return dest


@pytest.fixture
def study_declarations_path(tmp_path) -> Path:
    dest = tmp_path / "declarations.json"
    shutil.copy(STUDY_DIR / "declarations.json", dest)
    return dest


@dataclass
class LiveServer:
    """A real uvicorn server on an ephemeral port, run in a daemon thread."""

    addr: str
    app: object
    server: uvicorn.Server
    event_log_path: Path

    @property
    def ws_url(self) -> str:
        return f"ws://{self.addr}/ws"

    @property
    def http_url(self) -> str:
        return f"http://{self.addr}"

    @property
    def registry(self):
        return self.app.state.registry


def start_live_server(config: ServerConfig) -> tuple[LiveServer, threading.Thread, socket.socket]:
    sock = socket.create_server(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    app = create_app(config)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning", lifespan="on"))
    thread = threading.Thread(target=server.run, kwargs={"sockets": [sock]}, daemon=True)
    thread.start()
    deadline = time.time() + 10.0
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)
    live = LiveServer(f"127.0.0.1:{port}", app, server, Path(config.event_log or ""))
    return live, thread, sock


@pytest.fixture
def live_server(profile_path, tmp_path):
    config = ServerConfig(
        calibration_profile=str(profile_path),
        event_log=str(tmp_path / "events.jsonl"),
    )
    live, thread, sock = start_live_server(config)
    try:
        yield live
    finally:
        live.server.should_exit = True
        thread.join(timeout=10.0)
        sock.close()
