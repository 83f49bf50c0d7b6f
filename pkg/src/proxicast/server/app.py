"""FastAPI transport: the websocket wire protocol plus profile endpoints.

Each room is guarded by one asyncio lock held across mutate-and-broadcast,
which serializes per-room mutations in arrival order while letting distinct
rooms progress concurrently.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import time
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request, Response, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from ..calibration import ProfileError, load_profile, save_profile
from ..layout import RotationDirection
from .config import ServerConfig
from .eventlog import JsonlEventLog
from .protocol import (
    ALL_TYPES,
    PROTOCOL_VERSION,
    ErrorCode,
    GesturePayload,
    JoinPayload,
    LayoutSetPayload,
    ProtocolError,
    RotatePayload,
    WireMessage,
    make_error,
)
from .rooms import Outbound, RoomRegistry


def create_app(config: ServerConfig, *, clock: Callable[[], float] = time.time) -> FastAPI:
    profile_path = Path(config.calibration_profile)
    profile = load_profile(profile_path.read_bytes())
    event_sink = JsonlEventLog(config.event_log) if config.event_log else None
    registry = RoomRegistry(
        profile.slots,
        policy=config.gain_policy.to_policy(),
        room_cap=config.room_cap,
        idle_timeout_s=config.idle_timeout_s,
        gesture_map=config.gesture_map,
        clock=clock,
        event_sink=event_sink,
    )

    locks: dict[str, asyncio.Lock] = {}
    conns: dict[tuple[str, str], WebSocket] = {}

    def room_lock(room_id: str) -> asyncio.Lock:
        if room_id not in locks:
            locks[room_id] = asyncio.Lock()
        return locks[room_id]

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        interval = min(30.0, max(config.idle_timeout_s / 2.0, 0.05))

        async def sweeper():
            while True:
                await asyncio.sleep(interval)
                registry.sweep()

        task = asyncio.create_task(sweeper())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task
            if event_sink is not None:
                event_sink.close()

    app = FastAPI(title="proxicast", lifespan=lifespan)
    app.state.registry = registry

    async def deliver(room_id: str, outbound: list[Outbound]) -> None:
        for ob in outbound:
            ws = conns.get((room_id, ob.to))
            if ws is None:
                continue
            try:
                await ws.send_text(json.dumps(ob.message))
            except Exception:
                # The recipient raced a disconnect; its own close handler
                # will run leave() and clean up.
                pass

    async def send_error(ws: WebSocket, code: str, message: str) -> None:
        with contextlib.suppress(Exception):
            await ws.send_text(json.dumps(make_error(code, message)))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/profile")
    def get_profile():
        try:
            current = load_profile(profile_path.read_bytes())
        except (OSError, ProfileError) as exc:
            return JSONResponse(
                status_code=500, content={"error": "profile-unreadable", "detail": str(exc)}
            )
        return Response(content=save_profile(current), media_type="application/json")

    @app.put("/profile")
    async def put_profile(request: Request):
        body = await request.body()
        try:
            new_profile = load_profile(body)
        except ProfileError as exc:
            return JSONResponse(
                status_code=422,
                content={"error": "invalid-profile", "problems": exc.problems},
            )
        profile_path.write_bytes(save_profile(new_profile))
        # Recalibration applies to rooms created from now on.
        registry.update_slots(new_profile.slots)
        return {"status": "saved", "slots": len(new_profile.slots)}

    @app.get("/rooms/{room_id}")
    def room_state(room_id: str):
        room = registry.room(room_id)
        if room is None:
            return JSONResponse(status_code=404, content={"error": "no-such-room"})
        snap = room.layout_snapshot()
        return {
            "room": room_id,
            "seq": room.seq,
            "viewer": room.viewer_id,
            "members": room.members_payload(),
            "layout": snap,
            "digest": registry.state_digest(room_id),
        }

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        joined_room: str | None = None
        pid: str | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = WireMessage.model_validate(json.loads(raw))
                except (ValueError, ValidationError):
                    await send_error(ws, ErrorCode.BAD_MESSAGE, "malformed message")
                    continue
                if msg.v != PROTOCOL_VERSION:
                    await send_error(
                        ws,
                        ErrorCode.UNSUPPORTED_VERSION,
                        f"protocol v{PROTOCOL_VERSION} required, got v{msg.v}",
                    )
                    await ws.close(code=1002)
                    break
                if msg.type not in ALL_TYPES:
                    await send_error(
                        ws, ErrorCode.UNKNOWN_TYPE, f"unknown message type {msg.type!r}"
                    )
                    continue

                if msg.type == "join":
                    if joined_room is not None:
                        await send_error(
                            ws, ErrorCode.ALREADY_JOINED, "this connection already joined"
                        )
                        continue
                    if not msg.room or not msg.from_:
                        await send_error(
                            ws, ErrorCode.BAD_MESSAGE, "join needs room and from"
                        )
                        continue
                    try:
                        payload = JoinPayload.model_validate(msg.payload or {})
                    except ValidationError as exc:
                        await send_error(ws, ErrorCode.BAD_MESSAGE, f"bad join payload: {exc}")
                        continue
                    async with room_lock(msg.room):
                        try:
                            out = registry.join(
                                msg.room, msg.from_, payload.display_name, payload.observer
                            )
                        except ProtocolError as exc:
                            await send_error(ws, exc.code, str(exc))
                            continue
                        joined_room, pid = msg.room, msg.from_
                        conns[(joined_room, pid)] = ws
                        await deliver(joined_room, out)
                    continue

                if joined_room is None or pid is None:
                    await send_error(ws, ErrorCode.NOT_JOINED, "join a room first")
                    continue

                if msg.type == "signal":
                    if msg.to is None:
                        await send_error(ws, ErrorCode.BAD_MESSAGE, "signal needs to")
                        continue
                    async with room_lock(joined_room):
                        try:
                            out = registry.relay(joined_room, pid, msg.to, msg.payload)
                        except ProtocolError as exc:
                            await send_error(ws, exc.code, str(exc))
                            continue
                        target = conns.get((joined_room, msg.to))
                        delivered = False
                        if target is not None:
                            try:
                                await target.send_text(json.dumps(out[0].message))
                                delivered = True
                            except Exception:
                                delivered = False
                        if not delivered:
                            await send_error(
                                ws, ErrorCode.NO_SUCH_PEER, f"peer {msg.to!r} is gone"
                            )
                    continue

                if msg.type == "layout-rotate":
                    try:
                        payload = RotatePayload.model_validate(msg.payload or {})
                    except ValidationError as exc:
                        await send_error(ws, ErrorCode.BAD_MESSAGE, f"bad rotate payload: {exc}")
                        continue
                    async with room_lock(joined_room):
                        await deliver(
                            joined_room,
                            registry.rotate(
                                joined_room,
                                RotationDirection(payload.direction),
                                source="ui",
                            ),
                        )
                    continue

                if msg.type == "gesture-event":
                    try:
                        payload = GesturePayload.model_validate(msg.payload or {})
                    except ValidationError as exc:
                        await send_error(
                            ws, ErrorCode.BAD_MESSAGE, f"bad gesture payload: {exc}"
                        )
                        continue
                    async with room_lock(joined_room):
                        try:
                            out = registry.gesture(joined_room, payload.direction)
                        except ProtocolError as exc:
                            await send_error(ws, exc.code, str(exc))
                            continue
                        await deliver(joined_room, out)
                    continue

                if msg.type == "layout-set":
                    try:
                        payload = LayoutSetPayload.model_validate(msg.payload or {})
                    except ValidationError as exc:
                        await send_error(ws, ErrorCode.BAD_MESSAGE, f"bad set payload: {exc}")
                        continue
                    async with room_lock(joined_room):
                        try:
                            out = registry.set_slot(
                                joined_room, payload.participant, payload.slot
                            )
                        except ProtocolError as exc:
                            await send_error(ws, exc.code, str(exc))
                            continue
                        await deliver(joined_room, out)
                    continue

                # Remaining known types are server-to-client only.
                await send_error(
                    ws, ErrorCode.BAD_MESSAGE, f"{msg.type!r} is a server-sent type"
                )
        except WebSocketDisconnect:
            pass
        finally:
            if joined_room is not None and pid is not None:
                async with room_lock(joined_room):
                    conns.pop((joined_room, pid), None)
                    await deliver(joined_room, registry.leave(joined_room, pid))

    return app
