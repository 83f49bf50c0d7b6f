"""Wire protocol: JSON messages over a full-duplex ordered text channel.

Envelope fields, exactly as they appear on the wire: v, type, seq, room,
from, to, payload. seq is present only on server broadcasts and increases
strictly per room. Signal payloads are opaque: the server relays them
without inspection or transformation.

volume-update is a recognized broadcast type, but in practice every
layout-state broadcast already embeds the full recomputed gain map, so the
server never needs to emit one on its own.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field

PROTOCOL_VERSION = 1

CLIENT_TYPES = frozenset({"join", "signal", "layout-set", "layout-rotate", "gesture-event"})
SERVER_TYPES = frozenset(
    {"joined", "peer-joined", "peer-left", "layout-state", "volume-update", "error"}
)
ALL_TYPES = CLIENT_TYPES | SERVER_TYPES


class ErrorCode:
    BAD_MESSAGE = "bad-message"
    UNSUPPORTED_VERSION = "unsupported-version"
    UNKNOWN_TYPE = "unknown-type"
    DUPLICATE_ID = "duplicate-id"
    ROOM_FULL = "room-full"
    NOT_JOINED = "not-joined"
    ALREADY_JOINED = "already-joined"
    NO_SUCH_ROOM = "no-such-room"
    NO_SUCH_PEER = "no-such-peer"
    NO_SUCH_SLOT = "no-such-slot"
    NO_SUCH_PARTICIPANT = "no-such-participant"
    NOT_ASSIGNABLE = "not-assignable"
    NOT_IN_ROOM = "not-in-room"


class ProtocolError(Exception):
    """A request the server refuses; converted to an error message reply."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class WireMessage(BaseModel):
    """Inbound envelope; `from` is aliased because it is a Python keyword."""

    model_config = ConfigDict(populate_by_name=True, extra="ignore")

    v: int
    type: str
    seq: int | None = None
    room: str | None = None
    from_: str | None = Field(default=None, alias="from")
    to: str | None = None
    payload: Any = None


class JoinPayload(BaseModel):
    display_name: str = ""
    # Observers (the spatial viewer, sensor feeders) receive broadcasts but
    # never occupy a projection slot.
    observer: bool = False


class LayoutSetPayload(BaseModel):
    participant: str
    slot: str


class RotatePayload(BaseModel):
    direction: Literal["Forward", "Backward"]


class GesturePayload(BaseModel):
    kind: Literal["wave"] = "wave"
    direction: Literal["Left", "Right"]
    t_detect: float | None = None
    window: tuple[float, float] | None = None


def make_message(
    msg_type: str,
    *,
    seq: int | None = None,
    room: str | None = None,
    frm: str | None = None,
    to: str | None = None,
    payload: Any = None,
) -> dict:
    msg: dict[str, Any] = {"v": PROTOCOL_VERSION, "type": msg_type}
    if seq is not None:
        msg["seq"] = seq
    if room is not None:
        msg["room"] = room
    if frm is not None:
        msg["from"] = frm
    if to is not None:
        msg["to"] = to
    msg["payload"] = payload
    return msg


def make_error(code: str, message: str, *, room: str | None = None) -> dict:
    return make_message("error", room=room, payload={"code": code, "message": message})
