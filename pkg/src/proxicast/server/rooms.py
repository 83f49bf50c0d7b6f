"""Room state and mutation logic, independent of any transport.

Every public mutation returns the outbound messages it produced; delivering
them is the transport's job (see proxicast.server.app). The registry is
synchronous and must be externally serialized per room - the FastAPI layer
holds one asyncio lock per room, and different rooms may progress
concurrently.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ..calibration import CalibratedSlot
from ..layout import (
    GainPolicy,
    LayoutState,
    ProjectionSlot,
    RotationDirection,
    UnknownSlotError,
    gains_for_layout,
    order_by_distance,
    rotate_layout,
    set_assignment,
)
from .eventlog import log_entry
from .protocol import ErrorCode, ProtocolError, make_message

DEFAULT_GESTURE_MAP = {"Right": "Forward", "Left": "Backward"}


@dataclass
class Member:
    participant_id: str
    display_name: str
    observer: bool = False


@dataclass(frozen=True)
class Outbound:
    """One message addressed to one participant of the room."""

    to: str
    message: dict


def canonical_json(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def snapshot_digest(snapshot: dict) -> str:
    return hashlib.sha256(canonical_json(snapshot).encode("utf-8")).hexdigest()


class RoomState:
    """Mutable per-room record; mutation logic lives on the registry."""

    def __init__(self, room_id: str, slots: Sequence[CalibratedSlot], policy: GainPolicy):
        self.room_id = room_id
        self.slots = list(slots)
        self.policy = policy
        self.ordered_slots: list[ProjectionSlot] = order_by_distance(
            s.projection_slot() for s in self.slots
        )
        self.members: dict[str, Member] = {}
        self.layout = LayoutState()
        self.queue: list[str] = []  # unassigned non-observers, join order
        self.seq = 0
        self.viewer_id: str | None = None
        self.empty_since: float | None = None

    def layout_snapshot(self) -> dict:
        gains = gains_for_layout(self.layout, self.ordered_slots, self.policy)
        for pid, member in self.members.items():
            if not member.observer and pid not in gains:
                gains[pid] = 0.0
        return {
            "assignment": dict(self.layout.assignment),
            "version": self.layout.version,
            "gains": gains,
            "queue": list(self.queue),
            "slot_order": [s.slot_id for s in self.ordered_slots],
        }

    def members_payload(self) -> list[dict]:
        return [
            {"id": m.participant_id, "display_name": m.display_name, "observer": m.observer}
            for m in self.members.values()
        ]

    def slots_payload(self) -> list[dict]:
        by_id = {s.slot_id: s for s in self.slots}
        return [
            {
                "id": p.slot_id,
                "label": p.label,
                "distance_m": p.distance_m,
                "quad": by_id[p.slot_id].quad.as_lists(),
            }
            for p in self.ordered_slots
        ]

    def policy_payload(self) -> dict:
        return {"mode": self.policy.mode.value, "rank_table": list(self.policy.rank_table)}


class RoomRegistry:
    """Owns all rooms and applies mutations in call order."""

    def __init__(
        self,
        slots: Iterable[CalibratedSlot],
        *,
        policy: GainPolicy = GainPolicy(),
        room_cap: int = 16,
        idle_timeout_s: float = 300.0,
        gesture_map: dict[str, str] | None = None,
        clock: Callable[[], float] = time.time,
        event_sink=None,
    ):
        self._slots = list(slots)
        self._policy = policy
        self.room_cap = room_cap
        self.idle_timeout_s = idle_timeout_s
        self.gesture_map = dict(gesture_map or DEFAULT_GESTURE_MAP)
        self._clock = clock
        self._event_sink = event_sink
        self._rooms: dict[str, RoomState] = {}

    # -- inspection ------------------------------------------------------

    def room(self, room_id: str) -> RoomState | None:
        return self._rooms.get(room_id)

    def room_ids(self) -> list[str]:
        return list(self._rooms)

    def state_digest(self, room_id: str) -> str:
        room = self._require(room_id)
        return snapshot_digest(room.layout_snapshot())

    def update_slots(self, slots: Iterable[CalibratedSlot]) -> None:
        """New calibration applies to rooms created from now on."""
        self._slots = list(slots)

    # -- mutations -------------------------------------------------------

    def join(
        self,
        room_id: str,
        participant_id: str,
        display_name: str = "",
        observer: bool = False,
    ) -> list[Outbound]:
        now = self._clock()
        self.sweep(now)
        room = self._rooms.get(room_id)
        if room is None:
            room = RoomState(room_id, self._slots, self._policy)
            self._rooms[room_id] = room
        if participant_id in room.members:
            raise ProtocolError(
                ErrorCode.DUPLICATE_ID, f"participant {participant_id!r} already in room"
            )
        if len(room.members) >= self.room_cap:
            raise ProtocolError(ErrorCode.ROOM_FULL, f"room holds at most {self.room_cap}")

        room.members[participant_id] = Member(participant_id, display_name, observer)
        room.empty_since = None
        if observer:
            if room.viewer_id is None:
                room.viewer_id = participant_id
        else:
            assigned = set(room.layout.assignment.values())
            free = [s for s in room.ordered_slots if s.slot_id not in assigned]
            if free:
                room.layout = set_assignment(
                    room.layout,
                    room.ordered_slots,
                    participant_id,
                    free[0].slot_id,
                    known_participants={participant_id},
                )
            else:
                room.queue.append(participant_id)

        room.seq += 1
        snap = room.layout_snapshot()
        out = [
            Outbound(
                participant_id,
                make_message(
                    "joined",
                    seq=room.seq,
                    room=room_id,
                    payload={
                        "self": participant_id,
                        "members": room.members_payload(),
                        "slots": room.slots_payload(),
                        "policy": room.policy_payload(),
                        "layout": snap,
                    },
                ),
            )
        ]
        peer_msg = make_message(
            "peer-joined",
            seq=room.seq,
            room=room_id,
            payload={
                "participant": participant_id,
                "display_name": display_name,
                "observer": observer,
                "layout": snap,
            },
        )
        out.extend(Outbound(pid, peer_msg) for pid in room.members if pid != participant_id)
        self._log(
            now,
            room_id,
            "join",
            {
                "participant": participant_id,
                "display_name": display_name,
                "observer": observer,
                "layout": snap,
            },
        )
        return out

    def leave(self, room_id: str, participant_id: str) -> list[Outbound]:
        """Remove a member; unknown members and rooms are an idempotent no-op."""
        now = self._clock()
        room = self._rooms.get(room_id)
        if room is None or participant_id not in room.members:
            return []
        del room.members[participant_id]
        if room.viewer_id == participant_id:
            room.viewer_id = None
        if participant_id in room.queue:
            room.queue.remove(participant_id)
        assignment = dict(room.layout.assignment)
        if participant_id in assignment:
            freed = assignment.pop(participant_id)
            if room.queue:
                assignment[room.queue.pop(0)] = freed
            room.layout = LayoutState(assignment, room.layout.version + 1)
        if not room.members:
            room.empty_since = now

        snap = room.layout_snapshot()
        out: list[Outbound] = []
        room.seq += 1
        left_msg = make_message(
            "peer-left", seq=room.seq, room=room_id, payload={"participant": participant_id}
        )
        out.extend(Outbound(pid, left_msg) for pid in room.members)
        room.seq += 1
        state_msg = make_message("layout-state", seq=room.seq, room=room_id, payload=snap)
        out.extend(Outbound(pid, state_msg) for pid in room.members)
        self._log(now, room_id, "leave", {"participant": participant_id, "layout": snap})
        return out

    def rotate(
        self, room_id: str, direction: RotationDirection, source: str = "ui"
    ) -> list[Outbound]:
        """Rotate the layout; a no-op rotation broadcasts nothing."""
        now = self._clock()
        room = self._require(room_id)
        result = rotate_layout(room.layout, room.ordered_slots, direction)
        if not result.rotated:
            return []
        room.layout = result.layout
        room.seq += 1
        snap = room.layout_snapshot()
        msg = make_message("layout-state", seq=room.seq, room=room_id, payload=snap)
        self._log(
            now,
            room_id,
            "rotate",
            {"direction": direction.value, "source": source, "layout": snap},
        )
        return [Outbound(pid, msg) for pid in room.members]

    def set_slot(self, room_id: str, participant_id: str, slot_id: str) -> list[Outbound]:
        now = self._clock()
        room = self._require(room_id)
        member = room.members.get(participant_id)
        if member is None:
            raise ProtocolError(
                ErrorCode.NO_SUCH_PARTICIPANT, f"no participant {participant_id!r} in room"
            )
        if member.observer:
            raise ProtocolError(ErrorCode.NOT_ASSIGNABLE, "observers do not occupy slots")
        displaced = room.layout.occupant_of(slot_id) if slot_id else None
        was_queued = participant_id in room.queue
        try:
            room.layout = set_assignment(
                room.layout,
                room.ordered_slots,
                participant_id,
                slot_id,
                known_participants={
                    pid for pid, m in room.members.items() if not m.observer
                },
            )
        except UnknownSlotError as exc:
            raise ProtocolError(ErrorCode.NO_SUCH_SLOT, str(exc)) from exc
        if was_queued:
            room.queue.remove(participant_id)
            if displaced is not None and displaced != participant_id:
                room.queue.append(displaced)  # displaced member waits again
        room.seq += 1
        snap = room.layout_snapshot()
        msg = make_message("layout-state", seq=room.seq, room=room_id, payload=snap)
        self._log(
            now,
            room_id,
            "set",
            {"participant": participant_id, "slot": slot_id, "layout": snap},
        )
        return [Outbound(pid, msg) for pid in room.members]

    def gesture(self, room_id: str, wave_direction: str) -> list[Outbound]:
        """Map a wave direction through the configured rotation map."""
        mapped = self.gesture_map.get(wave_direction)
        if mapped is None:
            raise ProtocolError(
                ErrorCode.BAD_MESSAGE,
                f"no rotation mapped for wave direction {wave_direction!r}",
            )
        return self.rotate(room_id, RotationDirection(mapped), source="gesture")

    def relay(self, room_id: str, frm: str, to: str, payload) -> list[Outbound]:
        """Wrap an opaque blob with the sender id; the blob is never inspected."""
        room = self._rooms.get(room_id)
        if room is None or frm not in room.members:
            raise ProtocolError(ErrorCode.NOT_IN_ROOM, f"{frm!r} is not in room {room_id!r}")
        if to not in room.members:
            raise ProtocolError(ErrorCode.NO_SUCH_PEER, f"no peer {to!r} in room")
        msg = make_message("signal", room=room_id, frm=frm, to=to, payload=payload)
        return [Outbound(to, msg)]

    def sweep(self, now: float | None = None) -> list[str]:
        """Drop rooms that have sat empty past the idle timeout."""
        if now is None:
            now = self._clock()
        stale = [
            rid
            for rid, room in self._rooms.items()
            if not room.members
            and room.empty_since is not None
            and now - room.empty_since >= self.idle_timeout_s
        ]
        for rid in stale:
            del self._rooms[rid]
        return stale

    # -- internals -------------------------------------------------------

    def _require(self, room_id: str) -> RoomState:
        room = self._rooms.get(room_id)
        if room is None:
            raise ProtocolError(ErrorCode.NO_SUCH_ROOM, f"no room {room_id!r}")
        return room

    def _log(self, t: float, room_id: str, entry_type: str, payload: dict) -> None:
        if self._event_sink is not None:
            self._event_sink.append(log_entry(t, room_id, entry_type, payload))
