"""Slot layout domain: proxemic zones, distance-ranked gains, and rotation.

Everything in this module is pure: operations take values and return new
values, so layouts are safe to share across threads. Serializing concurrent
mutations is the caller's job (see proxicast.server.rooms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Mapping, NamedTuple


class LayoutError(Exception):
    """Base class for layout domain errors."""


class UnknownSlotError(LayoutError):
    pass


class UnknownParticipantError(LayoutError):
    pass


class GainConfigError(LayoutError):
    pass


class ProxemicZone(IntEnum):
    """Interpersonal distance bands, ordered nearest to farthest."""

    INTIMATE = 0
    PERSONAL = 1
    SOCIAL = 2
    PUBLIC = 3

    @property
    def label(self) -> str:
        return self.name.capitalize()


# Upper band edges in meters. A distance exactly on an edge belongs to the
# nearer zone, so classification is deterministic at the boundaries.
INTIMATE_MAX_M = 0.45
PERSONAL_MAX_M = 1.20
SOCIAL_MAX_M = 3.60


def classify_zone(distance_m: float) -> ProxemicZone:
    """Classify a positive distance in meters into its proxemic zone."""
    if not math.isfinite(distance_m) or distance_m <= 0:
        raise ValueError(
            f"distance must be a positive finite number of meters, got {distance_m!r}"
        )
    if distance_m <= INTIMATE_MAX_M:
        return ProxemicZone.INTIMATE
    if distance_m <= PERSONAL_MAX_M:
        return ProxemicZone.PERSONAL
    if distance_m <= SOCIAL_MAX_M:
        return ProxemicZone.SOCIAL
    return ProxemicZone.PUBLIC


@dataclass(frozen=True)
class ProjectionSlot:
    """A named physical projection position at a fixed distance from the user.

    quad_ref names the calibrated quad this slot projects into; it defaults
    to the slot id, which is how calibration profiles key their quads.
    """

    slot_id: str
    label: str
    distance_m: float
    quad_ref: str = ""

    def __post_init__(self) -> None:
        if not self.slot_id:
            raise ValueError("slot_id must be non-empty")
        if not math.isfinite(self.distance_m) or self.distance_m <= 0:
            raise ValueError(f"slot {self.slot_id!r}: distance_m must be positive and finite")
        if not self.quad_ref:
            object.__setattr__(self, "quad_ref", self.slot_id)

    @property
    def zone(self) -> ProxemicZone:
        return classify_zone(self.distance_m)


class GainMode(Enum):
    RANK_TABLE = "RankTable"
    INVERSE_SQUARE = "InverseSquare"


#: Nearest, middle, farthest. The farthest member plays at a tenth of the
#: nearest, the middle one at a quarter.
DEFAULT_RANK_TABLE = (1.0, 0.25, 0.1)


@dataclass(frozen=True)
class GainPolicy:
    """How projection distance maps to audio gain.

    RANK_TABLE applies a fixed gain per distance rank (nearest slot first).
    INVERSE_SQUARE scales continuously as (d_nearest_occupied / d)^2, so the
    nearest occupied slot always plays at exactly 1.0.
    """

    mode: GainMode = GainMode.RANK_TABLE
    rank_table: tuple[float, ...] = DEFAULT_RANK_TABLE

    def __post_init__(self) -> None:
        table = tuple(float(g) for g in self.rank_table)
        if not table:
            raise GainConfigError("rank_table must be non-empty")
        for g in table:
            if not math.isfinite(g) or not 0.0 <= g <= 1.0:
                raise GainConfigError(f"rank_table gains must lie in [0, 1], got {g}")
        if table[0] != 1.0:
            raise GainConfigError("rank_table[0] must be 1.0 (nearest slot plays at full volume)")
        if any(later > earlier for earlier, later in zip(table, table[1:])):
            raise GainConfigError("rank_table must be non-increasing with distance")
        object.__setattr__(self, "rank_table", table)


@dataclass(frozen=True)
class LayoutState:
    """Assignment of participants to slots; version increases on every mutation."""

    assignment: Mapping[str, str] = field(default_factory=dict)
    version: int = 0

    def __post_init__(self) -> None:
        assignment = dict(self.assignment)
        occupied = list(assignment.values())
        if len(set(occupied)) != len(occupied):
            raise LayoutError("two participants cannot share a slot")
        object.__setattr__(self, "assignment", assignment)

    def slot_of(self, participant_id: str) -> str | None:
        return self.assignment.get(participant_id)

    def occupant_of(self, slot_id: str) -> str | None:
        for pid, sid in self.assignment.items():
            if sid == slot_id:
                return pid
        return None


def order_by_distance(slots: Iterable[ProjectionSlot]) -> list[ProjectionSlot]:
    """Slots sorted nearest first; equal distances tie-break on slot_id."""
    ordered = sorted(slots, key=lambda s: (s.distance_m, s.slot_id))
    seen: set[str] = set()
    for slot in ordered:
        if slot.slot_id in seen:
            raise LayoutError(f"duplicate slot_id {slot.slot_id!r}")
        seen.add(slot.slot_id)
    return ordered


def _check_assigned_slots(layout: LayoutState, ordered: list[ProjectionSlot]) -> None:
    known = {s.slot_id for s in ordered}
    for pid, sid in layout.assignment.items():
        if sid not in known:
            raise UnknownSlotError(f"participant {pid!r} assigned to unknown slot {sid!r}")


def gains_for_layout(
    layout: LayoutState,
    slots: Iterable[ProjectionSlot],
    policy: GainPolicy = GainPolicy(),
) -> dict[str, float]:
    """Per-participant gain derived from the distance rank of their slot.

    Only assigned participants appear in the result; callers that track
    unassigned members give them gain 0 themselves.
    """
    ordered = order_by_distance(slots)
    _check_assigned_slots(layout, ordered)
    if policy.mode is GainMode.RANK_TABLE and len(ordered) > len(policy.rank_table):
        raise GainConfigError(
            f"{len(ordered)} slots but the rank table has only {len(policy.rank_table)} entries"
        )
    if not layout.assignment:
        return {}
    if policy.mode is GainMode.RANK_TABLE:
        rank_of = {s.slot_id: k for k, s in enumerate(ordered)}
        return {pid: policy.rank_table[rank_of[sid]] for pid, sid in layout.assignment.items()}
    dist_of = {s.slot_id: s.distance_m for s in ordered}
    d_near = min(dist_of[sid] for sid in layout.assignment.values())
    return {
        pid: min(max((d_near / dist_of[sid]) ** 2, 0.0), 1.0)
        for pid, sid in layout.assignment.items()
    }


class RotationDirection(Enum):
    FORWARD = "Forward"  # every participant moves one slot farther away
    BACKWARD = "Backward"  # every participant moves one slot nearer


class RotationResult(NamedTuple):
    layout: LayoutState
    rotated: bool


def rotate_layout(
    layout: LayoutState,
    slots: Iterable[ProjectionSlot],
    direction: RotationDirection,
) -> RotationResult:
    """Cyclically permute assigned participants along the distance ordering.

    The permutation runs over occupied slots only, so rotating n assigned
    participants n times restores the original assignment. With fewer than
    two assigned participants the rotation is a flagged no-op and the
    version does not change.
    """
    ordered = order_by_distance(slots)
    _check_assigned_slots(layout, ordered)
    occupant = {sid: pid for pid, sid in layout.assignment.items()}
    occupied = [s.slot_id for s in ordered if s.slot_id in occupant]
    if len(occupied) < 2:
        return RotationResult(layout, False)
    step = 1 if direction is RotationDirection.FORWARD else -1
    assignment = dict(layout.assignment)
    count = len(occupied)
    for i, sid in enumerate(occupied):
        assignment[occupant[sid]] = occupied[(i + step) % count]
    return RotationResult(LayoutState(assignment, layout.version + 1), True)


def set_assignment(
    layout: LayoutState,
    slots: Iterable[ProjectionSlot],
    participant_id: str,
    slot_id: str,
    known_participants: Iterable[str] | None = None,
) -> LayoutState:
    """Place a participant on a slot; if the slot is taken, the two swap.

    By default the participant must already appear in the layout; pass
    known_participants (e.g. room membership) to allow placing someone who
    is currently unassigned. A participant displaced by an unassigned one
    loses their slot entirely.
    """
    ordered = order_by_distance(slots)
    _check_assigned_slots(layout, ordered)
    if slot_id not in {s.slot_id for s in ordered}:
        raise UnknownSlotError(f"no slot {slot_id!r}")
    known = set(known_participants) if known_participants is not None else set(layout.assignment)
    if participant_id not in known:
        raise UnknownParticipantError(f"no participant {participant_id!r}")
    assignment = dict(layout.assignment)
    displaced = layout.occupant_of(slot_id)
    old_slot = assignment.get(participant_id)
    if displaced is not None and displaced != participant_id:
        if old_slot is None:
            del assignment[displaced]
        else:
            assignment[displaced] = old_slot
    assignment[participant_id] = slot_id
    return LayoutState(assignment, layout.version + 1)
