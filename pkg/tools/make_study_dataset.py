#!/usr/bin/env python3
"""Regenerate the bundled study fixture (synthetic session logs + declarations).

Nine session rooms, one per subject. The subject joins first as the room's
spatial viewer (observer); their three peers join in the distance order the
subject kept longest. Each room holds that arrangement for 600 s, rotates
once for 60 s, then everyone leaves, so the dominant dwell rank per peer is
unambiguous. Deterministic: rerunning rewrites identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from proxicast.calibration import default_profile
from proxicast.layout import RotationDirection
from proxicast.server.eventlog import MemoryEventLog
from proxicast.server.rooms import RoomRegistry

# (subject, peers ordered by held distance [close, middle, far],
#  peers ordered by declared intimacy [closest first])
SESSIONS = [
    ("a1", ["a2", "a3", "pr1"], ["a2", "a3", "pr1"]),
    ("a2", ["a1", "a3", "pr1"], ["a1", "a3", "pr1"]),
    ("a3", ["a1", "a2", "pr1"], ["a1", "a2", "pr1"]),
    ("b1", ["b2", "b3", "pr1"], ["b2", "b3", "pr1"]),
    ("b2", ["b3", "b1", "pr1"], ["b3", "b1", "pr1"]),
    # b3 kept the professor nearest despite ranking them least intimate.
    ("b3", ["pr1", "b2", "b1"], ["b1", "b2", "pr1"]),
    ("c1", ["c2", "c3", "pr2"], ["c2", "c3", "pr2"]),
    ("c2", ["c1", "c3", "pr2"], ["c1", "c3", "pr2"]),
    # c3's held distances cycle relative to declared intimacy.
    ("c3", ["c2", "pr2", "c1"], ["c1", "c2", "pr2"]),
]

NAMES = {
    "a1": "Aoi", "a2": "Ren", "a3": "Yui",
    "b1": "Kenta", "b2": "Mio", "b3": "Sora",
    "c1": "Hana", "c2": "Daichi", "c3": "Rin",
    "pr1": "Prof. Sato", "pr2": "Prof. Mori",
}


def build_events() -> MemoryEventLog:
    sink = MemoryEventLog()
    clock = {"t": 0.0}
    registry = RoomRegistry(
        default_profile().slots, clock=lambda: clock["t"], event_sink=sink
    )
    for index, (subject, by_distance, _) in enumerate(SESSIONS):
        room = f"session-{subject}"
        clock["t"] = index * 10000.0
        registry.join(room, subject, NAMES[subject], observer=True)
        for peer in by_distance:
            clock["t"] += 5.0
            registry.join(room, peer, NAMES[peer])
        clock["t"] += 600.0
        registry.rotate(room, RotationDirection.FORWARD, source="gesture")
        clock["t"] += 60.0
        for peer in by_distance:
            registry.leave(room, peer)
            clock["t"] += 1.0
        registry.leave(room, subject)
    return sink


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "src" / "proxicast" / "data" / "study"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "events.jsonl").write_text(build_events().as_jsonl(), encoding="utf-8")
    declarations = [
        {"subject": subject, "ranking": intimacy} for subject, _, intimacy in SESSIONS
    ]
    (out_dir / "declarations.json").write_text(
        json.dumps(declarations, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {out_dir / 'events.jsonl'}")
    print(f"wrote {out_dir / 'declarations.json'}")


if __name__ == "__main__":
    main()
