#!/usr/bin/env python3
"""Regenerate the fixtures shared with the browser console.

- warp_golden.json: quad pairs with their solved corner-pin matrices. The
  TypeScript solver must match these within 1e-6; the Python test suite
  guards the file against drift at 1e-12.
- broadcast_stream.json: every message one client receives across a scripted
  room session, plus the expected final state. Replaying it through the
  browser ViewModel must land on exactly that state.

Deterministic: rerunning rewrites identical bytes.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from proxicast.calibration import Quad, default_profile, solve_homography
from proxicast.layout import RotationDirection
from proxicast.server.rooms import RoomRegistry, snapshot_digest

FIXTURES_DIR = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures"

UNIT = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def random_quad(rng: random.Random) -> list[list[float]]:
    while True:
        corners = [
            [x + rng.uniform(-0.2, 0.2), y + rng.uniform(-0.2, 0.2)]
            for x, y in UNIT
        ]
        try:
            Quad(tuple((x, y) for x, y in corners))
        except Exception:
            continue
        return corners


def warp_cases() -> list[dict]:
    rng = random.Random(73)
    cases = [
        {"name": "identity", "source": UNIT, "target": UNIT},
        {
            "name": "translate",
            "source": UNIT,
            "target": [[x + 0.2, y + 0.1] for x, y in UNIT],
        },
        {
            "name": "pin",
            "source": UNIT,
            "target": [[0.1, 0.1], [0.8, 0.15], [0.9, 0.85], [0.05, 0.9]],
        },
    ]
    for i in range(5):
        cases.append(
            {
                "name": f"random-{i}",
                "source": random_quad(rng),
                "target": random_quad(rng),
            }
        )
    for case in cases:
        h = solve_homography(
            Quad(tuple((x, y) for x, y in case["source"])),
            Quad(tuple((x, y) for x, y in case["target"])),
        )
        case["matrix"] = h.rows()
    return cases


def broadcast_stream() -> dict:
    captured: list[dict] = []
    clock = {"t": 0.0}
    registry = RoomRegistry(default_profile().slots, clock=lambda: clock["t"])

    def run(outbound):
        for ob in outbound:
            if ob.to == "p0":
                captured.append(ob.message)

    room = "demo"
    run(registry.join(room, "p0", "Zero"))
    clock["t"] = 1.0
    run(registry.join(room, "p1", "One"))
    clock["t"] = 2.0
    run(registry.join(room, "p2", "Two"))
    clock["t"] = 3.0
    run(registry.rotate(room, RotationDirection.FORWARD))
    clock["t"] = 4.0
    run(registry.set_slot(room, "p2", "close"))
    clock["t"] = 5.0
    run(registry.rotate(room, RotationDirection.BACKWARD))
    clock["t"] = 6.0
    run(registry.leave(room, "p1"))
    clock["t"] = 7.0
    run(registry.join(room, "p3", "Three"))

    state = registry.room(room)
    assert state is not None
    snap = state.layout_snapshot()
    return {
        "client": "p0",
        "messages": captured,
        "expected": {
            "members": sorted(state.members),
            "layout": snap,
            "digest": snapshot_digest(snap),
            "seq": state.seq,
        },
    }


def main() -> None:
    FIXTURES_DIR.mkdir(parents=True, exist_ok=True)
    (FIXTURES_DIR / "warp_golden.json").write_text(
        json.dumps(warp_cases(), indent=2) + "\n", encoding="utf-8"
    )
    (FIXTURES_DIR / "broadcast_stream.json").write_text(
        json.dumps(broadcast_stream(), indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {FIXTURES_DIR / 'warp_golden.json'}")
    print(f"wrote {FIXTURES_DIR / 'broadcast_stream.json'}")


if __name__ == "__main__":
    main()
