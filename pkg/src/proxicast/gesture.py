"""Wave detection over a stream of timestamped hand positions.

The detector watches the lateral (x) axis only. A wave is at least
min_reversals direction changes of x inside the sliding window, with enough
peak-to-peak travel. Per-sample movement below the jitter deadband is treated
as sensor noise, so a resting hand never accumulates reversals.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum


class StreamOrderError(Exception):
    """A sample's timestamp moved backwards within one stream."""


class TraceFormatError(Exception):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


@dataclass(frozen=True)
class HandSample:
    """One hand position in the sensor frame; x is lateral, in millimeters."""

    t: float
    x: float
    y: float = 0.0
    z: float = 0.0


class WaveDirection(Enum):
    LEFT = "Left"
    RIGHT = "Right"


@dataclass(frozen=True)
class GestureEvent:
    kind: str
    direction: WaveDirection
    t_detect: float
    window: tuple[float, float]

    def __post_init__(self) -> None:
        t_start, t_end = self.window
        if not (t_start < t_end <= self.t_detect):
            raise ValueError("event window must satisfy t_start < t_end <= t_detect")


@dataclass(frozen=True)
class DetectorConfig:
    window_s: float = 1.0
    min_amplitude_mm: float = 80.0
    min_reversals: int = 3
    cooldown_s: float = 1.5
    jitter_mm: float = 2.0  # |dx| below this is noise, not movement

    def __post_init__(self) -> None:
        for name in ("window_s", "min_amplitude_mm", "cooldown_s", "jitter_mm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_reversals < 1:
            raise ValueError("min_reversals must be at least 1")


class WaveDetector:
    """Stateful detector for a single hand-sample stream.

    Not thread-safe; one stream feeds one detector sequentially. Distinct
    detectors are fully independent.
    """

    def __init__(self, config: DetectorConfig | None = None):
        self.config = config or DetectorConfig()
        self._window: deque[tuple[float, float]] = deque()
        self._last_t: float | None = None
        self._last_event_t: float | None = None

    def reset(self) -> None:
        """Drop buffered samples and any active cooldown."""
        self._window.clear()
        self._last_t = None
        self._last_event_t = None

    def feed(self, sample: HandSample) -> GestureEvent | None:
        """Consume one sample; returns a GestureEvent when a wave completes."""
        if not all(math.isfinite(v) for v in (sample.t, sample.x, sample.y, sample.z)):
            return None  # bad sensor reading: drop it, keep state as-is
        if self._last_t is not None and sample.t < self._last_t:
            raise StreamOrderError(
                f"sample at t={sample.t} arrived after t={self._last_t}"
            )
        self._last_t = sample.t
        self._window.append((sample.t, sample.x))
        horizon = sample.t - self.config.window_s
        while self._window and self._window[0][0] < horizon:
            self._window.popleft()
        # Written as a difference so emitted events are never closer than
        # cooldown_s under the same float subtraction an observer would use.
        if (
            self._last_event_t is not None
            and sample.t - self._last_event_t < self.config.cooldown_s
        ):
            return None
        return self._evaluate(sample.t)

    def _evaluate(self, now: float) -> GestureEvent | None:
        if len(self._window) < 2 or self._window[0][0] >= now:
            return None
        xs = [x for _, x in self._window]
        if max(xs) - min(xs) < self.config.min_amplitude_mm:
            return None
        reversals = 0
        last_sign = 0
        for prev, cur in zip(xs, xs[1:]):
            dx = cur - prev
            if abs(dx) < self.config.jitter_mm:
                continue
            sign = 1 if dx > 0 else -1
            if last_sign and sign != last_sign:
                reversals += 1
            last_sign = sign
        if last_sign == 0 or reversals < self.config.min_reversals:
            return None
        direction = WaveDirection.RIGHT if last_sign > 0 else WaveDirection.LEFT
        self._last_event_t = now
        return GestureEvent("wave", direction, now, (self._window[0][0], now))


def parse_trace(text: str) -> list[HandSample]:
    """Parse the JSONL replay format: one {"t","x","y","z"} object per line."""
    samples: list[HandSample] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise TraceFormatError(line_no, f"invalid JSON ({exc})") from exc
        if not isinstance(obj, dict):
            raise TraceFormatError(line_no, "expected a JSON object")
        try:
            samples.append(
                HandSample(
                    t=float(obj["t"]),
                    x=float(obj["x"]),
                    y=float(obj.get("y", 0.0)),
                    z=float(obj.get("z", 0.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceFormatError(line_no, f"bad sample fields ({exc})") from exc
    return samples


def dump_trace(samples: list[HandSample]) -> str:
    lines = [
        json.dumps({"t": s.t, "x": s.x, "y": s.y, "z": s.z}) for s in samples
    ]
    return "\n".join(lines) + ("\n" if lines else "")
