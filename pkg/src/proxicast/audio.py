"""Gain staging and linear mixing for mono PCM frames.

Distance spatialization is volume-only: the engine scales each member's
frame by their layout gain and sums, hard-clamping the result to [-1, 1].
"""

from __future__ import annotations

import math
import wave
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


class AudioFormatError(Exception):
    """Frame lengths, ranges, or sample rates do not line up."""


class MissingGainError(KeyError):
    """A frame's participant has no entry in the gain map."""


MIX_OUTPUT_ID = "mix"


@dataclass(frozen=True)
class PcmFrame:
    """Mono PCM frame with finite amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int
    participant_id: str

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise AudioFormatError("frames are mono: samples must be one-dimensional")
        if samples.size:
            if not np.all(np.isfinite(samples)):
                raise AudioFormatError("samples must be finite")
            if float(np.max(np.abs(samples))) > 1.0:
                raise AudioFormatError("samples must lie in [-1, 1]")
        if int(self.sample_rate_hz) <= 0:
            raise AudioFormatError("sample_rate_hz must be positive")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    def __len__(self) -> int:
        return int(self.samples.size)


def rms(frame: PcmFrame) -> float:
    if not len(frame):
        return 0.0
    return float(np.sqrt(np.mean(np.square(frame.samples))))


def _check_gain(gain: float) -> float:
    if not math.isfinite(gain) or not 0.0 <= gain <= 1.0:
        raise ValueError(f"gain must lie in [0, 1], got {gain!r}")
    return float(gain)


def apply_gain(frame: PcmFrame, gain: float) -> PcmFrame:
    """Scale every sample by gain; RMS scales by exactly the same factor."""
    g = _check_gain(gain)
    return PcmFrame(frame.samples * g, frame.sample_rate_hz, frame.participant_id)


def mix(
    frames: Iterable[PcmFrame],
    gains: Mapping[str, float],
    output_id: str = MIX_OUTPUT_ID,
) -> PcmFrame:
    """Sum gain-scaled frames samplewise, hard-clamped to [-1, 1].

    Mixing is linear whenever the clamp never engages, i.e. when the sum of
    gain-weighted peaks stays within 1.
    """
    frames = list(frames)
    if not frames:
        raise AudioFormatError("nothing to mix")
    length = len(frames[0])
    rate = frames[0].sample_rate_hz
    for f in frames[1:]:
        if len(f) != length:
            raise AudioFormatError("frame lengths differ")
        if f.sample_rate_hz != rate:
            raise AudioFormatError("sample rates differ")
    acc = np.zeros(length, dtype=np.float64)
    for f in frames:
        try:
            g = gains[f.participant_id]
        except KeyError:
            raise MissingGainError(f.participant_id) from None
        acc += _check_gain(g) * f.samples
    return PcmFrame(np.clip(acc, -1.0, 1.0), rate, output_id)


def read_wav(path, participant_id: str) -> PcmFrame:
    """Load 16-bit mono PCM; samples convert to real amplitudes as s / 32768."""
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1 or wf.getsampwidth() != 2:
            raise AudioFormatError("expected 16-bit mono PCM")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return PcmFrame(samples, rate, participant_id)


def write_wav(path, frame: PcmFrame) -> None:
    ints = np.clip(np.rint(frame.samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(frame.sample_rate_hz)
        wf.writeframes(ints.tobytes())
