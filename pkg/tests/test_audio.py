import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxicast.audio import (
    AudioFormatError,
    MissingGainError,
    PcmFrame,
    apply_gain,
    mix,
    read_wav,
    rms,
    write_wav,
)

RATE = 48000


def sine(amplitude=1.0, pid="A", cycles=20, n=4800):
    t = np.linspace(0.0, 2.0 * np.pi * cycles, n, endpoint=False)
    return PcmFrame(amplitude * np.sin(t), RATE, pid)


class TestFrameValidation:
    def test_rejects_out_of_range(self):
        with pytest.raises(AudioFormatError):
            PcmFrame(np.array([0.0, 1.5]), RATE, "A")

    def test_rejects_non_finite(self):
        with pytest.raises(AudioFormatError):
            PcmFrame(np.array([0.0, np.nan]), RATE, "A")

    def test_rejects_bad_rate(self):
        with pytest.raises(AudioFormatError):
            PcmFrame(np.zeros(4), 0, "A")

    def test_rejects_stereo(self):
        with pytest.raises(AudioFormatError):
            PcmFrame(np.zeros((2, 4)), RATE, "A")

    def test_samples_are_read_only(self):
        frame = sine()
        with pytest.raises(ValueError):
            frame.samples[0] = 0.5


class TestApplyGain:
    def test_quarter_gain_quarters_rms(self):
        frame = sine()
        out = apply_gain(frame, 0.25)
        assert math.isclose(rms(out), 0.25 * rms(frame), rel_tol=0, abs_tol=1e-12)

    def test_unit_gain_identity(self):
        frame = sine(0.7)
        out = apply_gain(frame, 1.0)
        assert np.array_equal(out.samples, frame.samples)

    def test_zero_gain_silences(self):
        out = apply_gain(sine(), 0.0)
        assert not np.any(out.samples)

    @pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan, math.inf])
    def test_gain_outside_unit_interval_rejected(self, bad):
        with pytest.raises(ValueError):
            apply_gain(sine(), bad)

    def test_gain_composition(self):
        frame = sine(0.9)
        once = apply_gain(frame, 0.6 * 0.5)
        twice = apply_gain(apply_gain(frame, 0.6), 0.5)
        assert np.max(np.abs(once.samples - twice.samples)) < 1e-12


class TestMix:
    def test_single_frame_unit_gain_identity(self):
        frame = sine(0.8)
        out = mix([frame], {"A": 1.0})
        assert np.array_equal(out.samples, frame.samples)
        assert out.sample_rate_hz == RATE

    def test_two_sines_sum_to_expected_amplitude(self):
        a = sine(0.3, "A")
        b = sine(0.3, "B")
        out = mix([a, b], {"A": 1.0, "B": 0.25})
        expected = 0.3 * 1.0 + 0.3 * 0.25
        assert math.isclose(float(np.max(np.abs(out.samples))), expected, abs_tol=1e-9)
        assert np.max(np.abs(out.samples - (a.samples + 0.25 * b.samples))) < 1e-12

    def test_default_gain_impulses_clamp_at_one(self):
        impulse = np.zeros(8)
        impulse[0] = 1.0
        frames = [PcmFrame(impulse, RATE, pid) for pid in ("A", "B", "C")]
        out = mix(frames, {"A": 1.0, "B": 0.25, "C": 0.1})
        assert out.samples[0] == 1.0  # clamped from 1.35
        assert not np.any(out.samples[1:])

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(AudioFormatError):
            mix([sine(n=100), sine(n=101, pid="B")], {"A": 1.0, "B": 1.0})

    def test_mismatched_rates_rejected(self):
        a = PcmFrame(np.zeros(10), 48000, "A")
        b = PcmFrame(np.zeros(10), 44100, "B")
        with pytest.raises(AudioFormatError):
            mix([a, b], {"A": 1.0, "B": 1.0})

    def test_missing_gain_names_participant(self):
        with pytest.raises(MissingGainError):
            mix([sine()], {"B": 1.0})

    def test_empty_mix_rejected(self):
        with pytest.raises(AudioFormatError):
            mix([], {})

    def test_silence_in_silence_out(self):
        frames = [PcmFrame(np.zeros(64), RATE, pid) for pid in ("A", "B")]
        out = mix(frames, {"A": 1.0, "B": 0.1})
        assert not np.any(out.samples)

    def test_output_always_in_range_and_finite(self):
        rng = np.random.default_rng(3)
        frames = [
            PcmFrame(rng.uniform(-1, 1, 256), RATE, pid) for pid in ("A", "B", "C", "D")
        ]
        out = mix(frames, {p: 1.0 for p in "ABCD"})
        assert np.all(np.isfinite(out.samples))
        assert float(np.max(np.abs(out.samples))) <= 1.0

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_linearity_below_clipping(self, seed):
        rng = np.random.default_rng(seed)
        n = 128
        a = PcmFrame(rng.uniform(-1, 1, n), RATE, "A")
        b = PcmFrame(rng.uniform(-1, 1, n), RATE, "B")
        gains = {"A": 0.4, "B": 0.25}  # worst-case sum 0.65 < 1: no clamp
        joint = mix([a, b], gains)
        separate = mix([a], gains).samples + mix([b], gains).samples
        assert np.max(np.abs(joint.samples - separate)) < 1e-12


class TestWavFixtures:
    def test_wav_roundtrip(self, tmp_path):
        frame = sine(0.5)
        path = tmp_path / "tone.wav"
        write_wav(path, frame)
        back = read_wav(path, "A")
        assert back.sample_rate_hz == RATE
        assert len(back) == len(frame)
        # 16-bit quantization bounds the error by one step of 1/32768.
        assert float(np.max(np.abs(back.samples - frame.samples))) <= 1.0 / 32768.0

    def test_wav_gain_chain(self, tmp_path):
        frame = sine(1.0)
        path = tmp_path / "unit.wav"
        write_wav(path, frame)
        loaded = read_wav(path, "A")
        ratio = rms(apply_gain(loaded, 0.25)) / rms(loaded)
        assert math.isclose(ratio, 0.25, abs_tol=1e-12)
