"""PRBS generation, pattern assignment, and source waveform tests."""

import numpy as np
import pytest

from xtcancel.errors import ValidationError
from xtcancel.stimulus import (SourceWaveform, StimulusSpec, pattern_assign,
                               prbs, source_waveform)


def lfsr_reference(order, taps, seed, count):
    """Independent Fibonacci LFSR: MSB out, tap parity into the LSB."""
    state = seed
    out = []
    for _ in range(count):
        out.append((state >> (order - 1)) & 1)
        fb = 0
        for t in taps:
            fb ^= (state >> (t - 1)) & 1
        state = ((state << 1) | fb) & ((1 << order) - 1)
    return out


def test_prbs7_period_and_balance():
    seq = prbs(7)
    assert seq.size == 127
    assert int(seq.sum()) == 64
    assert int((1 - seq).sum()) == 63


def test_prbs3_known_sequence():
    assert prbs(3, 0b111).tolist() == [1, 1, 1, 0, 0, 1, 0]
    assert prbs(3, 0b111).tolist() == lfsr_reference(3, (3, 2), 0b111, 7)


def test_prbs7_matches_reference_lfsr():
    assert prbs(7).tolist() == lfsr_reference(7, (7, 6), (1 << 7) - 1, 127)


def test_prbs_maximal_length_small_orders():
    for order in range(3, 15):
        seq = prbs(order)
        period = (1 << order) - 1
        assert seq.size == period
        assert int(seq.sum()) == 1 << (order - 1)
        # every length-`order` window appears exactly once except all-zeros
        windows = set()
        bits = seq.tolist()
        for k in range(period):
            w = tuple(bits[(k + m) % period] for m in range(order))
            windows.add(w)
        assert len(windows) == period
        assert (0,) * order not in windows


def test_prbs_autocorrelation():
    seq = prbs(7).astype(int)
    s = 2 * seq - 1
    for lag in range(1, 127):
        assert int(np.dot(s, np.roll(s, lag))) == -1


def test_prbs_seed_rotates_sequence():
    base = prbs(7)
    other = prbs(7, seed=0b1010101)
    assert other.size == 127
    # same cycle, different phase: some rotation matches exactly
    hits = [k for k in range(127) if np.array_equal(np.roll(base, k), other)]
    assert len(hits) == 1


def test_prbs_validation():
    with pytest.raises(ValidationError):
        prbs(7, seed=0)
    with pytest.raises(ValidationError):
        prbs(2)
    with pytest.raises(ValidationError):
        prbs(32)


def test_pattern_worst_and_best():
    spec = StimulusSpec(data_rate=16e9, mode="worst")
    streams = pattern_assign(spec, 4)
    assert streams.shape == (4, 127)
    for k in range(1, 4):
        assert np.array_equal(streams[k], streams[0])
    spec = StimulusSpec(data_rate=16e9, mode="best")
    streams = pattern_assign(spec, 4)
    assert np.array_equal(streams[1], 1 - streams[0])
    assert np.array_equal(streams[2], streams[0])
    assert np.array_equal(streams[3], 1 - streams[0])


def test_pattern_random_offsets():
    spec = StimulusSpec(data_rate=16e9, mode="random")
    streams = pattern_assign(spec, 3)
    base = prbs(7)
    for k in range(3):
        assert np.array_equal(streams[k], np.roll(base, -17 * k))
    again = pattern_assign(spec, 3)
    assert np.array_equal(streams, again)


def test_pattern_overrides():
    spec = StimulusSpec(data_rate=16e9, mode="worst",
                        invert_mask=(0, 1), offsets=(0, 5))
    streams = pattern_assign(spec, 2)
    base = prbs(7)
    assert np.array_equal(streams[0], base)
    assert np.array_equal(streams[1], 1 - np.roll(base, -5))


def test_pattern_explicit_streams():
    spec = StimulusSpec(data_rate=16e9, streams=((1, 0, 1, 1), (0, 0, 1, 0)))
    streams = pattern_assign(spec, 2)
    assert np.array_equal(streams, [[1, 0, 1, 1], [0, 0, 1, 0]])
    with pytest.raises(ValidationError):  # wrong wire count
        pattern_assign(spec, 3)
    with pytest.raises(ValidationError):  # ragged rows
        pattern_assign(StimulusSpec(data_rate=16e9, streams=((1, 0), (1,))), 2)
    with pytest.raises(ValidationError):  # non-bit values
        pattern_assign(StimulusSpec(data_rate=16e9, streams=((2, 0),)), 1)


def test_stimulus_spec_validation():
    with pytest.raises(ValidationError):
        StimulusSpec(data_rate=0.0)
    with pytest.raises(ValidationError):
        StimulusSpec(data_rate=16e9, mode="typical")
    assert StimulusSpec(data_rate=16e9).unit_interval == pytest.approx(62.5e-12)


def test_source_waveform_bit_centers():
    wave = source_waveform([1, 0, 1, 1, 0], 16e9, 10e-12)
    ui = 62.5e-12
    for k, bit in enumerate([1, 0, 1, 1, 0]):
        assert wave.at((k + 0.5) * ui) == pytest.approx(float(bit), abs=1e-15)


def test_source_waveform_constant_zero():
    wave = source_waveform([0, 0, 0], 16e9, 10e-12)
    t = np.linspace(-1e-10, 1e-9, 500)
    assert np.array_equal(wave.at(t), np.zeros(500))


def test_source_waveform_bounds_and_continuity():
    wave = source_waveform([1, 0, 0, 1, 1, 0, 1, 0], 16e9, 10e-12)
    t = np.linspace(0.0, 8 * 62.5e-12, 4001)
    v = wave.at(t)
    assert v.min() >= 0.0 and v.max() <= 1.0
    dt = t[1] - t[0]
    max_slope = 1.0 / 10e-12  # swing / rise time
    assert np.max(np.abs(np.diff(v))) <= max_slope * dt * 1.0001


def test_source_waveform_idles_low_before_start():
    wave = source_waveform([1, 1], 16e9, 10e-12)
    assert wave.at(-1e-9) == 0.0
    # leading 1 ramps through t=0: halfway up the edge at t=0
    assert wave.at(0.0) == pytest.approx(0.5, abs=1e-12)


def test_source_waveform_alternating_period():
    ui = 62.5e-12
    wave = source_waveform([1, 0], 16e9, 10e-12)
    t = np.linspace(0.0, 2 * ui, 257)
    v = wave.at(t)
    assert np.allclose(wave.at(t + 2 * ui), v, atol=1e-9)  # cyclic, 125 ps period


def test_source_waveform_levels():
    wave = source_waveform([1, 0], 16e9, 10e-12, levels=(-0.4, 0.4))
    ui = 62.5e-12
    assert wave.at(0.5 * ui) == pytest.approx(0.4, abs=1e-15)
    assert wave.at(1.5 * ui) == pytest.approx(-0.4, abs=1e-15)


def test_source_waveform_validation():
    with pytest.raises(ValidationError):
        source_waveform([1, 0], 16e9, 62.5e-12)  # rise = bit period
    with pytest.raises(ValidationError):
        source_waveform([], 16e9, 10e-12)
