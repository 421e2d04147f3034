"""Vertical eye measurement and rendering tests."""

import json

import numpy as np
import pytest

from xtcancel.errors import DegenerateStreamError, ValidationError
from xtcancel.eye import (eye_measure, fold_phases, render_eye_svg,
                          write_eye_json, write_folded_csv)
from xtcancel.fixtures import (fifty_ohm_network, pair_bundle, scalar_bundle,
                               simple_link)
from xtcancel.mtlsim import Waveforms, build_link, run_transient

UI = 62.5e-12


def square_waves(unit, reps=4, data_rate=16e9, steps=64, amplitude=0.5,
                 offset=0.0):
    """Ideal square wave: `unit` bit pattern repeated `reps` times.

    Returns (waves, streams) where streams holds one period of the pattern,
    so the waveform span comfortably exceeds period + 1 unit intervals.
    """
    unit = np.asarray(unit)
    bits = np.tile(unit, reps)
    ui = 1.0 / data_rate
    dt = ui / steps
    volts = (np.repeat(2.0 * bits - 1.0, steps) * amplitude + offset)[None, :]
    waves = Waveforms(dt=dt, start_time=0.0, vref=0.5, volts=volts,
                      source_currents=np.zeros_like(volts),
                      nominal_delay_s=0.0)
    return waves, unit[None, :]


def test_square_wave_eye_is_full_swing():
    waves, streams = square_waves([1, 0, 1, 1, 0, 0, 1, 0])
    report = eye_measure(waves, streams, 16e9)
    assert report.per_wire[0].eye_v == pytest.approx(1.0, abs=1e-12)
    assert report.min_v == report.avg_v == report.max_v == report.per_wire[0].eye_v


def test_flat_waveform_eye_clamped_to_zero():
    waves, streams = square_waves([1, 0, 1, 0], reps=8, amplitude=0.0)
    report = eye_measure(waves, streams, 16e9)
    assert report.per_wire[0].eye_v == 0.0


def test_matched_divider_eye():
    # single matched line behind 1.67 ohm: eye = 50 / 51.67 of the swing
    link = simple_link(scalar_bundle(), fifty_ohm_network(1), rs_ohms=1.67,
                       mode="worst", seed=None)
    engine = build_link(link)
    waves = run_transient(engine)
    report = eye_measure(waves, engine.streams, 16e9)
    assert report.per_wire[0].eye_v == pytest.approx(50.0 / 51.67, rel=0.01)


def test_degenerate_stream_error():
    waves, _ = square_waves([1, 0, 1, 0], reps=8)
    ones = np.ones((1, 8), dtype=int)
    with pytest.raises(DegenerateStreamError) as info:
        eye_measure(waves, ones, 16e9)
    assert info.value.wire == 1


def test_span_too_short_error():
    waves, _ = square_waves([1, 0, 1, 0], reps=1)
    # four bits of samples cannot cover a 32-bit stream period plus one UI
    stream = np.resize([1, 0, 1, 0], (1, 32))
    with pytest.raises(ValidationError):
        eye_measure(waves, stream, 16e9)


def test_amplitude_and_offset_equivariance():
    rng = np.random.default_rng(19)
    unit = rng.integers(0, 2, 16)
    unit[0], unit[1] = 0, 1  # never degenerate
    base, streams = square_waves(unit, reps=3)
    noisy = base.volts + 0.05 * np.sin(np.arange(base.volts.shape[1]) * 0.37)
    baseline = None
    for alpha in (1.0, 2.5):
        for shift in (0.0, -0.3):
            waves = Waveforms(dt=base.dt, start_time=0.0, vref=0.5,
                              volts=alpha * noisy + shift,
                              source_currents=np.zeros_like(noisy),
                              nominal_delay_s=0.0)
            rep = eye_measure(waves, streams, 16e9)
            if baseline is None:
                baseline = rep.per_wire[0].eye_v
                assert baseline > 0.0
            else:
                assert rep.per_wire[0].eye_v == pytest.approx(alpha * baseline,
                                                              rel=1e-12)


def test_pattern_ordering_on_plain_termination():
    # without cancellation the coupled pair rewards the odd-mode pattern
    eyes = {}
    for mode in ("best", "random", "worst"):
        link = simple_link(pair_bundle(), fifty_ohm_network(2), rs_ohms=1.67,
                           mode=mode)
        engine = build_link(link)
        waves = run_transient(engine)
        rep = eye_measure(waves, engine.streams, 16e9)
        eyes[mode] = [w.eye_v for w in rep.per_wire]
    for k in range(2):
        assert eyes["best"][k] >= eyes["random"][k] - 1e-9
        assert eyes["random"][k] >= eyes["worst"][k] - 1e-9


def test_folded_csv(tmp_path):
    waves, _ = square_waves([1, 0, 1, 1, 0, 0, 1, 0])
    path = tmp_path / "folded.csv"
    write_folded_csv(waves, 16e9, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "wire,phase_ui,volts"
    assert len(lines) == 1 + waves.volts.shape[1]
    phases = fold_phases(waves, 16e9)
    assert phases.min() >= 0.0 and phases.max() < 2.0


def test_eye_json(tmp_path):
    waves, streams = square_waves([1, 0, 1, 1, 0, 0, 1, 0])
    report = eye_measure(waves, streams, 16e9)
    path = tmp_path / "eye.json"
    write_eye_json(report, path)
    data = json.loads(path.read_text())
    assert data["data_rate_hz"] == 16e9
    assert data["per_wire"][0]["wire"] == 1
    assert 0.0 <= data["per_wire"][0]["phase_ui"] < 1.0
    assert data["min_v"] <= data["avg_v"] <= data["max_v"]


def test_svg_deterministic_and_well_formed(tmp_path):
    link = simple_link(pair_bundle(), fifty_ohm_network(2), rs_ohms=1.67,
                       streams=((1, 0, 1, 1, 0, 0, 1, 0),
                                (0, 1, 0, 0, 1, 1, 0, 1)))
    waves = run_transient(build_link(link))
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    render_eye_svg(waves, 16e9, a)
    render_eye_svg(waves, 16e9, b)
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert "polyline" in text
