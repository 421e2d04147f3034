"""Vertical eye measurement and eye-diagram rendering.

The eye is measured per wire directly from sampled receiver waveforms: for a
grid of candidate sampling offsets spanning one unit interval around the
link latency, every bit of the stream is sampled at its nominal center plus
the offset, samples are split by the transmitted bit, and the vertical eye
is min(one samples) - max(zero samples), clamped at zero.  Each wire keeps
the offset that maximizes its eye.  No interpolation: a sample is the
waveform point nearest the requested time, which is conservative by at most
half a timestep of edge position.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DegenerateStreamError, ValidationError

EYE_SCHEMA_VERSION = 1

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78")


class WireEye:
    """Vertical eye for one wire at its best sampling phase."""

    def __init__(self, wire, eye_v, phase_ui):
        self.wire = wire
        self.eye_v = eye_v
        self.phase_ui = phase_ui

    def to_dict(self):
        return {"wire": self.wire, "eye_v": self.eye_v, "phase_ui": self.phase_ui}


class EyeReport:
    def __init__(self, per_wire, data_rate):
        self.per_wire = tuple(per_wire)
        self.data_rate = data_rate
        eyes = [w.eye_v for w in self.per_wire]
        self.min_v = min(eyes)
        self.avg_v = sum(eyes) / len(eyes)
        self.max_v = max(eyes)

    def to_dict(self):
        return {
            "data_rate_hz": self.data_rate,
            "per_wire": [w.to_dict() for w in self.per_wire],
            "min_v": self.min_v,
            "avg_v": self.avg_v,
            "max_v": self.max_v,
        }


def _check_streams(streams):
    streams = np.asarray(streams)
    if streams.ndim != 2:
        raise ValidationError("streams must be a 2-d bit array")
    for w in range(streams.shape[0]):
        row = streams[w]
        if row.min() == row.max():
            raise DegenerateStreamError(w + 1)
    return streams


def eye_measure(waves, streams, data_rate, latency_hint=None):
    """Measure the vertical eye of every wire.

    streams holds the transmitted bit pattern (one row per wire, one shared
    period); waves.volts must already be relative to the slicer reference.
    latency_hint centers the sampling-offset search; it defaults to the
    link's nominal flight time carried on the waveforms.
    """
    streams = _check_streams(streams)
    n, samples = waves.volts.shape
    if streams.shape[0] != n:
        raise ValidationError("streams cover %d wires, waveforms %d" % (streams.shape[0], n))
    ui = 1.0 / float(data_rate)
    period = streams.shape[1]
    span = (samples - 1) * waves.dt
    if span < (period + 1) * ui:
        raise ValidationError(
            "waveform span %g s is too short to sample a %d-bit period at %g b/s"
            % (span, period, data_rate))
    hint = waves.nominal_delay_s if latency_hint is None else float(latency_hint)

    t0 = waves.start_time
    t_last = t0 + span
    k_cand = max(int(round(ui / waves.dt)), 1)
    offsets = hint - 0.5 * ui + waves.dt * np.arange(k_cand)

    per_wire = []
    for w in range(n):
        best_eye = -np.inf
        best_off = offsets[0]
        for o in offsets:
            b_lo = int(np.ceil((t0 - o) / ui - 0.5))
            b_hi = int(np.floor((t_last - o) / ui - 0.5))
            if b_hi - b_lo + 1 < period:
                continue
            bits = np.arange(b_lo, b_hi + 1)
            idx = np.round((o + (bits + 0.5) * ui - t0) / waves.dt).astype(np.int64)
            keep = (idx >= 0) & (idx < samples)
            vals = waves.volts[w, idx[keep]]
            labels = streams[w, bits[keep] % period]
            ones = vals[labels == 1]
            zeros = vals[labels == 0]
            if ones.size == 0 or zeros.size == 0:
                continue
            eye = float(ones.min() - zeros.max())
            if eye > best_eye:
                best_eye = eye
                best_off = float(o)
        if not np.isfinite(best_eye):
            raise ValidationError("no sampling offset covers wire %d's full period" % (w + 1))
        per_wire.append(WireEye(wire=w + 1,
                                eye_v=max(best_eye, 0.0),
                                phase_ui=float((best_off % ui) / ui)))
    return EyeReport(per_wire, data_rate=float(data_rate))


def fold_phases(waves, data_rate, latency_hint=None):
    """Phase (in UI, folded to a two-UI window) of every waveform sample."""
    ui = 1.0 / float(data_rate)
    delay = waves.nominal_delay_s if latency_hint is None else float(latency_hint)
    t = waves.times()
    return ((t - delay) % (2.0 * ui)) / ui


def write_folded_csv(waves, data_rate, path, latency_hint=None):
    """Folded samples as CSV: wire,phase_ui,volts (phase in a two-UI window)."""
    phases = fold_phases(waves, data_rate, latency_hint=latency_hint)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("wire,phase_ui,volts\n")
        for w in range(waves.volts.shape[0]):
            row = waves.volts[w]
            for m in range(phases.size):
                fh.write("%d,%r,%r\n" % (w + 1, float(phases[m]), float(row[m])))


def write_eye_json(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


def render_eye_svg(waves, data_rate, path, latency_hint=None, width=860, height=460):
    """Self-contained SVG eye diagram (two-UI fold, one color per wire).

    Output is deterministic: fixed palette, fixed formatting, no timestamps.
    """
    phases = fold_phases(waves, data_rate, latency_hint=latency_hint)
    n, samples = waves.volts.shape
    vmin = float(waves.volts.min())
    vmax = float(waves.volts.max())
    if vmax <= vmin:
        vmax = vmin + 1.0
    pad = 0.05 * (vmax - vmin)
    vlo, vhi = vmin - pad, vmax + pad

    left, right, top, bottom = 60, 20, 20, 40
    pw = width - left - right
    ph = height - top - bottom

    def xpix(phase):
        return left + pw * (phase / 2.0)

    def ypix(v):
        return top + ph * (1.0 - (v - vlo) / (vhi - vlo))

    parts = []
    parts.append('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
                 'viewBox="0 0 %d %d">' % (width, height, width, height))
    parts.append('<rect x="0" y="0" width="%d" height="%d" fill="#ffffff"/>' % (width, height))
    parts.append('<rect x="%d" y="%d" width="%d" height="%d" fill="none" '
                 'stroke="#444444" stroke-width="1"/>' % (left, top, pw, ph))
    # reference level and UI boundary
    y0 = ypix(0.0)
    if top <= y0 <= top + ph:
        parts.append('<line x1="%d" y1="%.2f" x2="%d" y2="%.2f" stroke="#999999" '
                     'stroke-dasharray="4,4" stroke-width="1"/>'
                     % (left, y0, left + pw, y0))
    xmid = xpix(1.0)
    parts.append('<line x1="%.2f" y1="%d" x2="%.2f" y2="%d" stroke="#cccccc" '
                 'stroke-width="1"/>' % (xmid, top, xmid, top + ph))
    # axis labels
    parts.append('<text x="%d" y="%d" font-family="monospace" font-size="12" '
                 'fill="#333333">phase (UI)</text>' % (left + pw // 2 - 30, height - 12))
    parts.append('<text x="%d" y="%d" font-family="monospace" font-size="12" '
                 'fill="#333333">%.3f V</text>' % (6, int(top) + 12, vhi))
    parts.append('<text x="%d" y="%d" font-family="monospace" font-size="12" '
                 'fill="#333333">%.3f V</text>' % (6, int(top + ph), vlo))

    for w in range(n):
        color = _PALETTE[w % len(_PALETTE)]
        row = waves.volts[w]
        segs = []
        cur = []
        prev_phase = None
        for m in range(samples):
            p = float(phases[m])
            if prev_phase is not None and p < prev_phase:
                if len(cur) > 1:
                    segs.append(cur)
                cur = []
            cur.append((xpix(p), ypix(float(row[m]))))
            prev_phase = p
        if len(cur) > 1:
            segs.append(cur)
        for seg in segs:
            pts = " ".join("%.2f,%.2f" % (x, y) for x, y in seg)
            parts.append('<polyline points="%s" fill="none" stroke="%s" '
                         'stroke-width="1" stroke-opacity="0.55"/>' % (pts, color))

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
