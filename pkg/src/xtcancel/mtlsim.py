"""Time-domain simulation of cascaded lossless coupled-line segments.

Each segment is decomposed into independent modes (see the bundle module);
with the normalization used there every modal line has unit characteristic
impedance, so its two ends obey the method-of-characteristics relations

    u_near(t) = j_near(t) + E_near(t),   E_near(t) = w_far(t - tau)
    u_far(t)  = j_far(t)  + E_far(t),    E_far(t)  = w_near(t - tau)

with w = u + j, u the modal voltage, j the modal current into the line, and
tau the modal one-way delay.  Back in wire coordinates each segment end is a
Norton equivalent (conductance Zc^-1, injection Zc^-1 Mv E = Mi^T E), so the
driver bank, inter-segment junctions, and the termination network reduce to
small nodal solves whose matrices are factored once.  Wires driven through
zero source resistance are handled exactly by pinning their node voltage.

History buffers are read with linear interpolation at t - tau, so modal
delays need not be timestep multiples; every modal delay must be at least
one timestep for the explicit update to stay causal.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .bundle import CouplingMatrices, bundle_from_dict, characteristic_impedance, load_bundle
from .errors import SimulationDivergedError, ValidationError
from .stimulus import SourceWaveform, StimulusSpec, pattern_assign
from .termination import (TerminationNetwork, load_network, network_admittance,
                          network_from_dict, self_conductances)

LINK_SCHEMA_VERSION = 1

TIMESTEPS_PER_UI = 64  # default dt = unit interval / 64
WARMUP_FLIGHTS = 2     # discard 2x total delay ...
WARMUP_EXTRA_UI = 8    # ... plus 8 unit intervals


@dataclass(frozen=True)
class DriverBank:
    """Per-wire trapezoidal sources behind series resistances (0 allowed)."""

    rs_ohms: tuple[float, ...]
    v_low: float = 0.0
    v_high: float = 1.0
    rise_s: float = 10e-12

    def __post_init__(self):
        for r in self.rs_ohms:
            if not (r >= 0.0 and math.isfinite(r)):
                raise ValidationError("driver resistance must be finite and >= 0, got %r" % (r,))
        if not self.v_high > self.v_low:
            raise ValidationError("driver v_high must exceed v_low")
        if not (self.rise_s > 0.0 and math.isfinite(self.rise_s)):
            raise ValidationError("driver rise time must be positive")


@dataclass(frozen=True)
class Segment:
    bundle: CouplingMatrices
    length_m: float

    def __post_init__(self):
        if not (self.length_m > 0.0 and math.isfinite(self.length_m)):
            raise ValidationError("segment length must be positive, got %r" % (self.length_m,))


@dataclass(frozen=True)
class LinkSpec:
    segments: tuple[Segment, ...]
    drivers: DriverBank
    termination: TerminationNetwork
    stimulus: StimulusSpec
    timestep_s: float | None = None
    duration_s: float | None = None


@dataclass
class Waveforms:
    """Receiver-node samples, reported relative to the reference voltage."""

    dt: float
    start_time: float
    vref: float
    volts: np.ndarray            # (n, samples): v_node - vref
    source_currents: np.ndarray  # (n, samples): driver current into each wire
    nominal_delay_s: float

    @property
    def n(self):
        return self.volts.shape[0]

    def times(self):
        return self.start_time + self.dt * np.arange(self.volts.shape[1])


@dataclass
class DcState:
    node_volts: np.ndarray
    source_currents: np.ndarray


class _SegmentState:
    """Per-segment precomputation: modal transforms and delay bookkeeping."""

    def __init__(self, segment, dt):
        basis, _ = characteristic_impedance(segment.bundle)
        self.n = segment.bundle.n
        self.mi = basis.mi
        self.mit = basis.mi.T           # = Zc^-1 Mv, the Norton injection map
        self.mvt = basis.mv.T
        self.yc = basis.mi.T @ basis.mi  # = Zc^-1
        self.tau = segment.length_m * np.sqrt(basis.mode_vals)
        d = self.tau / dt
        self.i0 = np.floor(d).astype(np.int64)
        self.frac = d - self.i0
        if int(self.i0.min()) < 1:
            raise ValidationError(
                "timestep %g s exceeds a modal delay (min %g s) of a %g m segment; "
                "shorten the timestep or lengthen the segment"
                % (dt, float(self.tau.min()), segment.length_m))
        self.pad = int(self.i0.max()) + 2
        self.modes = np.arange(self.n)


class _PinnedSolve:
    """Nodal solve with voltage-source rows eliminated (exact rs = 0)."""

    def __init__(self, a, g, pinned):
        self.g = g
        self.pinned = pinned
        self.free = ~pinned
        self.all_pinned = bool(pinned.all())
        if not self.all_pinned:
            aff = a[np.ix_(self.free, self.free)]
            self.inv_ff = np.linalg.inv(aff)
            self.a_fp = a[np.ix_(self.free, pinned)]

    def solve(self, e, injection):
        if self.all_pinned:
            return e.copy()
        v = e.copy()
        rhs = (self.g * e + injection)[self.free]
        if self.pinned.any():
            rhs = rhs - self.a_fp @ e[self.pinned]
        v[self.free] = self.inv_ff @ rhs
        return v


class Engine:
    """A link compiled for time stepping; build with build_link()."""

    def __init__(self, spec):
        n = spec.termination.n
        for seg in spec.segments:
            if seg.bundle.n != n:
                raise ValidationError("segment bundle has %d wires, termination has %d"
                                      % (seg.bundle.n, n))
        if len(spec.drivers.rs_ohms) != n:
            raise ValidationError("driver bank covers %d wires, bus has %d"
                                  % (len(spec.drivers.rs_ohms), n))
        if not spec.segments:
            raise ValidationError("link needs at least one segment")

        self.spec = spec
        self.n = n
        self.ui = spec.stimulus.unit_interval
        self.dt = spec.timestep_s if spec.timestep_s is not None else self.ui / TIMESTEPS_PER_UI
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValidationError("timestep must be positive, got %r" % (self.dt,))

        self.segments = [_SegmentState(seg, self.dt) for seg in spec.segments]
        self.total_delay_s = float(sum(s.tau.max() for s in self.segments))
        self.nominal_delay_s = float(sum(s.tau.mean() for s in self.segments))
        self.warmup_s = WARMUP_FLIGHTS * self.total_delay_s + WARMUP_EXTRA_UI * self.ui

        self.streams = pattern_assign(spec.stimulus, n)
        self.period = self.streams.shape[1]
        self.sources = [
            SourceWaveform(bits=tuple(int(b) for b in self.streams[k]),
                           data_rate=spec.stimulus.data_rate,
                           rise_time=spec.drivers.rise_s,
                           v_low=spec.drivers.v_low,
                           v_high=spec.drivers.v_high)
            for k in range(n)
        ]

        window = self.warmup_s + self.nominal_delay_s + self.period * self.ui
        if spec.duration_s is None:
            self.duration_s = window + 2.0 * self.ui
        else:
            self.duration_s = float(spec.duration_s)
            if self.duration_s < window:
                raise ValidationError(
                    "duration %g s is shorter than warmup + latency + one stream period (%g s)"
                    % (self.duration_s, window))

        # Terminal and junction systems, factored once.
        rs = np.asarray(spec.drivers.rs_ohms, dtype=float)
        pinned = rs == 0.0
        g = np.zeros(n)
        g[~pinned] = 1.0 / rs[~pinned]
        self.tx = _PinnedSolve(np.diag(g) + self.segments[0].yc, g, pinned)
        self.junction_inv = [
            np.linalg.inv(self.segments[k].yc + self.segments[k + 1].yc)
            for k in range(len(self.segments) - 1)
        ]
        self.y_net = network_admittance(spec.termination)
        self.svec = self_conductances(spec.termination)
        self.vref = spec.termination.vref
        a_rx = self.y_net + self.segments[-1].yc
        cond = np.linalg.cond(a_rx)
        if not np.isfinite(cond) or cond > 1e14:
            raise ValidationError("receiver nodal system is singular (all-floating termination?)")
        self.rx_inv = np.linalg.inv(a_rx)
        self.dc_g = g
        self.dc_pinned = pinned

    def source_levels(self, code_bits):
        bits = np.asarray(code_bits, dtype=float)
        if bits.size != self.n:
            raise ValidationError("code has %d bits, bus has %d" % (bits.size, self.n))
        d = self.spec.drivers
        return d.v_low + bits * (d.v_high - d.v_low)

    def solve_dc(self, e):
        """Steady state with the lines as ideal connections; returns (v, i)."""
        a = np.diag(self.dc_g) + self.y_net
        rhs = self.dc_g * e + self.svec * self.vref
        v = e.copy()
        free = ~self.dc_pinned
        if free.any():
            aff = a[np.ix_(free, free)]
            r = rhs[free]
            if self.dc_pinned.any():
                r = r - a[np.ix_(free, self.dc_pinned)] @ e[self.dc_pinned]
            try:
                v[free] = np.linalg.solve(aff, r)
            except np.linalg.LinAlgError:
                raise ValidationError("dc network is singular") from None
        i = self.y_net @ v - self.svec * self.vref
        return v, i


def build_link(spec):
    return Engine(spec)


def dc_solve(engine, code):
    """DC operating point for one logic code (lines replaced by ideal wires)."""
    e = engine.source_levels(code.bits if hasattr(code, "bits") else code)
    v, i = engine.solve_dc(e)
    return DcState(node_volts=v, source_currents=i)


def run_transient(engine, duration_s=None):
    """Step the link and return post-warmup receiver waveforms."""
    dt = engine.dt
    duration = engine.duration_s if duration_s is None else float(duration_s)
    steps = int(round(duration / dt)) + 1
    start_index = int(math.ceil(engine.warmup_s / dt - 1e-9))
    if start_index >= steps:
        raise ValidationError("duration %g s leaves no samples after warmup %g s"
                              % (duration, engine.warmup_s))

    times = dt * np.arange(steps)
    src = np.stack([wave.at(times) for wave in engine.sources])
    if not np.isfinite(src).all():
        raise ValidationError("source waveform produced non-finite values")

    # Start every line at the DC state of the t=0 drive so the startup
    # transient is only the difference from that state (warmup still applies).
    v0, i0 = engine.solve_dc(src[:, 0])
    segs = engine.segments
    hist_near = []
    hist_far = []
    for s in segs:
        wn0 = s.mi @ v0 + s.mvt @ i0
        wf0 = s.mi @ v0 - s.mvt @ i0
        hn = np.empty((s.pad + steps, s.n))
        hf = np.empty((s.pad + steps, s.n))
        hn[:s.pad] = wn0
        hf[:s.pad] = wf0
        hist_near.append(hn)
        hist_far.append(hf)

    n_seg = len(segs)
    volts = np.empty((engine.n, steps))
    src_cur = np.empty((engine.n, steps))
    svec_vref = engine.svec * engine.vref
    e_near = [None] * n_seg
    e_far = [None] * n_seg

    for m in range(steps):
        for k, s in enumerate(segs):
            row = s.pad + m - s.i0
            om = 1.0 - s.frac
            e_near[k] = hist_far[k][row, s.modes] * om + hist_far[k][row - 1, s.modes] * s.frac
            e_far[k] = hist_near[k][row, s.modes] * om + hist_near[k][row - 1, s.modes] * s.frac

        nodes = [None] * (n_seg + 1)
        inj_tx = segs[0].mit @ e_near[0]
        nodes[0] = engine.tx.solve(src[:, m], inj_tx)
        for k in range(n_seg - 1):
            nodes[k + 1] = engine.junction_inv[k] @ (
                segs[k].mit @ e_far[k] + segs[k + 1].mit @ e_near[k + 1])
        nodes[n_seg] = engine.rx_inv @ (segs[-1].mit @ e_far[-1] + svec_vref)

        v_rx = nodes[n_seg]
        if not np.isfinite(v_rx).all():
            raise SimulationDivergedError(m, "receiver node voltages")

        for k, s in enumerate(segs):
            un = s.mi @ nodes[k]
            uf = s.mi @ nodes[k + 1]
            hist_near[k][s.pad + m] = 2.0 * un - e_near[k]
            hist_far[k][s.pad + m] = 2.0 * uf - e_far[k]

        volts[:, m] = v_rx - engine.vref
        src_cur[:, m] = segs[0].yc @ nodes[0] - inj_tx

    return Waveforms(dt=dt,
                     start_time=start_index * dt,
                     vref=engine.vref,
                     volts=volts[:, start_index:].copy(),
                     source_currents=src_cur[:, start_index:].copy(),
                     nominal_delay_s=engine.nominal_delay_s)


def write_waveform_csv(waves, path):
    """Waveform CSV: time_s,w1..wn with voltages relative to the reference."""
    t = waves.times()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time_s," + ",".join("w%d" % (k + 1) for k in range(waves.n)) + "\n")
        for m in range(t.size):
            fh.write("%r,%s\n" % (float(t[m]),
                                  ",".join(repr(float(v)) for v in waves.volts[:, m])))


def read_waveform_csv(path):
    """Parse a waveform CSV back into (times, volts[n, samples])."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if not cols or cols[0] != "time_s" or len(cols) < 2:
            raise ValidationError("waveform CSV must start with time_s,w1,... header")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise ValidationError("waveform CSV row has %d fields, expected %d"
                                      % (len(parts), len(cols)))
            rows.append([float(p) for p in parts])
    if len(rows) < 2:
        raise ValidationError("waveform CSV needs at least two samples")
    data = np.asarray(rows)
    t = data[:, 0]
    dts = np.diff(t)
    if float(np.abs(dts - dts[0]).max()) > 1e-6 * abs(float(dts[0])):
        raise ValidationError("waveform CSV is not uniformly sampled")
    return t, data[:, 1:].T.copy()


def _spec_value(raw, key, kind, required=True):
    if key not in raw:
        if required:
            raise ValidationError("link document missing field %r" % key)
        return None
    return raw[key]


def link_from_dict(raw, base_dir="."):
    """Build a LinkSpec from a parsed link JSON document.

    "bundle" and "termination" entries may be inline objects or paths
    relative to the link file's directory.
    """
    if not isinstance(raw, dict):
        raise ValidationError("link document must be a JSON object")
    seg_entries = _spec_value(raw, "segments", list)
    if not isinstance(seg_entries, list) or not seg_entries:
        raise ValidationError("link needs a non-empty segments list")
    segments = []
    for entry in seg_entries:
        if not isinstance(entry, dict) or "bundle" not in entry or "length_m" not in entry:
            raise ValidationError("each segment needs bundle and length_m, got %r" % (entry,))
        ref = entry["bundle"]
        if isinstance(ref, str):
            bundle = load_bundle(os.path.join(base_dir, ref))
        else:
            bundle = bundle_from_dict(ref)
        segments.append(Segment(bundle=bundle, length_m=float(entry["length_m"])))

    drv = _spec_value(raw, "drivers", dict)
    if not isinstance(drv, dict):
        raise ValidationError("drivers must be an object")
    n = segments[0].bundle.n
    rs = drv.get("rs_ohms", 0.0)
    rs_tuple = tuple(float(r) for r in rs) if isinstance(rs, (list, tuple)) else (float(rs),) * n
    drivers = DriverBank(rs_ohms=rs_tuple,
                         v_low=float(drv.get("v_low", 0.0)),
                         v_high=float(drv.get("v_high", 1.0)),
                         rise_s=float(drv.get("rise_s", 10e-12)))

    term_ref = _spec_value(raw, "termination", dict)
    if isinstance(term_ref, str):
        termination = load_network(os.path.join(base_dir, term_ref))
    else:
        termination = network_from_dict(term_ref)

    stim_raw = _spec_value(raw, "stimulus", dict)
    if not isinstance(stim_raw, dict) or "data_rate" not in stim_raw:
        raise ValidationError("stimulus needs at least a data_rate")
    streams = stim_raw.get("streams")
    stimulus = StimulusSpec(
        data_rate=float(stim_raw["data_rate"]),
        prbs_order=int(stim_raw.get("prbs_order", 7)),
        seed=None if stim_raw.get("seed") is None else int(stim_raw["seed"]),
        mode=stim_raw.get("mode", "random"),
        invert_mask=None if stim_raw.get("invert_mask") is None
        else tuple(int(b) for b in stim_raw["invert_mask"]),
        offsets=None if stim_raw.get("offsets") is None
        else tuple(int(o) for o in stim_raw["offsets"]),
        streams=None if streams is None
        else tuple(tuple(int(b) for b in row) for row in streams),
    )

    return LinkSpec(segments=tuple(segments),
                    drivers=drivers,
                    termination=termination,
                    stimulus=stimulus,
                    timestep_s=None if raw.get("timestep_s") is None else float(raw["timestep_s"]),
                    duration_s=None if raw.get("duration_s") is None else float(raw["duration_s"]))


def load_link(path):
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return link_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))


def with_stimulus_seed(spec, seed):
    """Copy a LinkSpec with a different PRBS seed (CLI --seed override)."""
    return replace(spec, stimulus=replace(spec.stimulus, seed=seed))
