"""Command-line surface: network synthesis, figures of merit, simulation,
eye measurement, and parameter sweeps.

All commands write data to files only; anything informational goes to the
error stream.  Given the same inputs and seed, every command produces
byte-identical output files.

Exit codes: 0 success; 2 bad input (validation, schema, malformed JSON,
unknown flags); 3 coupling not realizable as a passive network; 4 code
enumeration above the exact-mode cap; 5 simulation produced non-finite
values.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .bundle import BUNDLE_SCHEMA_VERSION, characteristic_impedance, load_bundle
from .errors import (EnumerationCapError, NonRealizableCouplingError,
                     SimulationDivergedError, ValidationError)
from .eye import (EYE_SCHEMA_VERSION, eye_measure, render_eye_svg,
                  write_eye_json, write_folded_csv)
from .fom import (REPORT_SCHEMA_VERSION, bundle_fom, bundle_fom_sampled,
                  code_table, write_code_table_csv, write_report_json)
from .fixtures import DEFAULT_VELOCITY, uncoupled_bundle
from .mtlsim import (LINK_SCHEMA_VERSION, Segment, Waveforms, build_link,
                     load_link, read_waveform_csv, run_transient,
                     with_stimulus_seed, write_waveform_csv)
from .termination import (NETWORK_SCHEMA_VERSION, ReductionPolicy,
                          load_network, network_admittance, realize_network,
                          reduce_network, save_network, write_histogram_csv)

_VERSION_TEXT = ("xtcancel %s (schemas: bundle %d, network %d, report %d, link %d, eye %d)"
                 % (__version__, BUNDLE_SCHEMA_VERSION, NETWORK_SCHEMA_VERSION,
                    REPORT_SCHEMA_VERSION, LINK_SCHEMA_VERSION, EYE_SCHEMA_VERSION))


def _info(msg):
    print(msg, file=sys.stderr)


def _reduction_policy(args):
    """Resolve --cutoff-self/--cutoff-cross into a policy, or None."""
    if args.cutoff_self is None and args.cutoff_cross is None:
        return None
    if args.cutoff_self is None:
        raise ValidationError("--cutoff-cross requires --cutoff-self")
    if args.cutoff_cross is None:
        return ReductionPolicy.recommended(args.cutoff_self)
    return ReductionPolicy(self_cutoff=args.cutoff_self, cross_cutoff=args.cutoff_cross)


def _write_zc_json(zc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"n": zc.shape[0], "zc": [[float(v) for v in row] for row in zc]},
                  fh, indent=2)
        fh.write("\n")


def cmd_synth(args):
    policy = _reduction_policy(args)
    if args.net is not None:
        if args.lc is not None:
            raise ValidationError("pass either --lc or --net, not both")
        net = load_network(args.net)
        if args.zc:
            raise ValidationError("--zc needs --lc (no impedance in a network file)")
    else:
        if args.lc is None:
            raise ValidationError("synth needs --lc (bundle file) or --net (network file)")
        bundle = load_bundle(args.lc)
        basis, _ = characteristic_impedance(bundle)
        net = realize_network(basis.zc, vref=args.vref)
        if args.zc:
            _write_zc_json(basis.zc, args.zc)
    if policy is not None:
        net = reduce_network(net, policy)
    save_network(net, args.output)
    if args.histogram:
        write_histogram_csv(net, args.histogram)
    _info("wrote %s (%d elements)" % (args.output, len(net.elements)))
    return 0


def cmd_fom(args):
    vref = args.vref
    if args.network is not None:
        net = load_network(args.network)
        y = network_admittance(net)
        if vref is None:
            vref = net.vref
    else:
        if args.lc is None:
            raise ValidationError("fom needs --lc (bundle file) or --network (network file)")
        bundle = load_bundle(args.lc)
        basis, _ = characteristic_impedance(bundle)
        y = basis.mi.T @ basis.mi
    if vref is None:
        vref = 0.5
    levels = _parse_levels(args.levels)
    if args.samples is not None:
        if args.codes:
            raise ValidationError("--codes enumerates every code; drop it or drop --samples")
        report = bundle_fom_sampled(y, vref=vref, levels=levels,
                                    samples=args.samples, seed=args.seed or 0)
    else:
        report = bundle_fom(y, vref=vref, levels=levels)
    write_report_json(report, args.output)
    if args.codes:
        write_code_table_csv(code_table(y, vref=vref, levels=levels), args.codes)
    _info("wrote %s (%d codes)" % (args.output, report.n_codes))
    return 0


def _parse_levels(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError("--levels wants two comma-separated voltages, got %r" % text)
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ValidationError("--levels values must be numbers, got %r" % text) from None
    return (lo, hi)


def _load_link_seeded(args):
    spec = load_link(args.link)
    if args.seed is not None:
        spec = with_stimulus_seed(spec, args.seed)
    return spec


def cmd_sim(args):
    spec = _load_link_seeded(args)
    engine = build_link(spec)
    waves = run_transient(engine)
    write_waveform_csv(waves, args.output)
    _info("wrote %s (%d wires, %d samples)" % (args.output, waves.n, waves.volts.shape[1]))
    return 0


def cmd_eye(args):
    spec = _load_link_seeded(args)
    engine = build_link(spec)
    t, volts = read_waveform_csv(args.waves)
    if volts.shape[0] != engine.n:
        raise ValidationError("waveform file has %d wires, link has %d"
                              % (volts.shape[0], engine.n))
    waves = Waveforms(dt=float(t[1] - t[0]), start_time=float(t[0]),
                      vref=engine.vref, volts=volts,
                      source_currents=np.zeros_like(volts),
                      nominal_delay_s=engine.nominal_delay_s)
    rate = spec.stimulus.data_rate
    report = eye_measure(waves, engine.streams, rate)
    write_eye_json(report, args.output)
    if args.svg:
        render_eye_svg(waves, rate, args.svg)
    if args.folded:
        write_folded_csv(waves, rate, args.folded)
    _info("wrote %s (min eye %g V)" % (args.output, report.min_v))
    return 0


def _parse_sweep_values(mode, text):
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise ValidationError("--values is empty")
    if mode == "cutoff":
        pairs = []
        for tok in tokens:
            if tok.lower() in ("inf", "none", "full"):
                pairs.append(None)
                continue
            halves = tok.split("/")
            if len(halves) != 2:
                raise ValidationError(
                    "cutoff values look like SELF/CROSS ohms (or 'inf'), got %r" % tok)
            pairs.append((float(halves[0]), float(halves[1])))
        return pairs
    try:
        vals = [float(t) for t in tokens]
    except ValueError:
        raise ValidationError("--values must be numbers, got %r" % text) from None
    for v in vals:
        if v < 0 or not np.isfinite(v):
            raise ValidationError("sweep values must be finite and >= 0, got %r" % v)
    return vals


def _sweep_point(spec, mode, value):
    """Return (column value, modified LinkSpec) for one sweep point."""
    if mode == "rs":
        n = spec.termination.n
        drv = replace(spec.drivers, rs_ohms=(float(value),) * n)
        return float(value), replace(spec, drivers=drv)
    if mode == "cutoff":
        bundle = spec.segments[-1].bundle
        basis, _ = characteristic_impedance(bundle)
        net = realize_network(basis.zc, vref=spec.termination.vref)
        if value is None:
            return float("inf"), replace(spec, termination=net)
        policy = ReductionPolicy(self_cutoff=value[0], cross_cutoff=value[1])
        return float(value[0]), replace(spec, termination=reduce_network(net, policy))
    # uncoupled: plain 50 ohm breakout segments of the given length, both ends
    length = float(value)
    if length == 0.0:
        return 0.0, spec
    n = spec.termination.n
    breakout = uncoupled_bundle(n=n, z0=50.0, velocity=DEFAULT_VELOCITY, name="breakout")
    seg = Segment(bundle=breakout, length_m=length)
    return length, replace(spec, segments=(seg,) + spec.segments + (seg,))


def cmd_sweep(args):
    spec = _load_link_seeded(args)
    values = _parse_sweep_values(args.mode, args.values)
    rows = []
    for value in values:
        col, point = _sweep_point(spec, args.mode, value)
        engine = build_link(point)
        waves = run_transient(engine)
        report = eye_measure(waves, engine.streams, point.stimulus.data_rate)
        for we in report.per_wire:
            rows.append((col, we.wire, we.eye_v, report.min_v, report.avg_v, report.max_v))
        _info("%s=%r: min eye %g V" % (args.mode, col, report.min_v))
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("value,wire,eye_v,min_v,avg_v,max_v\n")
        for col, wire, eye_v, mn, av, mx in rows:
            fh.write("%r,%d,%r,%r,%r,%r\n" % (col, wire, eye_v, mn, av, mx))
    _info("wrote %s (%d rows)" % (args.output, len(rows)))
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="xtcancel",
        description="Crosstalk-cancelling termination synthesis and validation for "
                    "coupled transmission-line bundles.")
    p.add_argument("--version", action="version", version=_VERSION_TEXT)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="synthesize or reduce a termination network")
    sp.add_argument("--lc", help="bundle (L/C matrices) JSON file")
    sp.add_argument("--net", help="existing network JSON file (reduce only)")
    sp.add_argument("--vref", type=float, default=0.5, help="termination rail voltage")
    sp.add_argument("--cutoff-self", type=float, help="drop self resistors above this (ohm)")
    sp.add_argument("--cutoff-cross", type=float, help="drop bridges above this (ohm)")
    sp.add_argument("-o", "--output", required=True, help="network JSON output")
    sp.add_argument("--zc", help="also write the impedance matrix as JSON")
    sp.add_argument("--histogram", help="write conductance histogram CSV")
    sp.set_defaults(func=cmd_synth)

    fp = sub.add_parser("fom", help="switching-current and power figures of merit")
    fp.add_argument("--lc", help="bundle JSON file")
    fp.add_argument("--network", help="termination network JSON (admittance source)")
    fp.add_argument("--vref", type=float, default=None, help="termination rail voltage")
    fp.add_argument("--levels", default="0,1", help="logic low,high voltages")
    fp.add_argument("-o", "--output", required=True, help="report JSON output")
    fp.add_argument("--codes", help="write the per-code current table CSV")
    fp.add_argument("--samples", type=int, help="Monte Carlo sample count (skips the cap)")
    fp.add_argument("--seed", type=int, help="sample seed")
    fp.set_defaults(func=cmd_fom)

    mp = sub.add_parser("sim", help="run the time-domain link simulation")
    mp.add_argument("--link", required=True, help="link JSON file")
    mp.add_argument("--seed", type=int, help="override the stimulus seed")
    mp.add_argument("-o", "--output", required=True, help="waveform CSV output")
    mp.set_defaults(func=cmd_sim)

    ep = sub.add_parser("eye", help="measure eyes from a waveform file")
    ep.add_argument("--waves", required=True, help="waveform CSV from sim")
    ep.add_argument("--link", required=True, help="link JSON the waveforms came from")
    ep.add_argument("--seed", type=int, help="stimulus seed used for sim")
    ep.add_argument("-o", "--output", required=True, help="eye report JSON output")
    ep.add_argument("--svg", help="render an eye diagram SVG")
    ep.add_argument("--folded", help="write folded samples CSV")
    ep.set_defaults(func=cmd_eye)

    wp = sub.add_parser("sweep", help="sweep a link parameter and record eyes")
    wp.add_argument("--mode", required=True, choices=("rs", "cutoff", "uncoupled"))
    wp.add_argument("--link", required=True, help="base link JSON file")
    wp.add_argument("--values", required=True,
                    help="comma list: ohms (rs), SELF/CROSS ohms or inf (cutoff), "
                         "meters (uncoupled)")
    wp.add_argument("--seed", type=int, help="override the stimulus seed")
    wp.add_argument("-o", "--output", required=True, help="sweep CSV output")
    wp.set_defaults(func=cmd_sweep)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NonRealizableCouplingError as exc:
        _info("error: %s" % exc)
        return 3
    except EnumerationCapError as exc:
        _info("error: %s" % exc)
        _info("hint: pass --samples N for a Monte Carlo estimate of wide buses")
        return 4
    except SimulationDivergedError as exc:
        _info("error: %s" % exc)
        return 5
    except (ValidationError, json.JSONDecodeError, OSError) as exc:
        _info("error: %s" % exc)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
