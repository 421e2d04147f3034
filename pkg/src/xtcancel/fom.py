"""Switching-current and power figures of merit over the logic-code space.

For an n-wire bus every code is a bit vector; the launched wire currents are
I = Y (v - vref) with Y either the line admittance Zc^-1 (currents sourced
into the lines) or a realized network's admittance (steady-state supply
currents).  Exhaustive enumeration covers all 2^n codes up to n=20; beyond
that use the seeded sampling variant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationCapError, ValidationError

REPORT_SCHEMA_VERSION = 1

ENUMERATION_CAP = 20
# Fixed enumeration chunk: results never depend on worker count or scheduling
# because partition boundaries and the reduction order are functions of n only.
_CHUNK = 1 << 14


@dataclass(frozen=True)
class LogicCode:
    """A bit pattern plus its voltage mapping (bit 0 -> v_low, 1 -> v_high)."""

    bits: tuple[int, ...]
    v_low: float = 0.0
    v_high: float = 1.0

    def __post_init__(self):
        if not self.bits:
            raise ValidationError("logic code needs at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValidationError("logic code bits must be 0 or 1")

    def voltages(self):
        return self.v_low + np.asarray(self.bits, dtype=float) * (self.v_high - self.v_low)


@dataclass(frozen=True)
class FomReport:
    avg_bundle_current: float  # A, mean over codes of |sum of wire currents|
    max_bundle_current: float  # A
    max_wire_current: float    # A, worst single wire over all codes
    avg_power: float           # W, mean over codes of (v-vref)^T Y (v-vref)
    n_codes: int

    def to_dict(self):
        return {
            "avg_bundle_current_a": self.avg_bundle_current,
            "max_bundle_current_a": self.max_bundle_current,
            "max_wire_current_a": self.max_wire_current,
            "avg_power_w": self.avg_power,
            "n_codes": self.n_codes,
            "sampled": False,
        }


@dataclass(frozen=True)
class SampledFomReport:
    avg_bundle_current: float
    avg_bundle_current_stderr: float
    max_bundle_current: float  # sample maximum (lower bound on the true max)
    max_wire_current: float
    avg_power: float
    avg_power_stderr: float
    n_codes: int
    samples: int
    seed: int

    def to_dict(self):
        return {
            "avg_bundle_current_a": self.avg_bundle_current,
            "avg_bundle_current_stderr_a": self.avg_bundle_current_stderr,
            "max_bundle_current_a": self.max_bundle_current,
            "max_wire_current_a": self.max_wire_current,
            "avg_power_w": self.avg_power,
            "avg_power_stderr_w": self.avg_power_stderr,
            "n_codes": self.n_codes,
            "samples": self.samples,
            "seed": self.seed,
            "sampled": True,
        }


def _checked_admittance(y):
    y = np.asarray(y, dtype=float)
    if y.ndim != 2 or y.shape[0] != y.shape[1]:
        raise ValidationError("admittance matrix must be square, got shape %s" % (y.shape,))
    scale = float(np.abs(y).max())
    if scale > 0.0 and float(np.abs(y - y.T).max()) > 1e-9 * scale:
        raise ValidationError("admittance matrix is not symmetric")
    return 0.5 * (y + y.T)


def wire_currents(y, code, vref=0.5):
    """Per-wire currents for one code: I = Y (v - vref)."""
    y = _checked_admittance(y)
    if len(code.bits) != y.shape[0]:
        raise ValidationError("code has %d bits but admittance is %dx%d"
                              % (len(code.bits), y.shape[0], y.shape[0]))
    return y @ (code.voltages() - vref)


def _code_voltage_block(start, count, n, v_low, v_high, vref):
    codes = np.arange(start, start + count, dtype=np.uint64)
    bits = (codes[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)
    return v_low + bits.astype(float) * (v_high - v_low) - vref


def bundle_fom(y, vref=0.5, levels=(0.0, 1.0)):
    """Exhaustive figures of merit over all 2^n codes (n <= 20).

    Complement codes give negated currents, so every |.| statistic is
    symmetric; the full enumeration keeps the implementation obvious and the
    runtime is trivial at bus widths where enumeration is allowed at all.
    """
    y = _checked_admittance(y)
    n = y.shape[0]
    if n > ENUMERATION_CAP:
        raise EnumerationCapError(
            "exhaustive enumeration capped at %d wires (got %d); use the sampled variant"
            % (ENUMERATION_CAP, n))
    v_low, v_high = float(levels[0]), float(levels[1])
    total = 1 << n
    sum_abs_bundle = 0.0
    sum_power = 0.0
    max_bundle = 0.0
    max_wire = 0.0
    for start in range(0, total, _CHUNK):
        count = min(_CHUNK, total - start)
        x = _code_voltage_block(start, count, n, v_low, v_high, vref)
        cur = x @ y
        bundle = np.abs(cur.sum(axis=1))
        sum_abs_bundle += float(bundle.sum())
        max_bundle = max(max_bundle, float(bundle.max()))
        max_wire = max(max_wire, float(np.abs(cur).max()))
        sum_power += float((x * cur).sum())
    return FomReport(avg_bundle_current=sum_abs_bundle / total,
                     max_bundle_current=max_bundle,
                     max_wire_current=max_wire,
                     avg_power=sum_power / total,
                     n_codes=total)


def bundle_fom_sampled(y, vref=0.5, levels=(0.0, 1.0), samples=100000, seed=0):
    """Monte Carlo estimate of the figures of merit for wide buses.

    Codes are drawn uniformly with replacement from the 2^n space using a
    seeded generator, so results are reproducible.  Standard errors cover the
    two averages; the max fields are sample maxima.
    """
    y = _checked_admittance(y)
    n = y.shape[0]
    if samples < 2:
        raise ValidationError("need at least 2 samples")
    v_low, v_high = float(levels[0]), float(levels[1])
    rng = np.random.default_rng(int(seed))
    bits = rng.integers(0, 2, size=(int(samples), n)).astype(float)
    x = v_low + bits * (v_high - v_low) - vref
    cur = x @ y
    bundle = np.abs(cur.sum(axis=1))
    power = (x * cur).sum(axis=1)
    k = float(samples)
    return SampledFomReport(
        avg_bundle_current=float(bundle.mean()),
        avg_bundle_current_stderr=float(bundle.std(ddof=1) / math.sqrt(k)),
        max_bundle_current=float(bundle.max()),
        max_wire_current=float(np.abs(cur).max()),
        avg_power=float(power.mean()),
        avg_power_stderr=float(power.std(ddof=1) / math.sqrt(k)),
        n_codes=1 << n,
        samples=int(samples),
        seed=int(seed),
    )


def code_table(y, vref=0.5, levels=(0.0, 1.0)):
    """Per-code current table, shape (2^n, n); row index is the code integer.

    Bit k (LSB) of the code integer is wire k+1, so row c and row
    2^n-1-c are exact negations of each other.
    """
    y = _checked_admittance(y)
    n = y.shape[0]
    if n > ENUMERATION_CAP:
        raise EnumerationCapError(
            "code table capped at %d wires (got %d)" % (ENUMERATION_CAP, n))
    v_low, v_high = float(levels[0]), float(levels[1])
    total = 1 << n
    out = np.empty((total, n))
    for start in range(0, total, _CHUNK):
        count = min(_CHUNK, total - start)
        x = _code_voltage_block(start, count, n, v_low, v_high, vref)
        out[start:start + count] = x @ y
    return out


def write_code_table_csv(table, path):
    n = table.shape[1]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("code," + ",".join("i%d" % (k + 1) for k in range(n)) + "\n")
        for c in range(table.shape[0]):
            fh.write("%d,%s\n" % (c, ",".join(repr(float(v)) for v in table[c])))


def write_report_json(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
