"""Coupled-line bundle description and its modal decomposition.

An n-wire lossless bundle is characterized by per-unit-length inductance and
capacitance matrices L and C (H/m, F/m).  A three-stage symmetric
eigendecomposition turns them into a characteristic impedance matrix Zc and a
modal transform pair (Mv, Mi):

    1. eigensystem of L        ->  eigensystem of L^-1 (reciprocal values)
    2. S = V_Linv * diag(w_Linv^-1/2), so S S^T = L
    3. M = S^T C S (symmetric), eigensystem (W, w_M)
    4. Mv = S W diag(w_M^-1/4),  Mi = Mv^-1,  Zc = Mv Mv^T

The w_M^-1/4 normalization makes every decoupled modal line have unit
characteristic impedance (see docs/modal_notes.md), which the time-domain
simulator relies on.  Mode k propagates at 1/sqrt(w_M[k]) m/s.

Terminating the bundle in Zc absorbs every mode, which is the basis for the
resistive crosstalk-cancelling networks built in the termination module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPhysicalBundleError, ValidationError

SPEED_OF_LIGHT = 299792458.0  # m/s

BUNDLE_SCHEMA_VERSION = 1

# Jacobi eigensolver controls.  The stop threshold is relative to the
# Frobenius norm of the input; 100 sweeps is far beyond what any SPD matrix
# of the sizes used here needs (convergence is quadratic).
_JACOBI_SWEEPS = 100
_JACOBI_STOP = 1e-14
_SYMMETRY_RTOL = 1e-9


def _offdiag_norm(a):
    # Summed directly over the off-diagonal entries; subtracting the diagonal
    # from the full norm instead would cancel catastrophically and could
    # never reach the 1e-14 relative stop.
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def symmetric_eig(a, rtol=_SYMMETRY_RTOL):
    """Eigensystem of a symmetric matrix by cyclic Jacobi rotations.

    Args:
        a: square matrix, symmetric within ``rtol`` (relative to its largest
            entry).  It is symmetrized before iteration.
        rtol: allowed relative asymmetry of the input.

    Returns:
        (values, vectors): eigenvalues sorted descending and the matching
        orthonormal eigenvector columns.  Each column is signed so that its
        first component of largest magnitude is non-negative, which makes the
        output reproducible bit-for-bit for identical input.

    Raises:
        ValidationError: non-square or asymmetric input, or (pathological)
            failure to converge within the sweep limit.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("symmetric_eig needs a square matrix, got shape %s" % (a.shape,))
    scale = float(np.abs(a).max()) if a.size else 0.0
    if scale > 0.0 and float(np.abs(a - a.T).max()) > rtol * scale:
        raise ValidationError("matrix is not symmetric within relative tolerance %g" % rtol)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    vec = np.eye(n)
    fro = float(np.linalg.norm(a))
    if fro == 0.0:
        return np.zeros(n), vec

    stop = _JACOBI_STOP * fro
    # Skipping pivots below stop/n still guarantees the final off-diagonal
    # Frobenius norm is below stop.
    pivot_floor = stop / n
    converged = False
    for _ in range(_JACOBI_SWEEPS):
        if _offdiag_norm(a) <= stop:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= pivot_floor:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                # Exact pivot updates are more accurate than the rotated values.
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = vec[:, p].copy()
                vq = vec[:, q].copy()
                vec[:, p] = c * vp - s * vq
                vec[:, q] = s * vp + c * vq
    else:
        converged = _offdiag_norm(a) <= stop
    if not converged:
        raise ValidationError("Jacobi iteration failed to converge in %d sweeps" % _JACOBI_SWEEPS)

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vec = vec[:, order]
    for k in range(n):
        lead = int(np.argmax(np.abs(vec[:, k])))
        if vec[lead, k] < 0.0:
            vec[:, k] = -vec[:, k]
    return values, vec


def spd_inverse(a, what="matrix"):
    """Inverse of a symmetric positive definite matrix via its eigensystem.

    Reuses the Jacobi kernel rather than a general LU path so that every
    inverse in the synthesis pipeline goes through one well-tested routine.
    """
    w, v = symmetric_eig(a)
    if w[-1] <= 0.0:
        raise NonPhysicalBundleError("%s is not positive definite (min eigenvalue %g)" % (what, w[-1]))
    inv = (v / w) @ v.T
    return 0.5 * (inv + inv.T)


@dataclass(frozen=True)
class CouplingMatrices:
    """Validated per-unit-length L and C of an n-wire bundle."""

    n: int
    L: np.ndarray  # H/m
    C: np.ndarray  # F/m
    name: str = ""

    @classmethod
    def from_arrays(cls, L, C, name=""):
        """Validate, symmetrize, and wrap raw L/C arrays.

        Raises ValidationError for shape or symmetry violations and
        NonPhysicalBundleError for definiteness / sign-structure violations.
        """
        L = np.asarray(L, dtype=float)
        C = np.asarray(C, dtype=float)
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise ValidationError("inductance matrix must be square, got shape %s" % (L.shape,))
        if C.shape != L.shape:
            raise ValidationError("capacitance matrix shape %s does not match inductance %s"
                                  % (C.shape, L.shape))
        n = L.shape[0]
        if n < 1:
            raise ValidationError("bundle needs at least one wire")
        L = _symmetrized(L, "inductance matrix")
        C = _symmetrized(C, "capacitance matrix")
        _require_spd(L, "inductance matrix")
        _require_spd(C, "capacitance matrix")
        # Maxwellian sign structure: mutual capacitance terms are negative,
        # every wire keeps net capacitance to the reference.
        off_tol = 1e-12 * float(np.abs(C).max())
        off = C - np.diag(np.diag(C))
        if float(off.max(initial=0.0)) > off_tol:
            i, j = np.unravel_index(int(np.argmax(off)), C.shape)
            raise NonPhysicalBundleError(
                "capacitance matrix is not Maxwellian: C[%d,%d] = %g > 0" % (i + 1, j + 1, C[i, j]))
        sums = C.sum(axis=1)
        if float(sums.min()) <= 0.0:
            w = int(np.argmin(sums))
            raise NonPhysicalBundleError(
                "capacitance matrix row %d sums to %g (no net capacitance to reference)"
                % (w + 1, sums[w]))
        return cls(n=n, L=L, C=C, name=str(name))

    def to_dict(self):
        return {"n": self.n, "L": self.L.tolist(), "C": self.C.tolist(), "name": self.name}


def _symmetrized(a, label):
    scale = float(np.abs(a).max())
    if scale > 0.0 and float(np.abs(a - a.T).max()) > _SYMMETRY_RTOL * scale:
        raise ValidationError("%s is not symmetric within relative tolerance %g"
                              % (label, _SYMMETRY_RTOL))
    return 0.5 * (a + a.T)


def _require_spd(a, label):
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NonPhysicalBundleError("non-physical bundle: %s is not positive definite" % label) from None


@dataclass(frozen=True)
class DecompositionTrace:
    """Intermediate stages of the impedance pipeline, kept for verification."""

    linv_vals: np.ndarray   # eigenvalues of L^-1, descending
    linv_vecs: np.ndarray   # matching orthonormal eigenvectors (columns)
    s_matrix: np.ndarray    # S = linv_vecs diag(linv_vals^-1/2); S S^T = L
    m_matrix: np.ndarray    # S^T C S, symmetric positive definite
    m_vals: np.ndarray      # eigenvalues of m_matrix, (s/m)^2, descending
    m_vecs: np.ndarray


@dataclass(frozen=True)
class ModalBasis:
    """Modal transform pair and characteristic impedance of a bundle.

    mv maps modal voltages to wire voltages; mi = mv^-1.  mode_vals[k] is the
    squared slowness of mode k, so velocities[k] = 1/sqrt(mode_vals[k]).
    In this normalization every modal line has unit characteristic impedance
    and zc = mv mv^T.
    """

    mv: np.ndarray
    mi: np.ndarray
    mode_vals: np.ndarray
    velocities: np.ndarray
    zc: np.ndarray


def characteristic_impedance(bundle):
    """Run the modal decomposition pipeline on a bundle.

    Returns:
        (ModalBasis, DecompositionTrace)

    Raises:
        NonPhysicalBundleError: a non-positive eigenvalue shows up anywhere
            in the pipeline (names the offending matrix).
    """
    lw, lv = symmetric_eig(bundle.L)
    if lw[-1] <= 0.0:
        raise NonPhysicalBundleError("non-physical bundle: inductance matrix has eigenvalue %g" % lw[-1])
    # Eigensystem of L^-1: reciprocal eigenvalues, same vectors, reordered so
    # the values are again descending.
    linv_vals = (1.0 / lw)[::-1].copy()
    linv_vecs = lv[:, ::-1].copy()
    s_matrix = linv_vecs * linv_vals ** -0.5
    m_matrix = s_matrix.T @ bundle.C @ s_matrix
    m_matrix = 0.5 * (m_matrix + m_matrix.T)
    mw, mvec = symmetric_eig(m_matrix)
    if mw[-1] <= 0.0:
        raise NonPhysicalBundleError("non-physical bundle: mode matrix has eigenvalue %g" % mw[-1])
    mv = s_matrix @ (mvec * mw ** -0.25)
    # mi = diag(mw^1/4) mvec^T S^-1 with S^-1 = diag(linv_vals^1/2) linv_vecs^T,
    # entirely from the two eigensystems -- no general inverse needed.
    s_inv = linv_vals[:, None] ** 0.5 * linv_vecs.T
    mi = mw[:, None] ** 0.25 * (mvec.T @ s_inv)
    zc = mv @ mv.T
    zc = 0.5 * (zc + zc.T)
    basis = ModalBasis(mv=mv, mi=mi, mode_vals=mw, velocities=mw ** -0.5, zc=zc)
    trace = DecompositionTrace(linv_vals=linv_vals, linv_vecs=linv_vecs,
                               s_matrix=s_matrix, m_matrix=m_matrix,
                               m_vals=mw, m_vecs=mvec)
    return basis, trace


def lc_from_impedance(zc, velocity, name=""):
    """Build L/C for a homogeneous bundle from its impedance matrix.

    For a bundle in a uniform dielectric every mode shares one velocity v and
    L = Zc/v, C = Zc^-1/v.  Round-tripping through
    characteristic_impedance() reproduces zc and reports all modal
    velocities equal to ``velocity``.
    """
    zc = np.asarray(zc, dtype=float)
    if not velocity > 0.0:
        raise ValidationError("velocity must be positive, got %g" % velocity)
    w, v = symmetric_eig(zc)
    if w[-1] <= 0.0:
        raise NonPhysicalBundleError("impedance matrix is not positive definite (min eigenvalue %g)"
                                     % w[-1])
    inv = (v / w) @ v.T
    inv = 0.5 * (inv + inv.T)
    return CouplingMatrices.from_arrays(zc / velocity, inv / velocity, name=name)


def load_bundle(path):
    """Load a bundle JSON file ({"n", "L", "C", "name"})."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return bundle_from_dict(raw)


def bundle_from_dict(raw):
    if not isinstance(raw, dict):
        raise ValidationError("bundle document must be a JSON object")
    missing = [k for k in ("n", "L", "C") if k not in raw]
    if missing:
        raise ValidationError("bundle document missing field(s): %s" % ", ".join(missing))
    bundle = CouplingMatrices.from_arrays(raw["L"], raw["C"], name=raw.get("name", ""))
    if int(raw["n"]) != bundle.n:
        raise ValidationError("bundle declares n=%s but matrices are %dx%d"
                              % (raw["n"], bundle.n, bundle.n))
    return bundle


def save_bundle(bundle, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle.to_dict(), fh, indent=2)
        fh.write("\n")
