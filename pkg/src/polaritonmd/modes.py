"""Harmonic analysis: finite-difference Hessian, normal modes, polaritons.

The polariton eigenproblem extends the mass-weighted nuclear Hessian by
the cavity blocks: the dipole self-energy adds
S = sum_alpha d_alpha d_alpha^T with d_alpha = (lambda_alpha . dmu/dR)
mass-weighted, and the bilinear coupling contributes columns
c_alpha = omega_alpha d_alpha.  Diagonalizing

    [[ K + S ,  c ],
     [ c^T   ,  diag(omega^2) ]]

yields squared polariton frequencies; the gap of the pair straddling a
resonant cavity line is the Rabi-splitting oracle the dynamics is
validated against.
"""

from dataclasses import dataclass

import numpy as np

from . import units
from .model import (
    HarmonicForceField,
    MatterState,
    dipole_jacobian,
    matter_forces,
)

__all__ = [
    "hessian_fd",
    "NormalModeSet",
    "normal_modes",
    "analyze_modes",
    "PolaritonModel",
    "polariton_model",
    "polariton_frequencies",
    "polariton_gap",
    "rigid_mode_basis",
    "write_mode_report",
    "write_polariton_report",
]

DEFAULT_FD_STEP = 1e-3  # bohr
_RESIDUAL_FORCE_TOL = 1e-6  # Ha/bohr


def hessian_fd(ff: HarmonicForceField, m: MatterState, step=DEFAULT_FD_STEP,
               full_output=False):
    """Central finite-difference Hessian of the force field, (3N, 3N), Ha/bohr^2.

    Requires ``m`` to be a stationary point (max |F| < 1e-6 Ha/bohr);
    differentiates the analytic forces, then symmetrizes.  With
    ``full_output`` also returns the max asymmetry defect max|H - H^T|
    before symmetrization.
    """
    f0 = matter_forces(ff, m)
    fmax = float(np.abs(f0).max())
    if fmax >= _RESIDUAL_FORCE_TOL:
        raise ValueError(
            f"geometry is not a stationary point: max |F| = {fmax:.3e} "
            f"Ha/bohr (tolerance {_RESIDUAL_FORCE_TOL:.0e})"
        )
    n3 = 3 * m.n_atoms
    hess = np.empty((n3, n3))
    base = m.positions
    for col in range(n3):
        a, x = divmod(col, 3)
        dp = base.copy()
        dm = base.copy()
        dp[a, x] += step
        dm[a, x] -= step
        fp = matter_forces(ff, m.with_positions(dp)).ravel()
        fm = matter_forces(ff, m.with_positions(dm)).ravel()
        # H[:, col] = d^2V/dR dR_col = -dF/dR_col
        hess[:, col] = (fm - fp) / (2.0 * step)
    defect = float(np.abs(hess - hess.T).max())
    hess = 0.5 * (hess + hess.T)
    if full_output:
        return hess, defect
    return hess


@dataclass(frozen=True)
class NormalModeSet:
    """Result of a normal-mode analysis.

    frequencies_cm1: signed frequencies (negative marks an imaginary
    mode, i.e. a negative Hessian eigenvalue), ascending.  modes:
    (3N, 3N) matrix of mass-weighted eigenvectors (columns,
    orthonormal).  ir_activity: |dmu/dQ|^2 per mode, the harmonic IR
    intensity proxy (zeros when no dipole jacobian was supplied).
    """

    frequencies_cm1: np.ndarray
    modes: np.ndarray
    ir_activity: np.ndarray

    def __post_init__(self):
        for name in ("frequencies_cm1", "modes", "ir_activity"):
            arr = np.ascontiguousarray(
                np.asarray(getattr(self, name), dtype=float))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_modes(self):
        return self.frequencies_cm1.size

    def vibrational(self, threshold_cm1=1.0):
        """Indices of modes with |frequency| above the rigid-body threshold."""
        return np.flatnonzero(np.abs(self.frequencies_cm1) > threshold_cm1)


def normal_modes(hessian, masses, dipole_jac=None) -> NormalModeSet:
    """Mass-weighted normal modes of a symmetric Hessian.

    ``masses``: per-atom masses in electron masses, shape (N,).
    Frequencies in cm^-1, signed: negative marks a negative Hessian
    eigenvalue.  Rigid translations/rotations appear as ~0 cm^-1 modes
    and are retained.  ``dipole_jac``: optional (3, 3N) dmu/dR used for
    the IR-activity proxy.
    """
    hessian = np.asarray(hessian, dtype=float)
    masses = np.asarray(masses, dtype=float)
    inv_sqrt_m = 1.0 / np.sqrt(np.repeat(masses, 3))
    k = hessian * np.outer(inv_sqrt_m, inv_sqrt_m)
    evals, vecs = np.linalg.eigh(k)
    freqs = np.sign(evals) * np.sqrt(np.abs(evals)) * units.INVCM_PER_HARTREE
    if dipole_jac is not None:
        jac_mw = np.asarray(dipole_jac, dtype=float) * inv_sqrt_m
        ir = np.sum((jac_mw @ vecs) ** 2, axis=0)
    else:
        ir = np.zeros_like(freqs)
    return NormalModeSet(frequencies_cm1=freqs, modes=vecs, ir_activity=ir)


def analyze_modes(ff: HarmonicForceField, m: MatterState,
                  step=DEFAULT_FD_STEP) -> NormalModeSet:
    """hessian_fd + normal_modes in one call, IR activity included."""
    return normal_modes(hessian_fd(ff, m, step=step), m.masses,
                        dipole_jacobian(m))


def rigid_mode_basis(m: MatterState) -> np.ndarray:
    """Orthonormal mass-weighted basis of rigid translations and rotations.

    Shape (3N, k) with k = 5 for linear geometries, 6 otherwise.
    """
    pos = m.positions
    masses = m.masses
    com = masses @ pos / masses.sum()
    rel = pos - com
    sqrtm = np.sqrt(np.repeat(masses, 3))
    cols = []
    for x in range(3):
        t = np.zeros((m.n_atoms, 3))
        t[:, x] = 1.0
        cols.append(t.ravel() * sqrtm)
    for axis in np.eye(3):
        cols.append(np.cross(axis, rel).ravel() * sqrtm)
    basis = np.column_stack(cols)
    q, r = np.linalg.qr(basis)
    keep = np.abs(np.diag(r)) > 1e-8 * np.abs(np.diag(r)).max()
    return q[:, keep]


@dataclass(frozen=True)
class PolaritonModel:
    """Solution of the coupled matter-photon quadratic eigenproblem.

    frequencies_cm1 ascending; rigid translations/rotations are
    projected out of the matter block beforehand, so every entry is
    either a (possibly dressed) vibration or a (possibly dressed)
    photon line.  matter_weight / photon_weight give the fraction of
    each eigenvector's norm in the nuclear vs photonic coordinates.
    """

    frequencies_cm1: np.ndarray
    vectors: np.ndarray
    matter_weight: np.ndarray
    photon_weight: np.ndarray
    n_matter: int
    n_photon: int

    def __post_init__(self):
        for name in ("frequencies_cm1", "vectors", "matter_weight",
                     "photon_weight"):
            arr = np.ascontiguousarray(
                np.asarray(getattr(self, name), dtype=float))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def polariton_model(ff: HarmonicForceField, m: MatterState, modes,
                    hessian=None) -> PolaritonModel:
    """Assemble and diagonalize the matter+photon quadratic form.

    ``modes`` is a sequence of PhotonMode (any phase-space values; only
    omega and lambda_vec enter).  The matter block is the mass-weighted
    Hessian plus the dipole self-energy curvature; the bilinear block
    couples matter displacements to each photon coordinate.
    """
    modes = tuple(modes)
    if hessian is None:
        hessian = hessian_fd(ff, m)
    inv_sqrt_m = 1.0 / np.sqrt(np.repeat(m.masses, 3))
    k = hessian * np.outer(inv_sqrt_m, inv_sqrt_m)

    jac_mw = dipole_jacobian(m) * inv_sqrt_m  # (3, 3N)
    n3 = k.shape[0]
    n_ph = len(modes)
    s = np.zeros_like(k)
    c = np.zeros((n3, n_ph))
    omegas = np.empty(n_ph)
    for a, mode in enumerate(modes):
        d = mode.lambda_vec @ jac_mw  # (3N,)
        s += np.outer(d, d)
        c[:, a] = mode.omega * d
        omegas[a] = mode.omega

    # restrict the matter block to the internal (non-rigid) subspace
    rigid = rigid_mode_basis(m)
    proj = np.eye(n3) - rigid @ rigid.T
    vib = np.linalg.eigh(proj)[1][:, rigid.shape[1]:]
    k_v = vib.T @ (k + s) @ vib
    c_v = vib.T @ c

    n_vib = k_v.shape[0]
    big = np.zeros((n_vib + n_ph, n_vib + n_ph))
    big[:n_vib, :n_vib] = k_v
    big[:n_vib, n_vib:] = c_v
    big[n_vib:, :n_vib] = c_v.T
    big[n_vib:, n_vib:] = np.diag(omegas**2)

    evals, vecs = np.linalg.eigh(big)
    freqs = np.sign(evals) * np.sqrt(np.abs(evals)) * units.INVCM_PER_HARTREE
    return PolaritonModel(
        frequencies_cm1=freqs,
        vectors=vecs,
        matter_weight=np.sum(vecs[:n_vib] ** 2, axis=0),
        photon_weight=np.sum(vecs[n_vib:] ** 2, axis=0),
        n_matter=n_vib,
        n_photon=n_ph,
    )


def polariton_frequencies(ff: HarmonicForceField, m: MatterState, modes,
                          hessian=None) -> np.ndarray:
    """Sorted polariton frequencies in cm^-1 (see polariton_model)."""
    return polariton_model(ff, m, modes, hessian=hessian).frequencies_cm1


def polariton_gap(pm: PolaritonModel, center_cm1: float) -> float:
    """Gap between the eigenfrequencies nearest below/above ``center_cm1``.

    The upper-minus-lower polariton splitting when the center is the
    (resonant) cavity frequency.
    """
    freqs = pm.frequencies_cm1
    below = freqs[freqs < center_cm1]
    above = freqs[freqs > center_cm1]
    if below.size == 0 or above.size == 0:
        raise ValueError(
            f"no eigenfrequency pair straddles {center_cm1:g} cm^-1"
        )
    return float(above.min() - below.max())


# ---------------------------------------------------------------------------
# report files
# ---------------------------------------------------------------------------

def write_mode_report(nm: NormalModeSet, path, extra_header=None):
    """One line per mode: frequency, IR activity, mass-weighted eigenvector."""
    with open(path, "w") as fh:
        fh.write("# polaritonmd mode report v1\n")
        if extra_header:
            for key in sorted(extra_header):
                fh.write(f"# {key} {extra_header[key]}\n")
        fh.write("# units: frequency cm^-1; ir_activity (e/sqrt(m_e))^2; "
                 "eigenvector mass-weighted, orthonormal\n")
        fh.write("# columns: frequency_cm1 ir_activity eigenvector...\n")
        for i in range(nm.n_modes):
            vec = " ".join(f"{x:.10e}" for x in nm.modes[:, i])
            fh.write(f"{nm.frequencies_cm1[i]:14.6f} "
                     f"{nm.ir_activity[i]:.10e} {vec}\n")


def write_polariton_report(pm: PolaritonModel, path, extra_header=None):
    """One line per polariton: frequency and matter/photon weights."""
    with open(path, "w") as fh:
        fh.write("# polaritonmd polariton report v1\n")
        if extra_header:
            for key in sorted(extra_header):
                fh.write(f"# {key} {extra_header[key]}\n")
        fh.write(f"# matter modes {pm.n_matter}, photon modes {pm.n_photon}\n")
        fh.write("# units: frequency cm^-1; weights are eigenvector "
                 "norm fractions\n")
        fh.write("# columns: frequency_cm1 matter_weight photon_weight\n")
        for i in range(pm.frequencies_cm1.size):
            fh.write(f"{pm.frequencies_cm1[i]:14.6f} "
                     f"{pm.matter_weight[i]:12.8f} "
                     f"{pm.photon_weight[i]:12.8f}\n")
