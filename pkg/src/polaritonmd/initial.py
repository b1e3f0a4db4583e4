"""Initial conditions: kick displacements, thermal velocities, photon start.

NOTE: sample_maxwell_boltzmann keeps the center-of-mass momentum by
default (remove_com=False).  Thermal runs of a free molecule then drift
and spin; that is intentional — the rotating-molecule experiments need
the angular momentum the raw draw carries.  Pass remove_com=True to
subtract the net linear momentum (angular momentum is always retained).
"""

import numpy as np

from . import units
from .model import MatterState, PhotonMode

__all__ = ["kick_displacement", "sample_maxwell_boltzmann", "init_photon"]


def kick_displacement(m: MatterState, atom_label: str,
                      delta_angstrom) -> MatterState:
    """Displace every atom with the given label by a fixed vector.

    ``delta_angstrom``: 3-vector in angstrom (converted to bohr
    internally).  Velocities are untouched.  Unknown labels raise
    KeyError.
    """
    delta = units.angstrom_to_bohr(np.asarray(delta_angstrom, dtype=float))
    if delta.shape != (3,):
        raise ValueError("delta must be a 3-vector")
    idx = m.atom_indices(atom_label)
    pos = m.positions.copy()
    pos[idx] += delta
    return m.with_positions(pos)


def sample_maxwell_boltzmann(m: MatterState, temperature_k: float, seed,
                             remove_com: bool = False) -> MatterState:
    """Draw velocities from the Maxwell-Boltzmann distribution at T.

    Each component of atom a is an independent zero-mean normal with
    variance k_B T / M_a (atomic units).  Deterministic per seed.  With
    ``remove_com`` the center-of-mass velocity is subtracted so the
    total linear momentum is zero; angular momentum is never removed.
    """
    if temperature_k < 0:
        raise ValueError("temperature must be >= 0")
    if temperature_k == 0:
        return m.with_velocities(np.zeros_like(m.velocities))
    rng = np.random.default_rng(seed)
    masses = m.masses
    sigma = np.sqrt(units.KB_HA_PER_K * temperature_k / masses)
    vel = rng.standard_normal((m.n_atoms, 3)) * sigma[:, None]
    if remove_com:
        vel = vel - masses @ vel / masses.sum()
    return m.with_velocities(vel)


def init_photon(mode: PhotonMode, q0: float = 0.0,
                p0: float = 0.0) -> PhotonMode:
    """Set the phase-space starting point of a mode (default vacuum at 0,0)."""
    return mode.with_phase_space(q0, p0)
