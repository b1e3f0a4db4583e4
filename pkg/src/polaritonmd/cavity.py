"""Cavity-photon dynamics: sources, forces on matter, energies, propagator.

Each photon mode is a harmonic oscillator displaced by the molecular
dipole,

    H_p = sum_alpha 1/2 [ p_alpha^2 + omega_alpha^2
                          (q_alpha + lambda_alpha . mu / omega_alpha)^2 ],

so the mode obeys  q'' = -omega^2 q + s(t)  with source
s = -omega (lambda . mu) - j_ext / omega, and the nuclei feel
F_a = -Q_a sum_alpha (omega_alpha q_alpha + lambda_alpha . mu)
lambda_alpha.  All signs follow from gradients of H_p.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    HarmonicForceField,
    MatterState,
    PhotonMode,
    dipole_moment,
    kinetic_energy,
    potential_energy,
)

__all__ = [
    "photon_source",
    "cavity_force_on_atoms",
    "displacement_field",
    "total_displacement_field",
    "propagate_photon_analytic",
    "CavityEnergyBreakdown",
    "total_energy",
]


def photon_source(mode: PhotonMode, mu, t: float) -> float:
    """Source term s(t) in the mode equation q'' = -omega^2 q + s(t).

    s = -omega (lambda . mu) - j_ext(t) / omega.
    """
    s = -mode.omega * float(mode.lambda_vec @ np.asarray(mu, dtype=float))
    if mode.drive is not None:
        s -= mode.drive(t) / mode.omega
    return s


def cavity_force_on_atoms(modes, m: MatterState) -> np.ndarray:
    """Cavity force on each atom, (N, 3), Ha/bohr.

    F_a = -Q_a sum_alpha (omega_alpha q_alpha + lambda_alpha . mu)
    lambda_alpha; the exact negative position-gradient of the photon
    potential energy.
    """
    forces = np.zeros_like(m.positions)
    modes = tuple(modes)
    if not modes:
        return forces
    mu = dipole_moment(m)
    acc = np.zeros(3)
    for mode in modes:
        acc += (mode.omega * mode.q + float(mode.lambda_vec @ mu)) \
            * mode.lambda_vec
    return -m.charges[:, None] * acc[None, :]


def displacement_field(mode: PhotonMode) -> np.ndarray:
    """Electric displacement D = sqrt(4 pi) omega lambda q of one mode.

    Evaluated at the center of charge; constant over the molecule in
    the dipole approximation.
    """
    return math.sqrt(4.0 * math.pi) * mode.omega * mode.q * mode.lambda_vec


def total_displacement_field(modes) -> np.ndarray:
    """Sum of displacement_field over all modes."""
    total = np.zeros(3)
    for mode in modes:
        total += displacement_field(mode)
    return total


def propagate_photon_analytic(mode: PhotonMode, s0: float, s1: float,
                              dt: float):
    """Advance (q, p) of one mode by dt under a linearly interpolated source.

    Exact solution of q'' = -omega^2 q + s(tau) with
    s(tau) = s0 + (s1 - s0) tau / dt on tau in [0, dt]: the particular
    solution (s0 + b tau)/omega^2 is subtracted, the remainder rotates
    freely in phase space, and the particular part is restored at dt.
    Fixed point for constant source s: (q, p) = (s / omega^2, 0).

    Returns the new (q, p) pair.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    w = mode.omega
    x = w * dt
    c = math.cos(x)
    s = math.sin(x)
    slope_v = (s1 - s0) / (dt * w * w)  # velocity of the particular solution
    dq = mode.q - s0 / (w * w)
    dp = mode.p - slope_v
    q_new = dq * c + dp * s / w + s1 / (w * w)
    p_new = -dq * w * s + dp * c + slope_v
    return q_new, p_new


@dataclass(frozen=True)
class CavityEnergyBreakdown:
    """Energy bookkeeping of the coupled matter-photon system (all Ha)."""

    kinetic_matter: float
    potential_ff: float
    photon_kinetic: float
    photon_potential: float

    @property
    def total(self) -> float:
        return (self.kinetic_matter + self.potential_ff
                + self.photon_kinetic + self.photon_potential)


def total_energy(ff: HarmonicForceField, m: MatterState,
                 modes) -> CavityEnergyBreakdown:
    """Full energy breakdown; photon potential is
    1/2 sum (omega q + lambda . mu)^2, which contains the dipole
    self-energy (nonzero even at q = 0 when the dipole is finite).
    """
    modes = tuple(modes)
    photon_kin = 0.0
    photon_pot = 0.0
    if modes:
        mu = dipole_moment(m)
        for mode in modes:
            photon_kin += 0.5 * mode.p**2
            photon_pot += 0.5 * (
                mode.omega * mode.q + float(mode.lambda_vec @ mu)
            ) ** 2
    return CavityEnergyBreakdown(
        kinetic_matter=kinetic_energy(m),
        potential_ff=potential_energy(ff, m),
        photon_kinetic=photon_kin,
        photon_potential=photon_pot,
    )
