"""Built-in molecular presets.

Currently one preset: a linear CO2 molecule with a harmonic force field
fitted so its normal modes land at the target frequencies (asymmetric
stretch 2430 cm^-1, doubly degenerate bend 654 cm^-1, symmetric stretch
1330 cm^-1).  Effective point charges Q_C = +0.8 e, Q_O = -0.4 e carry
the dipole.
"""

import functools

import numpy as np

from . import units
from .model import (
    AngleTerm,
    AtomicSpecies,
    BondCouplingTerm,
    BondTerm,
    HarmonicForceField,
    MatterState,
)
from .modes import analyze_modes

__all__ = ["build_co2_preset", "preset_by_name", "PRESET_NAMES"]

_MASS_C_AMU = 12.011
_MASS_O_AMU = 15.999
_CHARGE_C = 0.8
_CHARGE_O = -0.4
_R0_ANGSTROM = 1.16

_TARGET_ASYM_CM1 = 2430.0
_TARGET_BEND_CM1 = 654.0
_TARGET_SYM_CM1 = 1330.0

_FIT_TOL_CM1 = 1e-6
_FIT_MAX_ITER = 12


def _geometry():
    """Linear O=C=O on the x-axis, atom order (C, O, O), zero velocities."""
    r0 = units.angstrom_to_bohr(_R0_ANGSTROM)
    carbon = AtomicSpecies("C", _MASS_C_AMU, _CHARGE_C)
    oxygen = AtomicSpecies("O", _MASS_O_AMU, _CHARGE_O)
    positions = np.array([
        [0.0, 0.0, 0.0],
        [r0, 0.0, 0.0],
        [-r0, 0.0, 0.0],
    ])
    return MatterState(
        species=(carbon, oxygen, oxygen),
        positions=positions,
        velocities=np.zeros((3, 3)),
    )


def _force_field(k_s, k_ss, k_b):
    r0 = units.angstrom_to_bohr(_R0_ANGSTROM)
    return HarmonicForceField(
        bonds=(BondTerm(0, 1, r0, k_s), BondTerm(0, 2, r0, k_s)),
        angles=(AngleTerm(1, 0, 2, np.pi, k_b),),
        couplings=(BondCouplingTerm(0, 1, k_ss),),
    )


def _vibrational_triplet(params, matter):
    """(bend, sym, asym) frequencies in cm^-1 for the given stiffnesses."""
    nm = analyze_modes(_force_field(*params), matter)
    vib = np.sort(nm.frequencies_cm1[nm.vibrational()])
    if vib.size != 4:
        raise RuntimeError(f"expected 4 vibrations, got {vib.size}")
    # ascending: bend, bend, sym, asym; degenerate bends averaged
    return np.array([0.5 * (vib[0] + vib[1]), vib[2], vib[3]])


@functools.lru_cache(maxsize=1)
def _fitted_stiffnesses():
    """Fit (k_s, k_ss, k_b) so normal modes hit the target frequencies.

    A closed-form small-oscillation inversion seeds the parameters; a
    few Newton steps against the actual normal-mode analysis absorb the
    residual finite-difference bias.
    """
    matter = _geometry()
    m_o = units.amu_to_me(_MASS_O_AMU)
    m_c = units.amu_to_me(_MASS_C_AMU)
    f = 1.0 + 2.0 * m_o / m_c
    r0 = units.angstrom_to_bohr(_R0_ANGSTROM)

    w_a = units.cm1_to_ha(_TARGET_ASYM_CM1)
    w_b = units.cm1_to_ha(_TARGET_BEND_CM1)
    w_s = units.cm1_to_ha(_TARGET_SYM_CM1)

    # small-oscillation relations of the linear triatomic:
    #   w_sym^2  = (k_s + k_ss) / m_O
    #   w_asym^2 = (k_s - k_ss) * f / m_O,  f = 1 + 2 m_O / m_C
    #   w_bend^2 = 2 k_b * f / (m_O r0^2)
    sum_k = m_o * w_s**2
    diff_k = m_o * w_a**2 / f
    params = np.array([
        0.5 * (sum_k + diff_k),
        0.5 * (sum_k - diff_k),
        m_o * r0**2 * w_b**2 / (2.0 * f),
    ])

    target = np.array([_TARGET_BEND_CM1, _TARGET_SYM_CM1, _TARGET_ASYM_CM1])
    for _ in range(_FIT_MAX_ITER):
        resid = _vibrational_triplet(tuple(params), matter) - target
        if np.abs(resid).max() < _FIT_TOL_CM1:
            break
        jac = np.empty((3, 3))
        for col in range(3):
            h = 1e-6 * max(abs(params[col]), 1e-3)
            up = params.copy()
            dn = params.copy()
            up[col] += h
            dn[col] -= h
            jac[:, col] = (
                _vibrational_triplet(tuple(up), matter)
                - _vibrational_triplet(tuple(dn), matter)
            ) / (2.0 * h)
        params = params - np.linalg.solve(jac, resid)
    else:
        raise RuntimeError(
            f"force-field fit did not converge; residual {resid} cm^-1"
        )
    return tuple(params)


def build_co2_preset():
    """Linear CO2 on the x-axis with a fitted harmonic force field.

    Returns (MatterState, HarmonicForceField).  Normal modes of the
    pair: 2430 cm^-1 asymmetric stretch, 1330 cm^-1 symmetric stretch
    (IR-inactive), 654 cm^-1 doubly degenerate bend.  Charges
    Q_C = +0.8 e, Q_O = -0.4 e; r(C=O) = 1.16 angstrom.
    """
    return _geometry(), _force_field(*_fitted_stiffnesses())


PRESET_NAMES = ("co2",)


def preset_by_name(name):
    """Look up a preset builder by its config name."""
    if name == "co2":
        return build_co2_preset()
    raise KeyError(
        f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
    )
