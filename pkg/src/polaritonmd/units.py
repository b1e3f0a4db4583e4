"""Unit conventions and conversion factors.

Everything internal is in Hartree atomic units (hbar = e = m_e = 1).
The factors below are the single source of truth for all file I/O and
user-facing quantities; modules convert at the boundary and never carry
mixed units internally.
"""

# 1 Hartree expressed as a spectroscopic wavenumber.
INVCM_PER_HARTREE = 219474.6314

# 1 bohr in Angstrom.
ANGSTROM_PER_BOHR = 0.529177

# 1 atomic time unit in femtoseconds.
FS_PER_AU_TIME = 0.0241888

# 1 unified atomic mass unit in electron masses.
ME_PER_AMU = 1822.888486

# Boltzmann constant in Hartree per kelvin (CODATA).
KB_HA_PER_K = 3.166811563e-6

# Frequency in cycles per atomic time unit -> wavenumber in cm^-1.
# Derived from the two pinned factors above so spectra and mode
# frequencies share one conversion chain.
TWO_PI = 6.283185307179586
INVCM_PER_CYCLES_PER_AU = TWO_PI * INVCM_PER_HARTREE


def cm1_to_ha(wavenumber_cm1):
    """Wavenumber (cm^-1) to energy / angular frequency (Ha)."""
    return wavenumber_cm1 / INVCM_PER_HARTREE


def ha_to_cm1(energy_ha):
    """Energy / angular frequency (Ha) to wavenumber (cm^-1)."""
    return energy_ha * INVCM_PER_HARTREE


def angstrom_to_bohr(length_angstrom):
    return length_angstrom / ANGSTROM_PER_BOHR


def bohr_to_angstrom(length_bohr):
    return length_bohr * ANGSTROM_PER_BOHR


def fs_to_au(time_fs):
    return time_fs / FS_PER_AU_TIME


def au_to_fs(time_au):
    return time_au * FS_PER_AU_TIME


def amu_to_me(mass_amu):
    return mass_amu * ME_PER_AMU
