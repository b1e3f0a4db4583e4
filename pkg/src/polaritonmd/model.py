"""Matter model: atomic species, geometries, harmonic force field, dipole.

The electronic problem is closed by a fitted intramolecular harmonic
force field (bond stretches, angle bends, bond-bond couplings) plus
fixed effective point charges that define the molecular dipole
mu(R) = sum_a Q_a R_a.  Everything here is a pure function of immutable
value objects; arrays stored on the value types are marked read-only.
"""

import functools
from dataclasses import dataclass, replace

import numpy as np

from . import units

__all__ = [
    "AtomicSpecies",
    "MatterState",
    "BondTerm",
    "AngleTerm",
    "BondCouplingTerm",
    "HarmonicForceField",
    "DriveSignal",
    "PhotonMode",
    "SimulationState",
    "potential_energy",
    "potential_energy_at",
    "matter_forces",
    "matter_forces_at",
    "dipole_moment",
    "dipole_jacobian",
    "kinetic_energy",
]

# Angle forces use sin(theta) in a denominator; below this the
# linear-geometry limit expression is used instead.
_SIN_THETA_FLOOR = 1e-9


def _readonly(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AtomicSpecies:
    """A nuclear species: label, mass and effective point charge.

    The charge is the force-field surrogate for the bare nuclear charge;
    it carries the electronic screening so that mu = sum Q_a R_a is the
    total molecular dipole.
    """

    label: str
    mass_amu: float
    charge: float  # effective charge, units of e (signed)

    def __post_init__(self):
        if self.mass_amu <= 0:
            raise ValueError(f"species {self.label!r}: mass must be > 0")
        if not self.label:
            raise ValueError("species label must be non-empty")

    @property
    def mass(self):
        """Mass in electron masses (atomic units)."""
        return units.amu_to_me(self.mass_amu)


@dataclass(frozen=True)
class MatterState:
    """Positions and velocities (bohr, bohr per a.t.u.) of all atoms.

    ``species`` holds one AtomicSpecies reference per atom; atoms
    sharing a label must share identical species parameters.
    """

    species: tuple
    positions: np.ndarray  # (N, 3) bohr
    velocities: np.ndarray  # (N, 3) bohr / a.t.u.

    def __post_init__(self):
        pos = _readonly(self.positions)
        vel = _readonly(self.velocities)
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)
        n = len(self.species)
        if n == 0:
            raise ValueError("need at least one atom")
        if pos.shape != (n, 3) or vel.shape != (n, 3):
            raise ValueError(
                f"positions/velocities must have shape ({n}, 3), "
                f"got {pos.shape} and {vel.shape}"
            )
        if not (np.isfinite(pos).all() and np.isfinite(vel).all()):
            raise ValueError("non-finite coordinates or velocities")
        by_label = {}
        for sp in self.species:
            seen = by_label.setdefault(sp.label, sp)
            if seen != sp:
                raise ValueError(
                    f"label {sp.label!r} bound to two different species"
                )

    @property
    def n_atoms(self):
        return len(self.species)

    @property
    def labels(self):
        return tuple(sp.label for sp in self.species)

    @property
    def masses(self):
        """Per-atom masses in electron masses, shape (N,)."""
        return np.array([sp.mass for sp in self.species])

    @property
    def charges(self):
        """Per-atom effective charges in e, shape (N,)."""
        return np.array([sp.charge for sp in self.species])

    def with_positions(self, positions):
        return replace(self, positions=positions)

    def with_velocities(self, velocities):
        return replace(self, velocities=velocities)

    def atom_indices(self, label):
        """Indices of all atoms carrying ``label``."""
        idx = [i for i, sp in enumerate(self.species) if sp.label == label]
        if not idx:
            raise KeyError(f"no atom with label {label!r}")
        return idx


@dataclass(frozen=True)
class BondTerm:
    i: int
    j: int
    r0: float  # equilibrium length, bohr
    k: float  # stiffness, Ha/bohr^2


@dataclass(frozen=True)
class AngleTerm:
    i: int
    j: int  # vertex
    k: int
    theta0: float  # equilibrium angle, rad
    kb: float  # stiffness, Ha/rad^2


@dataclass(frozen=True)
class BondCouplingTerm:
    bond_a: int  # index into the bond list
    bond_b: int
    k: float  # coupling, Ha/bohr^2; energy k * (r_a - r0_a)(r_b - r0_b)


@dataclass(frozen=True)
class HarmonicForceField:
    """Harmonic intramolecular potential.

    V(R) = sum_bonds 1/2 k (r - r0)^2
         + sum_angles 1/2 kb (theta - theta0)^2
         + sum_couplings kss (r_a - r0_a)(r_b - r0_b)
    """

    bonds: tuple = ()
    angles: tuple = ()
    couplings: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bonds", tuple(self.bonds))
        object.__setattr__(self, "angles", tuple(self.angles))
        object.__setattr__(self, "couplings", tuple(self.couplings))
        for b in self.bonds:
            if b.k < 0 or b.r0 <= 0:
                raise ValueError(f"bad bond term {b}")
        for a in self.angles:
            if a.kb < 0:
                raise ValueError(f"bad angle term {a}")
        nb = len(self.bonds)
        for c in self.couplings:
            if not (0 <= c.bond_a < nb and 0 <= c.bond_b < nb):
                raise IndexError(f"coupling references missing bond: {c}")

    def check_indices(self, n_atoms):
        for b in self.bonds:
            if not (0 <= b.i < n_atoms and 0 <= b.j < n_atoms):
                raise IndexError(f"bond atom index out of range: {b}")
        for a in self.angles:
            if not all(0 <= x < n_atoms for x in (a.i, a.j, a.k)):
                raise IndexError(f"angle atom index out of range: {a}")


@dataclass(frozen=True)
class DriveSignal:
    """Scalar time signal used as an external drive.

    kinds:
      none                        -> 0 everywhere
      sinusoid(amplitude, omega, phase) -> amplitude * sin(omega t + phase)
      impulse(strength, t0, width)      -> Gaussian pulse
                                           strength * exp(-(t-t0)^2 / 2 width^2)

    ``omega`` is an angular frequency in Ha; times in a.t.u.  Applied
    either as a per-species force (together with a direction vector, see
    the integrator's drive bindings) or as the photon source current
    j_ext of a mode.
    """

    kind: str = "none"
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    t0: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("none", "sinusoid", "impulse"):
            raise ValueError(f"unknown drive kind {self.kind!r}")
        if self.kind == "impulse" and self.width <= 0:
            raise ValueError("impulse width must be > 0")

    def __call__(self, t):
        if self.kind == "none":
            return 0.0 * t if isinstance(t, np.ndarray) else 0.0
        if self.kind == "sinusoid":
            return self.amplitude * np.sin(self.omega * t + self.phase)
        return self.amplitude * np.exp(-0.5 * ((t - self.t0) / self.width) ** 2)


@dataclass(frozen=True)
class PhotonMode:
    """One quantized cavity mode in mean-field (phase-space) description.

    omega: mode frequency in Ha.  lambda_vec: polarization-weighted
    coupling vector in sqrt(Ha)/(e bohr).  (q, p) are the displacement
    coordinate and its conjugate momentum.  ``drive`` produces the
    external source current j_ext(t).
    """

    omega: float
    lambda_vec: np.ndarray
    q: float = 0.0
    p: float = 0.0
    drive: DriveSignal | None = None

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("mode frequency must be > 0")
        object.__setattr__(self, "lambda_vec", _readonly(self.lambda_vec))
        if self.lambda_vec.shape != (3,):
            raise ValueError("lambda_vec must be a 3-vector")

    @property
    def coupling_strength(self):
        """|lambda_vec|."""
        return float(np.linalg.norm(self.lambda_vec))

    @property
    def polarization(self):
        """Unit polarization vector; undefined (raises) for |lambda| = 0."""
        norm = self.coupling_strength
        if norm == 0.0:
            raise ValueError("polarization undefined for zero coupling")
        return self.lambda_vec / norm

    def with_phase_space(self, q, p):
        return replace(self, q=float(q), p=float(p))


@dataclass(frozen=True)
class SimulationState:
    """Full dynamical state: time, matter, and all photon modes."""

    time: float
    matter: MatterState
    modes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))


# ---------------------------------------------------------------------------
# force-field evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _FFArrays:
    """Index/parameter arrays of a force field, for vectorized evaluation."""

    bond_i: np.ndarray
    bond_j: np.ndarray
    bond_r0: np.ndarray
    bond_k: np.ndarray
    ang_i: np.ndarray
    ang_j: np.ndarray
    ang_k: np.ndarray
    ang_theta0: np.ndarray
    ang_kb: np.ndarray
    coup_a: np.ndarray
    coup_b: np.ndarray
    coup_k: np.ndarray


@functools.lru_cache(maxsize=32)
def _ff_arrays(ff: HarmonicForceField) -> _FFArrays:
    return _FFArrays(
        bond_i=np.array([b.i for b in ff.bonds], dtype=int),
        bond_j=np.array([b.j for b in ff.bonds], dtype=int),
        bond_r0=np.array([b.r0 for b in ff.bonds]),
        bond_k=np.array([b.k for b in ff.bonds]),
        ang_i=np.array([a.i for a in ff.angles], dtype=int),
        ang_j=np.array([a.j for a in ff.angles], dtype=int),
        ang_k=np.array([a.k for a in ff.angles], dtype=int),
        ang_theta0=np.array([a.theta0 for a in ff.angles]),
        ang_kb=np.array([a.kb for a in ff.angles]),
        coup_a=np.array([c.bond_a for c in ff.couplings], dtype=int),
        coup_b=np.array([c.bond_b for c in ff.couplings], dtype=int),
        coup_k=np.array([c.k for c in ff.couplings]),
    )


def _row_norms(a):
    return np.sqrt(np.einsum("ij,ij->i", a, a))


def _cross_rows(a, b):
    out = np.empty_like(a)
    out[:, 0] = a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1]
    out[:, 1] = a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2]
    out[:, 2] = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    return out


def _bond_extensions(fa: _FFArrays, pos):
    """Per-bond (extension, unit vector i->j)."""
    d = pos[fa.bond_j] - pos[fa.bond_i]
    r = _row_norms(d)
    return r - fa.bond_r0, d / r[:, None]


def _angle_geometry(fa: _FFArrays, pos):
    """Per-angle (theta, sin theta, cos theta, unit i-j, unit k-j, norms)."""
    u = pos[fa.ang_i] - pos[fa.ang_j]
    v = pos[fa.ang_k] - pos[fa.ang_j]
    nu = _row_norms(u)
    nv = _row_norms(v)
    uh = u / nu[:, None]
    vh = v / nv[:, None]
    c = np.einsum("ij,ij->i", uh, vh)
    s = _row_norms(_cross_rows(uh, vh))
    return np.arctan2(s, c), s, c, uh, vh, nu, nv


def potential_energy_at(ff: HarmonicForceField, positions) -> float:
    """potential_energy as a function of a bare (N, 3) position array."""
    fa = _ff_arrays(ff)
    pos = np.asarray(positions, dtype=float)
    energy = 0.0
    if fa.bond_i.size:
        ext, _ = _bond_extensions(fa, pos)
        energy += 0.5 * np.sum(fa.bond_k * ext**2)
        if fa.coup_a.size:
            energy += np.sum(fa.coup_k * ext[fa.coup_a] * ext[fa.coup_b])
    if fa.ang_i.size:
        theta = _angle_geometry(fa, pos)[0]
        energy += 0.5 * np.sum(fa.ang_kb * (theta - fa.ang_theta0) ** 2)
    return float(energy)


def matter_forces_at(ff: HarmonicForceField, positions) -> np.ndarray:
    """matter_forces as a function of a bare (N, 3) position array."""
    fa = _ff_arrays(ff)
    pos = np.asarray(positions, dtype=float)
    forces = np.zeros_like(pos)

    if fa.bond_i.size:
        ext, unit = _bond_extensions(fa, pos)
        # dV/d(extension) per bond; d(extension)/dR is +unit at atom j,
        # -unit at atom i.
        dv_dext = fa.bond_k * ext
        if fa.coup_a.size:
            np.add.at(dv_dext, fa.coup_a, fa.coup_k * ext[fa.coup_b])
            np.add.at(dv_dext, fa.coup_b, fa.coup_k * ext[fa.coup_a])
        f = dv_dext[:, None] * unit
        np.add.at(forces, fa.bond_i, f)
        np.add.at(forces, fa.bond_j, -f)

    if fa.ang_i.size:
        theta, s, c, uh, vh, nu, nv = _angle_geometry(fa, pos)
        # Force prefactor kb*(theta - theta0)/sin(theta); regular at a
        # linear equilibrium (theta0 = pi) where it tends to -kb.
        regular = s >= _SIN_THETA_FLOOR
        linear_eq = np.abs(fa.ang_theta0 - np.pi) < 1e-8
        denom = np.where(regular, s, _SIN_THETA_FLOOR)
        pref = fa.ang_kb * (theta - fa.ang_theta0) / denom
        pref = np.where(regular, pref, np.where(linear_eq, -fa.ang_kb, pref))
        # grad_i cos(theta) = (vh - c uh)/nu and the i<->k mirror image;
        # F = pref * grad cos(theta), vertex takes the balancing force.
        gi = (vh - c[:, None] * uh) / nu[:, None]
        gk = (uh - c[:, None] * vh) / nv[:, None]
        np.add.at(forces, fa.ang_i, pref[:, None] * gi)
        np.add.at(forces, fa.ang_k, pref[:, None] * gk)
        np.add.at(forces, fa.ang_j, -pref[:, None] * (gi + gk))

    return forces


def potential_energy(ff: HarmonicForceField, m: MatterState) -> float:
    """Force-field potential in Ha; zero exactly at the reference geometry."""
    ff.check_indices(m.n_atoms)
    return potential_energy_at(ff, m.positions)


def matter_forces(ff: HarmonicForceField, m: MatterState) -> np.ndarray:
    """Exact negative gradient of potential_energy, shape (N, 3), Ha/bohr."""
    ff.check_indices(m.n_atoms)
    return matter_forces_at(ff, m.positions)


# ---------------------------------------------------------------------------
# dipole
# ---------------------------------------------------------------------------

def dipole_moment(m: MatterState, origin=None) -> np.ndarray:
    """Total dipole mu = sum_a Q_a (R_a - origin) in e*bohr.

    For a neutral system the dipole is origin independent and ``origin``
    is ignored.  A charged system has an origin-dependent dipole, which
    is rejected unless an explicit origin is supplied.
    """
    charges = m.charges
    total = charges.sum()
    if abs(total) > 1e-12:
        if origin is None:
            raise ValueError(
                f"system has net charge {total:+.3e} e; dipole is origin "
                "dependent, pass an explicit origin"
            )
        return charges @ (m.positions - np.asarray(origin, dtype=float))
    return charges @ m.positions


def dipole_jacobian(m: MatterState) -> np.ndarray:
    """d(mu)/dR as a (3, 3N) matrix: block Q_a * I3 per atom.

    Constant in R for the point-charge model.
    """
    n = m.n_atoms
    jac = np.zeros((3, 3 * n))
    for a, q in enumerate(m.charges):
        jac[:, 3 * a:3 * a + 3] = q * np.eye(3)
    return jac


def kinetic_energy(m: MatterState) -> float:
    """Nuclear kinetic energy in Ha."""
    return float(0.5 * np.sum(m.masses[:, None] * m.velocities**2))
