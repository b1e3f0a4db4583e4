"""Coupled nuclear/photon time propagation and trajectory recording.

Nuclei advance by velocity-Verlet under the total force (force field +
cavity + external drives); photon modes advance once per step with the
exact propagator for a source interpolated linearly between the dipole
at the step endpoints.  Scheme per step:

    half-kick -> drift -> photon analytic update over dt -> half-kick

The force for the closing half-kick is evaluated at the new positions
and new photon coordinates, and cached for the next step.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import units
from .model import (
    DriveSignal,
    HarmonicForceField,
    MatterState,
    AtomicSpecies,
    SimulationState,
    matter_forces_at,
    potential_energy_at,
)

__all__ = [
    "MatterDrive",
    "IntegrationPlan",
    "Trajectory",
    "NonFiniteForceError",
    "step",
    "run_trajectory",
    "write_trajectory",
    "read_trajectory",
]

log = logging.getLogger(__name__)

_TRAJECTORY_FORMAT = "polaritonmd trajectory v1"


class NonFiniteForceError(RuntimeError):
    """A force component became NaN/inf during propagation."""

    def __init__(self, atom_index, term, time_fs):
        self.atom_index = atom_index
        self.term = term
        self.time_fs = time_fs
        super().__init__(
            f"non-finite {term} force on atom {atom_index} "
            f"at t = {time_fs:.4f} fs"
        )


@dataclass(frozen=True)
class MatterDrive:
    """External force drive on every atom of one species.

    Force on each matching atom is signal(t) * direction (Ha/bohr when
    |direction| = 1 and the signal amplitude carries the magnitude).
    """

    label: str
    direction: np.ndarray
    signal: DriveSignal

    def __post_init__(self):
        d = np.ascontiguousarray(np.asarray(self.direction, dtype=float))
        if d.shape != (3,):
            raise ValueError("drive direction must be a 3-vector")
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class IntegrationPlan:
    """How to advance a SimulationState in time.

    dt_fs: step; t_end_fs: total simulated span (rounded to a whole
    number of steps); record_stride: steps between recorded samples;
    drives: MatterDrive bindings; seed: provenance tag recorded with
    the trajectory (sampling happens elsewhere).
    """

    dt_fs: float = 0.1
    t_end_fs: float = 1000.0
    record_stride: int = 1
    drives: tuple = ()
    seed: int | None = None

    def __post_init__(self):
        if self.dt_fs <= 0:
            raise ValueError("dt_fs must be > 0")
        if self.t_end_fs < self.dt_fs:
            raise ValueError("t_end_fs must be >= dt_fs")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        object.__setattr__(self, "drives", tuple(self.drives))

    @property
    def n_steps(self):
        return max(1, int(round(self.t_end_fs / self.dt_fs)))


@dataclass(frozen=True)
class Trajectory:
    """Recorded time series of a run.

    Arrays are indexed [sample, ...]; times are uniformly spaced by
    dt_fs * record_stride.  ``velocities`` is None for trajectories
    read back from disk (the file stores positions only).
    """

    times_fs: np.ndarray
    positions: np.ndarray  # (S, N, 3) bohr
    velocities: np.ndarray | None  # (S, N, 3) bohr / a.t.u.
    photon_q: np.ndarray  # (S, M)
    photon_p: np.ndarray  # (S, M)
    dipole: np.ndarray  # (S, 3) e*bohr
    energy_kinetic_matter: np.ndarray
    energy_potential_ff: np.ndarray
    energy_photon_kinetic: np.ndarray
    energy_photon_potential: np.ndarray
    species: tuple | None = None
    mode_omegas: np.ndarray | None = None  # (M,) Ha
    mode_lambdas: np.ndarray | None = None  # (M, 3)
    seed: int | None = None

    def __post_init__(self):
        for name in ("times_fs", "positions", "velocities", "photon_q",
                     "photon_p", "dipole", "energy_kinetic_matter",
                     "energy_potential_ff", "energy_photon_kinetic",
                     "energy_photon_potential", "mode_omegas",
                     "mode_lambdas"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.ascontiguousarray(np.asarray(arr, dtype=float))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_samples(self):
        return self.times_fs.size

    @property
    def n_atoms(self):
        return self.positions.shape[1]

    @property
    def n_modes(self):
        return self.photon_q.shape[1]

    @property
    def sample_dt_fs(self):
        if self.n_samples < 2:
            raise ValueError("need at least two samples for a spacing")
        return float(self.times_fs[1] - self.times_fs[0])

    @property
    def energy_total(self):
        return (self.energy_kinetic_matter + self.energy_potential_ff
                + self.energy_photon_kinetic + self.energy_photon_potential)

    @property
    def energy_drift_abs(self):
        """max |E(t) - E(0)| in Ha."""
        e = self.energy_total
        return float(np.abs(e - e[0]).max())

    @property
    def labels(self):
        if self.species is None:
            return None
        return tuple(sp.label for sp in self.species)

    def species_position_sum(self, label):
        """Sum of positions over all atoms of a species, (S, 3) bohr."""
        if self.species is None:
            raise ValueError("trajectory carries no species metadata")
        idx = [i for i, sp in enumerate(self.species) if sp.label == label]
        if not idx:
            raise KeyError(f"no atom with label {label!r}")
        return self.positions[:, idx, :].sum(axis=1)

    def state_at(self, i) -> SimulationState:
        """Reconstruct the full SimulationState at sample ``i``."""
        if self.species is None:
            raise ValueError("trajectory carries no species metadata")
        if self.velocities is None:
            raise ValueError("trajectory carries no velocities")
        from .model import PhotonMode

        matter = MatterState(self.species, self.positions[i],
                             self.velocities[i])
        modes = tuple(
            PhotonMode(omega=float(self.mode_omegas[a]),
                       lambda_vec=self.mode_lambdas[a],
                       q=float(self.photon_q[i, a]),
                       p=float(self.photon_p[i, a]))
            for a in range(self.n_modes)
        )
        return SimulationState(
            time=units.fs_to_au(float(self.times_fs[i])),
            matter=matter, modes=modes,
        )

    @property
    def final_state(self) -> SimulationState:
        return self.state_at(self.n_samples - 1)


class _Kernel:
    """Static data + one-step update shared by step() and run_trajectory()."""

    def __init__(self, state: SimulationState, ff: HarmonicForceField,
                 plan: IntegrationPlan):
        m = state.matter
        ff.check_indices(m.n_atoms)
        self.ff = ff
        self.dt = units.fs_to_au(plan.dt_fs)
        self.masses = m.masses[:, None]
        self.charges = m.charges
        modes = state.modes
        self.n_modes = len(modes)
        if self.n_modes and abs(float(self.charges.sum())) > 1e-12:
            raise ValueError(
                "cavity coupling needs a neutral molecule; net charge "
                f"{float(self.charges.sum()):+.3e} makes the dipole "
                "origin-dependent"
            )
        self.omega = np.array([md.omega for md in modes])
        self.lam = (np.array([md.lambda_vec for md in modes])
                    if modes else np.zeros((0, 3)))
        self.mode_drives = [md.drive for md in modes]
        self.any_mode_drive = any(d is not None for d in self.mode_drives)
        x = self.omega * self.dt
        self.cos = np.cos(x)
        self.sin = np.sin(x)
        self.w2 = self.omega * self.omega
        self.matter_drives = [
            (np.array(m.atom_indices(d.label), dtype=int), d.direction,
             d.signal)
            for d in plan.drives
        ]

    def source(self, mu, t):
        """Per-mode source vector s(t)."""
        s = -self.omega * (self.lam @ mu)
        if self.any_mode_drive:
            j = np.array([0.0 if d is None else d(t)
                          for d in self.mode_drives])
            s = s - j / self.omega
        return s

    def force(self, pos, q, t):
        """Total force and mu at (pos, q, t); raises on non-finite values."""
        f = matter_forces_at(self.ff, pos)
        mu = self.charges @ pos
        if self.n_modes:
            acc = ((self.omega * q + self.lam @ mu) @ self.lam)
            f = f - self.charges[:, None] * acc[None, :]
        for idx, direction, signal in self.matter_drives:
            f[idx] += signal(t) * direction
        if not np.isfinite(f).all():
            self._raise_nonfinite(pos, q, t)
        return f, mu

    def _raise_nonfinite(self, pos, q, t):
        t_fs = units.au_to_fs(t)
        f_ff = matter_forces_at(self.ff, pos)
        if not np.isfinite(f_ff).all():
            atom = int(np.argwhere(~np.isfinite(f_ff))[0][0])
            raise NonFiniteForceError(atom, "force-field", t_fs)
        mu = self.charges @ pos
        if self.n_modes:
            acc = ((self.omega * q + self.lam @ mu) @ self.lam)
            f_cav = -self.charges[:, None] * acc[None, :]
            if not np.isfinite(f_cav).all():
                atom = int(np.argwhere(~np.isfinite(f_cav))[0][0])
                raise NonFiniteForceError(atom, "cavity", t_fs)
        raise NonFiniteForceError(0, "drive", t_fs)

    def advance(self, pos, vel, q, p, t, f, mu):
        """One velocity-Verlet + analytic-photon step.

        Takes and returns plain arrays; ``f``/``mu`` are the cached
        force and dipole at (pos, q, t).
        """
        dt = self.dt
        v_half = vel + (0.5 * dt) * f / self.masses
        pos1 = pos + dt * v_half
        if self.n_modes:
            mu1 = self.charges @ pos1
            s0 = self.source(mu, t)
            s1 = self.source(mu1, t + dt)
            w = self.omega
            slope_v = (s1 - s0) / (dt * w * w)
            dq = q - s0 / (w * w)
            dp = p - slope_v
            q1 = dq * self.cos + dp * self.sin / w + s1 / (w * w)
            p1 = -dq * w * self.sin + dp * self.cos + slope_v
        else:
            q1, p1 = q, p
        f1, mu1 = self.force(pos1, q1, t + dt)
        vel1 = v_half + (0.5 * dt) * f1 / self.masses
        return pos1, vel1, q1, p1, t + dt, f1, mu1

    def energies(self, pos, vel, q, p, mu):
        e_kin = 0.5 * float(np.sum(self.masses * vel**2))
        e_pot = potential_energy_at(self.ff, pos)
        if self.n_modes:
            ph_kin = 0.5 * float(np.sum(p**2))
            ph_pot = 0.5 * float(np.sum((self.omega * q + self.lam @ mu)**2))
        else:
            ph_kin = ph_pot = 0.0
        return e_kin, e_pot, ph_kin, ph_pot


def step(state: SimulationState, ff: HarmonicForceField,
         plan: IntegrationPlan) -> SimulationState:
    """Advance a SimulationState by one step of plan.dt_fs."""
    kern = _Kernel(state, ff, plan)
    pos = state.matter.positions.copy()
    vel = state.matter.velocities.copy()
    q = np.array([md.q for md in state.modes])
    p = np.array([md.p for md in state.modes])
    f, mu = kern.force(pos, q, state.time)
    pos, vel, q, p, t, _, _ = kern.advance(pos, vel, q, p, state.time, f, mu)
    matter = state.matter.with_positions(pos).with_velocities(vel)
    modes = tuple(md.with_phase_space(q[a], p[a])
                  for a, md in enumerate(state.modes))
    return SimulationState(time=t, matter=matter, modes=modes)


def run_trajectory(state0: SimulationState, ff: HarmonicForceField,
                   plan: IntegrationPlan) -> Trajectory:
    """Propagate for plan.t_end_fs, recording every record_stride steps."""
    kern = _Kernel(state0, ff, plan)
    n_steps = plan.n_steps
    stride = plan.record_stride
    n_samples = n_steps // stride + 1
    n_atoms = state0.matter.n_atoms
    n_modes = len(state0.modes)

    times = np.empty(n_samples)
    positions = np.empty((n_samples, n_atoms, 3))
    velocities = np.empty((n_samples, n_atoms, 3))
    photon_q = np.empty((n_samples, n_modes))
    photon_p = np.empty((n_samples, n_modes))
    dipole = np.empty((n_samples, 3))
    energies = np.empty((n_samples, 4))

    pos = state0.matter.positions.copy()
    vel = state0.matter.velocities.copy()
    q = np.array([md.q for md in state0.modes])
    p = np.array([md.p for md in state0.modes])
    t = state0.time
    f, mu = kern.force(pos, q, t)

    def record(i):
        times[i] = units.au_to_fs(t)
        positions[i] = pos
        velocities[i] = vel
        photon_q[i] = q
        photon_p[i] = p
        dipole[i] = mu
        energies[i] = kern.energies(pos, vel, q, p, mu)

    record(0)
    sample = 1
    for n in range(1, n_steps + 1):
        pos, vel, q, p, t, f, mu = kern.advance(pos, vel, q, p, t, f, mu)
        if n % stride == 0:
            record(sample)
            sample += 1

    traj = Trajectory(
        times_fs=times,
        positions=positions,
        velocities=velocities,
        photon_q=photon_q,
        photon_p=photon_p,
        dipole=dipole,
        energy_kinetic_matter=energies[:, 0],
        energy_potential_ff=energies[:, 1],
        energy_photon_kinetic=energies[:, 2],
        energy_photon_potential=energies[:, 3],
        species=state0.matter.species,
        mode_omegas=kern.omega,
        mode_lambdas=kern.lam,
        seed=plan.seed,
    )
    e0 = traj.energy_total[0]
    rel = traj.energy_drift_abs / max(abs(e0), 1e-300)
    log.info(
        "trajectory finished: %d steps, max |E - E0| = %.3e Ha "
        "(relative %.3e)", n_steps, traj.energy_drift_abs, rel,
    )
    return traj


# ---------------------------------------------------------------------------
# trajectory files
# ---------------------------------------------------------------------------

def write_trajectory(traj: Trajectory, path, extra_header=None):
    """Write a trajectory as a column text file.

    Header lines start with '#' and declare the format version, system
    composition, units, and column layout; fully deterministic (no
    timestamps).  ``extra_header`` is an optional {key: value} mapping
    appended in sorted-key order (e.g. a config hash).
    """
    cols = ["t_fs"]
    for a in range(traj.n_atoms):
        cols += [f"x{a}", f"y{a}", f"z{a}"]
    for m in range(traj.n_modes):
        cols += [f"q{m}", f"p{m}"]
    cols += ["mu_x", "mu_y", "mu_z",
             "e_kin_matter", "e_pot_ff", "e_kin_photon", "e_pot_photon",
             "e_total"]

    lines = [f"# {_TRAJECTORY_FORMAT}",
             f"# natoms {traj.n_atoms} nmodes {traj.n_modes} "
             f"nsamples {traj.n_samples}"]
    if traj.species is not None:
        for a, sp in enumerate(traj.species):
            lines.append(
                f"# atom {a} {sp.label} mass_amu {float(sp.mass_amu)!r} "
                f"charge {float(sp.charge)!r}"
            )
    if traj.mode_omegas is not None:
        for m in range(traj.n_modes):
            lam = traj.mode_lambdas[m]
            lines.append(
                f"# mode {m} omega_ha {float(traj.mode_omegas[m])!r} "
                f"lambda {float(lam[0])!r} {float(lam[1])!r} {float(lam[2])!r}"
            )
    if traj.seed is not None:
        lines.append(f"# seed {traj.seed}")
    if extra_header:
        for key in sorted(extra_header):
            lines.append(f"# {key} {extra_header[key]}")
    lines.append("# units: t fs; positions bohr; q,p atomic; "
                 "mu e*bohr; energies Ha")
    lines.append("# columns: " + " ".join(cols))

    # q/p interleaved per mode to match the declared column order
    qp = np.stack([traj.photon_q, traj.photon_p], axis=2) \
        .reshape(traj.n_samples, -1)
    data = np.column_stack([
        traj.times_fs,
        traj.positions.reshape(traj.n_samples, -1),
        qp,
        traj.dipole,
        traj.energy_kinetic_matter,
        traj.energy_potential_ff,
        traj.energy_photon_kinetic,
        traj.energy_photon_potential,
        traj.energy_total,
    ])
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
        np.savetxt(fh, data, fmt="%.17e")


def read_trajectory(path) -> Trajectory:
    """Read a file written by write_trajectory.

    Velocity data is not stored on disk, so ``velocities`` is None on
    the result; everything else round-trips exactly ('%.17e' output).
    """
    species = {}
    modes = {}
    seed = None
    n_atoms = n_modes = None
    with open(path) as fh:
        header = []
        for line in fh:
            if not line.startswith("#"):
                break
            header.append(line[1:].strip())
    if not header or header[0] != _TRAJECTORY_FORMAT:
        raise ValueError(f"{path}: not a {_TRAJECTORY_FORMAT} file")
    for entry in header[1:]:
        fields = entry.split()
        if fields[:1] == ["natoms"]:
            n_atoms = int(fields[1])
            n_modes = int(fields[3])
        elif fields[:1] == ["atom"]:
            species[int(fields[1])] = AtomicSpecies(
                label=fields[2], mass_amu=float(fields[4]),
                charge=float(fields[6]),
            )
        elif fields[:1] == ["mode"]:
            modes[int(fields[1])] = (
                float(fields[3]), np.array([float(x) for x in fields[5:8]]),
            )
        elif fields[:1] == ["seed"]:
            seed = int(fields[1])
    if n_atoms is None:
        raise ValueError(f"{path}: missing size header")

    data = np.loadtxt(path, ndmin=2)
    s = data.shape[0]
    col = 0

    def take(n):
        nonlocal col
        block = data[:, col:col + n]
        col += n
        return block

    times = take(1)[:, 0]
    pos = take(3 * n_atoms).reshape(s, n_atoms, 3)
    qp = take(2 * n_modes).reshape(s, n_modes, 2) if n_modes \
        else np.empty((s, 0, 2))
    mu = take(3)
    e = take(5)
    return Trajectory(
        times_fs=times,
        positions=pos,
        velocities=None,
        photon_q=qp[:, :, 0],
        photon_p=qp[:, :, 1],
        dipole=mu,
        energy_kinetic_matter=e[:, 0],
        energy_potential_ff=e[:, 1],
        energy_photon_kinetic=e[:, 2],
        energy_photon_potential=e[:, 3],
        species=tuple(species[i] for i in range(n_atoms)) if species else None,
        mode_omegas=np.array([modes[i][0] for i in range(n_modes)])
        if modes else np.zeros(0),
        mode_lambdas=np.array([modes[i][1] for i in range(n_modes)])
        if modes else np.zeros((0, 3)),
        seed=seed,
    )
