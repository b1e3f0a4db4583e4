"""Turn a RunConfig into states, runs, and output files.

This is the layer both the CLI and scripted studies call: build the
system, apply initial conditions, propagate, analyze, and write the
self-describing output set (trajectory / spectrum / peaks / summary).
"""

import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import units
from .analysis import (
    Spectrum,
    find_peaks,
    ir_spectrum,
    write_peaks,
    write_spectrum,
)
from .config import RunConfig, build_system, config_hash, dump_config
from .initial import init_photon, kick_displacement, sample_maxwell_boltzmann
from .integrate import (
    IntegrationPlan,
    Trajectory,
    run_trajectory,
    write_trajectory,
)
from .model import PhotonMode, SimulationState

__all__ = [
    "build_modes",
    "build_initial_state",
    "build_plan",
    "RunResult",
    "execute_run",
    "output_root",
]

log = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = "POLARITONMD_OUTPUT_ROOT"


def output_root(override=None) -> Path:
    """Output base directory: explicit override > env var > cwd."""
    if override is not None:
        return Path(override)
    env = os.environ.get(OUTPUT_ROOT_ENV)
    return Path(env) if env else Path(".")


def _unit_vector(vec):
    v = np.asarray(vec, dtype=float)
    n = float(np.linalg.norm(v))
    return v / n if n > 0 else v


def build_modes(cfg: RunConfig):
    """PhotonMode tuple from the cavity section (omega cm^-1 -> Ha)."""
    return tuple(
        PhotonMode(
            omega=units.cm1_to_ha(mc.omega_cm1),
            lambda_vec=mc.lambda_au * _unit_vector(mc.polarization),
            q=mc.q0,
            p=mc.p0,
        )
        for mc in cfg.cavity
    )


def build_initial_state(cfg: RunConfig, seed_override=None):
    """System + kick + thermal velocities + photon start, per config.

    Returns (SimulationState, HarmonicForceField, seed-in-effect).
    """
    matter, ff = build_system(cfg.system)
    init = cfg.initialization
    seed = init.seed if seed_override is None else int(seed_override)
    if init.kick is not None:
        matter = kick_displacement(matter, init.kick.atom_label,
                                   init.kick.delta_angstrom)
    matter = sample_maxwell_boltzmann(matter, init.temperature_k, seed,
                                      remove_com=init.remove_com)
    modes = tuple(init_photon(m, m.q, m.p) for m in build_modes(cfg))
    return SimulationState(time=0.0, matter=matter, modes=modes), ff, seed


def build_plan(cfg: RunConfig, seed) -> IntegrationPlan:
    integ = cfg.integration
    return IntegrationPlan(
        dt_fs=integ.dt_fs,
        t_end_fs=integ.t_end_ps * 1000.0,
        record_stride=integ.record_stride,
        seed=seed,
    )


@dataclass(frozen=True)
class RunResult:
    """Everything one run produced, in memory and on disk."""

    config: RunConfig
    trajectory: Trajectory
    spectrum: Spectrum
    peaks: tuple
    out_dir: Path
    files: dict


def execute_run(cfg: RunConfig, out=None, seed_override=None,
                write_files=True) -> RunResult:
    """Propagate one configured run and (optionally) write its outputs.

    Output files land in <out>/<output_dir>/<label>/: config.yaml,
    trajectory.dat, spectrum.dat, peaks.dat, summary.txt.  Headers
    carry the code version, config hash, and seed, so identical configs
    rerun to identical bytes.
    """
    if seed_override is not None:
        cfg = replace(
            cfg,
            initialization=replace(cfg.initialization,
                                   seed=int(seed_override)),
        )
    state0, ff, seed = build_initial_state(cfg)
    plan = build_plan(cfg, seed)
    traj = run_trajectory(state0, ff, plan)
    spectrum = ir_spectrum(
        traj,
        components=cfg.analysis.components,
        window=cfg.analysis.window,
        pad_factor=cfg.analysis.pad_factor,
    )
    peaks = tuple(find_peaks(spectrum,
                             min_prominence=cfg.analysis.min_prominence))

    files = {}
    out_dir = output_root(out) / (cfg.output_dir or "") / cfg.label
    if write_files:
        from . import __version__

        out_dir.mkdir(parents=True, exist_ok=True)
        header = {"code_version": __version__,
                  "config_hash": config_hash(cfg)}
        files["config"] = out_dir / "config.yaml"
        dump_config(cfg, files["config"])
        files["trajectory"] = out_dir / "trajectory.dat"
        write_trajectory(traj, files["trajectory"], extra_header=header)
        files["spectrum"] = out_dir / "spectrum.dat"
        write_spectrum(spectrum, files["spectrum"],
                       extra_header={**header, "seed": seed})
        files["peaks"] = out_dir / "peaks.dat"
        write_peaks(peaks, files["peaks"],
                    extra_header={**header, "seed": seed})
        files["summary"] = out_dir / "summary.txt"
        _write_summary(files["summary"], cfg, traj, peaks, header, seed)

    return RunResult(config=cfg, trajectory=traj, spectrum=spectrum,
                     peaks=peaks, out_dir=out_dir, files=files)


def _write_summary(path, cfg, traj, peaks, header, seed):
    e = traj.energy_total
    drift = traj.energy_drift_abs
    rel = drift / max(abs(e[0]), 1e-300)
    lines = [
        "# polaritonmd run summary v1",
        f"# code_version {header['code_version']}",
        f"# config_hash {header['config_hash']}",
        f"label {cfg.label}",
        f"seed {seed}",
        f"n_samples {traj.n_samples}",
        f"t_end_fs {traj.times_fs[-1]!r}",
        f"energy_initial_ha {e[0]!r}",
        f"energy_drift_abs_ha {drift!r}",
        f"energy_drift_rel {rel!r}",
        f"n_peaks {len(peaks)}",
    ]
    for p in peaks:
        lines.append(f"peak_cm1 {p.wavenumber_cm1:.4f} height {p.height:.6e} "
                     f"prominence {p.prominence:.6e}")
    Path(path).write_text("\n".join(lines) + "\n")
