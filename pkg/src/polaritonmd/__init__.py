"""Mean-field dynamics of molecules coupled to cavity photon modes.

Nuclei follow velocity-Verlet on a fitted harmonic force field plus the
cavity force; each photon mode advances with an exact driven-oscillator
propagator.  Dipole traces become IR spectra; a linearized
matter-photon eigenproblem provides the Rabi-splitting oracle.
"""

__version__ = "0.1.0"

from .analysis import (
    EffectiveCouplingTrace,
    NonOscillatorySignal,
    SpectralPeak,
    Spectrum,
    SplittingNotResolved,
    beat_envelope,
    effective_coupling_trace,
    find_peaks,
    ir_spectrum,
    power_spectrum,
    rabi_splitting,
    write_peaks,
    write_spectrum,
)
from .cavity import (
    CavityEnergyBreakdown,
    cavity_force_on_atoms,
    displacement_field,
    photon_source,
    propagate_photon_analytic,
    total_displacement_field,
    total_energy,
)
from .config import (
    AnalysisConfig,
    CavityModeConfig,
    ConfigError,
    InitializationConfig,
    IntegrationConfig,
    KickConfig,
    RunConfig,
    SystemConfig,
    build_system,
    config_hash,
    dump_config,
    load_config,
)
from .initial import init_photon, kick_displacement, sample_maxwell_boltzmann
from .integrate import (
    IntegrationPlan,
    MatterDrive,
    NonFiniteForceError,
    Trajectory,
    read_trajectory,
    run_trajectory,
    step,
    write_trajectory,
)
from .model import (
    AngleTerm,
    AtomicSpecies,
    BondCouplingTerm,
    BondTerm,
    DriveSignal,
    HarmonicForceField,
    MatterState,
    PhotonMode,
    SimulationState,
    dipole_jacobian,
    dipole_moment,
    kinetic_energy,
    matter_forces,
    potential_energy,
)
from .modes import (
    NormalModeSet,
    PolaritonModel,
    analyze_modes,
    hessian_fd,
    normal_modes,
    polariton_frequencies,
    polariton_gap,
    polariton_model,
    rigid_mode_basis,
    write_mode_report,
    write_polariton_report,
)
from .presets import build_co2_preset, preset_by_name
from .workflow import RunResult, build_initial_state, build_modes, execute_run
