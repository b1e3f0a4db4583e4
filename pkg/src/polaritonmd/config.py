"""Structured run configuration: schema, YAML parsing, canonical hashing.

Every physical quantity carries its unit in the key name (omega_cm1,
dt_fs, lambda_au, ...), so a config file can never be mis-read in the
wrong unit system.  Unknown keys are rejected with their full key path.
"""

import dataclasses
import hashlib
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import units
from .model import (
    AngleTerm,
    AtomicSpecies,
    BondCouplingTerm,
    BondTerm,
    HarmonicForceField,
    MatterState,
)
from .presets import PRESET_NAMES, preset_by_name

__all__ = [
    "ConfigError",
    "CavityModeConfig",
    "KickConfig",
    "InitializationConfig",
    "IntegrationConfig",
    "AnalysisConfig",
    "AtomConfig",
    "BondConfig",
    "AngleConfig",
    "CouplingConfig",
    "SystemConfig",
    "RunConfig",
    "load_config",
    "dump_config",
    "config_hash",
    "build_system",
]


class ConfigError(ValueError):
    """Configuration did not validate; message carries the key path."""


@dataclass(frozen=True)
class CavityModeConfig:
    omega_cm1: float
    lambda_au: float
    polarization: tuple = (1.0, 0.0, 0.0)
    q0: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "polarization",
                           tuple(float(x) for x in self.polarization))
        if len(self.polarization) != 3:
            raise ConfigError("polarization must be a 3-vector")
        if self.omega_cm1 <= 0:
            raise ConfigError("omega_cm1 must be > 0")
        if self.lambda_au < 0:
            raise ConfigError("lambda_au must be >= 0")
        if self.lambda_au > 0 and not any(self.polarization):
            raise ConfigError("polarization must be nonzero for lambda > 0")


@dataclass(frozen=True)
class KickConfig:
    atom_label: str = "C"
    delta_angstrom: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "delta_angstrom",
                           tuple(float(x) for x in self.delta_angstrom))
        if len(self.delta_angstrom) != 3:
            raise ConfigError("delta_angstrom must be a 3-vector")


@dataclass(frozen=True)
class InitializationConfig:
    kick: KickConfig | None = None
    temperature_k: float = 0.0
    seed: int = 0
    remove_com: bool = False

    def __post_init__(self):
        if self.temperature_k < 0:
            raise ConfigError("temperature_k must be >= 0")


@dataclass(frozen=True)
class IntegrationConfig:
    dt_fs: float = 0.1
    t_end_ps: float = 5.0
    record_stride: int = 1

    def __post_init__(self):
        if self.dt_fs <= 0:
            raise ConfigError("dt_fs must be > 0")
        if self.t_end_ps * 1000.0 < self.dt_fs:
            raise ConfigError("t_end_ps must cover at least one step")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")


@dataclass(frozen=True)
class AnalysisConfig:
    window: str = "hann"
    pad_factor: int = 4
    min_prominence: float = 0.01
    components: tuple = ("x", "y", "z")

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.window not in ("hann", "none"):
            raise ConfigError("window must be 'hann' or 'none'")
        if self.pad_factor < 1:
            raise ConfigError("pad_factor must be >= 1")
        if not (0 < self.min_prominence <= 1):
            raise ConfigError("min_prominence must be in (0, 1]")
        for c in self.components:
            if c not in ("x", "y", "z"):
                raise ConfigError(f"unknown component {c!r}")


@dataclass(frozen=True)
class AtomConfig:
    label: str
    mass_amu: float
    charge: float
    position_angstrom: tuple

    def __post_init__(self):
        object.__setattr__(self, "position_angstrom",
                           tuple(float(x) for x in self.position_angstrom))
        if len(self.position_angstrom) != 3:
            raise ConfigError("position_angstrom must be a 3-vector")


@dataclass(frozen=True)
class BondConfig:
    i: int
    j: int
    r0_angstrom: float
    k_ha_bohr2: float


@dataclass(frozen=True)
class AngleConfig:
    i: int
    j: int
    k: int
    theta0_deg: float
    kb_ha_rad2: float


@dataclass(frozen=True)
class CouplingConfig:
    bond_a: int
    bond_b: int
    k_ha_bohr2: float


@dataclass(frozen=True)
class SystemConfig:
    """Either a preset name or a full inline system description."""

    preset: str | None = None
    atoms: tuple = ()
    bonds: tuple = ()
    angles: tuple = ()
    couplings: tuple = ()

    def __post_init__(self):
        for name in ("atoms", "bonds", "angles", "couplings"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.preset is not None:
            if self.preset not in PRESET_NAMES:
                raise ConfigError(
                    f"unknown preset {self.preset!r}; "
                    f"available: {', '.join(PRESET_NAMES)}"
                )
            if self.atoms or self.bonds or self.angles or self.couplings:
                raise ConfigError(
                    "system: give either a preset or an inline system, "
                    "not both"
                )
        elif not self.atoms:
            raise ConfigError("system: need a preset or at least one atom")


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig = field(
        default_factory=lambda: SystemConfig(preset="co2"))
    cavity: tuple = ()
    initialization: InitializationConfig = field(
        default_factory=InitializationConfig)
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    label: str = "run"
    output_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "cavity", tuple(self.cavity))


_NESTED = {
    RunConfig: {
        "system": SystemConfig,
        "cavity": CavityModeConfig,  # sequence
        "initialization": InitializationConfig,
        "integration": IntegrationConfig,
        "analysis": AnalysisConfig,
    },
    SystemConfig: {
        "atoms": AtomConfig,
        "bonds": BondConfig,
        "angles": AngleConfig,
        "couplings": CouplingConfig,
    },
    InitializationConfig: {"kick": KickConfig},
}

_SEQUENCE_FIELDS = {"cavity", "atoms", "bonds", "angles", "couplings"}


def _from_mapping(cls, data, path):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{path}.{key}: unknown key")
    kwargs = {}
    nested = _NESTED.get(cls, {})
    for key, value in data.items():
        sub = nested.get(key)
        if sub is None:
            kwargs[key] = _plain(value, f"{path}.{key}")
        elif key in _SEQUENCE_FIELDS:
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{path}.{key}: expected a list")
            kwargs[key] = tuple(
                _from_mapping(sub, item, f"{path}.{key}[{n}]")
                for n, item in enumerate(value)
            )
        elif value is None:
            kwargs[key] = None
        else:
            kwargs[key] = _from_mapping(sub, value, f"{path}.{key}")
    try:
        return cls(**kwargs)
    except ConfigError as err:
        raise ConfigError(f"{path}: {err}") from None
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{path}: {err}") from None


def _plain(value, path):
    if isinstance(value, dict):
        raise ConfigError(f"{path}: unexpected nested mapping")
    if isinstance(value, list):
        return tuple(_plain(v, f"{path}[{i}]") for i, v in enumerate(value))
    return value


def _to_plain(obj):
    if dataclasses.is_dataclass(obj):
        out = {}
        for f in dataclasses.fields(obj):
            value = getattr(obj, f.name)
            if value is None:
                continue
            out[f.name] = _to_plain(value)
        return out
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def load_config(source) -> RunConfig:
    """Parse a RunConfig from a YAML file path or an already-parsed dict."""
    if isinstance(source, dict):
        data = source
        origin = "config"
    else:
        with open(source) as fh:
            try:
                data = yaml.safe_load(fh)
            except yaml.YAMLError as err:
                raise ConfigError(f"{source}: YAML parse error: {err}") from None
        origin = str(source)
    if data is None:
        data = {}
    return _from_mapping(RunConfig, data, origin)


def dump_config(cfg: RunConfig, path=None) -> str:
    """Serialize a RunConfig to canonical YAML (sorted keys).

    load_config(dump) round-trips to an identical RunConfig.
    """
    text = yaml.safe_dump(_to_plain(cfg), sort_keys=True,
                          default_flow_style=False)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def config_hash(cfg: RunConfig) -> str:
    """Short sha256 of the canonical serialization; run identity tag."""
    return hashlib.sha256(dump_config(cfg).encode()).hexdigest()[:12]


def build_system(system: SystemConfig):
    """Materialize (MatterState, HarmonicForceField) from a SystemConfig."""
    if system.preset is not None:
        return preset_by_name(system.preset)
    species = tuple(
        AtomicSpecies(label=a.label, mass_amu=a.mass_amu, charge=a.charge)
        for a in system.atoms
    )
    positions = units.angstrom_to_bohr(
        np.array([a.position_angstrom for a in system.atoms], dtype=float))
    matter = MatterState(species=species, positions=positions,
                         velocities=np.zeros_like(positions))
    ff = HarmonicForceField(
        bonds=tuple(
            BondTerm(b.i, b.j, units.angstrom_to_bohr(b.r0_angstrom),
                     b.k_ha_bohr2)
            for b in system.bonds
        ),
        angles=tuple(
            AngleTerm(a.i, a.j, a.k, np.deg2rad(a.theta0_deg), a.kb_ha_rad2)
            for a in system.angles
        ),
        couplings=tuple(
            BondCouplingTerm(c.bond_a, c.bond_b, c.k_ha_bohr2)
            for c in system.couplings
        ),
    )
    ff.check_indices(matter.n_atoms)
    return matter, ff
