"""Post-processing: IR spectra, peaks, Rabi splitting, beats, coupling traces.

Spectra are |FFT|^2 of the mean-subtracted, windowed dipole components
(power spectra; absolute scale arbitrary).  ``Spectrum.intensity``
keeps the raw power so Parseval bookkeeping stays exact; plots and
files use the max-normalized view.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.signal

from . import units
from .integrate import Trajectory
from .model import PhotonMode

__all__ = [
    "Spectrum",
    "SpectralPeak",
    "SplittingNotResolved",
    "NonOscillatorySignal",
    "power_spectrum",
    "ir_spectrum",
    "find_peaks",
    "rabi_splitting",
    "beat_envelope",
    "EffectiveCouplingTrace",
    "effective_coupling_trace",
    "write_spectrum",
    "write_peaks",
]

log = logging.getLogger(__name__)

_MIN_SAMPLES = 256
_COMPONENTS = {"x": 0, "y": 1, "z": 2}

DEFAULT_MIN_PROMINENCE = 0.01


class SplittingNotResolved(ValueError):
    """Fewer than two peaks found around the requested center."""


class NonOscillatorySignal(ValueError):
    """Trace has no usable carrier oscillation or no beat envelope."""


@dataclass(frozen=True)
class Spectrum:
    """Power spectrum on a uniform, increasing wavenumber grid.

    intensity is the raw |FFT|^2 power (summed over the requested
    dipole components); use normalized() for the max = 1 view.
    resolution_cm1 is the native (pre-padding) bin width 1/T; the
    actual grid spacing is resolution_cm1 / pad_factor.
    """

    wavenumbers_cm1: np.ndarray
    intensity: np.ndarray
    window: str
    pad_factor: int
    n_samples: int
    dt_fs: float
    components: tuple

    def __post_init__(self):
        for name in ("wavenumbers_cm1", "intensity"):
            arr = np.ascontiguousarray(
                np.asarray(getattr(self, name), dtype=float))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "components", tuple(self.components))
        if self.wavenumbers_cm1.shape != self.intensity.shape:
            raise ValueError("grid/intensity size mismatch")
        if np.any(self.intensity < 0):
            raise ValueError("negative intensity")
        d = np.diff(self.wavenumbers_cm1)
        if d.size and (np.any(d <= 0)
                       or np.abs(d - d[0]).max() > 1e-9 * d[0]):
            raise ValueError("wavenumber grid must be uniform and increasing")

    @property
    def resolution_cm1(self):
        """Native spectral resolution 1/T of the unpadded trace."""
        t_total_au = units.fs_to_au(self.dt_fs) * self.n_samples
        return units.INVCM_PER_CYCLES_PER_AU / t_total_au

    @property
    def bin_cm1(self):
        """Grid spacing of the (padded) wavenumber axis."""
        return float(self.wavenumbers_cm1[1] - self.wavenumbers_cm1[0])

    def normalized(self):
        """Intensity scaled to max = 1 (zeros stay zeros)."""
        peak = self.intensity.max()
        return self.intensity / peak if peak > 0 else self.intensity.copy()

    def sliced(self, lo_cm1, hi_cm1):
        """Sub-spectrum restricted to [lo, hi] cm^-1 (same metadata)."""
        mask = ((self.wavenumbers_cm1 >= lo_cm1)
                & (self.wavenumbers_cm1 <= hi_cm1))
        if mask.sum() < 3:
            raise ValueError("window selects fewer than 3 bins")
        return replace(self, wavenumbers_cm1=self.wavenumbers_cm1[mask],
                       intensity=self.intensity[mask])


def _window_values(kind, n):
    if kind == "hann":
        return scipy.signal.windows.hann(n, sym=False)
    if kind == "none":
        return np.ones(n)
    raise ValueError(f"unknown window {kind!r} (choose 'hann' or 'none')")


def _check_uniform(times_fs):
    times_fs = np.asarray(times_fs, dtype=float)
    if times_fs.size < _MIN_SAMPLES:
        raise ValueError(
            f"need at least {_MIN_SAMPLES} samples, got {times_fs.size}"
        )
    d = np.diff(times_fs)
    dt = d[0]
    if dt <= 0 or np.abs(d - dt).max() > 1e-6 * dt:
        raise ValueError("sampling must be uniform and increasing")
    return float(dt)


def power_spectrum(times_fs, values, window="hann", pad_factor=4) -> Spectrum:
    """|FFT|^2 of mean-subtracted, windowed columns of ``values``.

    ``values``: (n,) or (n, k); column powers are summed.  Zero-padding
    by ``pad_factor`` refines the plotted grid only, never the true
    resolution.
    """
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    dt_fs = _check_uniform(times_fs)
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    n = vals.shape[0]
    if n != np.asarray(times_fs).size:
        raise ValueError("times/values length mismatch")
    win = _window_values(window, n)
    sig = (vals - vals.mean(axis=0)) * win[:, None]
    n_fft = pad_factor * n
    spec = np.fft.rfft(sig, n=n_fft, axis=0)
    intensity = np.sum(np.abs(spec) ** 2, axis=1)
    freqs = np.fft.rfftfreq(n_fft, d=units.fs_to_au(dt_fs))
    return Spectrum(
        wavenumbers_cm1=freqs * units.INVCM_PER_CYCLES_PER_AU,
        intensity=intensity,
        window=window,
        pad_factor=pad_factor,
        n_samples=n,
        dt_fs=dt_fs,
        components=(),
    )


def ir_spectrum(traj: Trajectory, components=("x", "y", "z"), window="hann",
                pad_factor=4) -> Spectrum:
    """IR power spectrum of the dipole trace of a trajectory.

    ``components``: subset of {x, y, z}; their powers are summed.
    """
    comps = tuple(components)
    if not comps:
        raise ValueError("need at least one dipole component")
    try:
        cols = [_COMPONENTS[c] for c in comps]
    except KeyError as err:
        raise ValueError(f"unknown dipole component {err.args[0]!r}") from None
    s = power_spectrum(traj.times_fs, traj.dipole[:, cols], window=window,
                       pad_factor=pad_factor)
    return replace(s, components=comps)


@dataclass(frozen=True)
class SpectralPeak:
    """A located spectral peak (normalized-intensity units)."""

    wavenumber_cm1: float
    height: float
    prominence: float


def _refine_quadratic(x, y, i):
    """Sub-bin peak refinement through the parabola over (i-1, i, i+1)."""
    if i == 0 or i == y.size - 1:
        return float(x[i]), float(y[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:  # not locally concave; keep the grid point
        return float(x[i]), float(y[i])
    delta = 0.5 * (y0 - y2) / denom
    dx = x[i + 1] - x[i]
    return float(x[i] + delta * dx), float(y1 - 0.25 * (y0 - y2) * delta)


def find_peaks(s: Spectrum,
               min_prominence=DEFAULT_MIN_PROMINENCE) -> list:
    """Local maxima of the normalized spectrum above a prominence floor.

    Peak positions are refined with a three-point quadratic fit;
    results sorted by wavenumber.
    """
    y = s.normalized()
    idx, props = scipy.signal.find_peaks(y, prominence=min_prominence)
    peaks = []
    for i, prom in zip(idx, props["prominences"]):
        wn, height = _refine_quadratic(s.wavenumbers_cm1, y, int(i))
        peaks.append(SpectralPeak(wavenumber_cm1=wn, height=height,
                                  prominence=float(prom)))
    return sorted(peaks, key=lambda p: p.wavenumber_cm1)


def rabi_splitting(s: Spectrum, center_cm1, window_cm1=400.0,
                   min_prominence=DEFAULT_MIN_PROMINENCE) -> float:
    """Gap between the two most prominent peaks straddling ``center_cm1``.

    Peaks are searched within center +- window and normalized within
    that window; raises SplittingNotResolved when either side of the
    center has no qualifying peak.
    """
    sub = s.sliced(center_cm1 - window_cm1, center_cm1 + window_cm1)
    peaks = find_peaks(sub, min_prominence=min_prominence)
    lower = [p for p in peaks if p.wavenumber_cm1 < center_cm1]
    upper = [p for p in peaks if p.wavenumber_cm1 > center_cm1]
    if not lower or not upper:
        raise SplittingNotResolved(
            f"no splitting resolved around {center_cm1:g} cm^-1 "
            f"({len(peaks)} peaks in window)"
        )
    lo = max(lower, key=lambda p: p.prominence)
    hi = max(upper, key=lambda p: p.prominence)
    return hi.wavenumber_cm1 - lo.wavenumber_cm1


def beat_envelope(times_fs, trace, trim_fraction=0.05,
                  pad_factor=8) -> float:
    """Dominant modulation frequency of an oscillatory trace, in cm^-1.

    The envelope is the magnitude of the analytic signal; its spectrum
    (edges trimmed against end effects, mean removed) gives the beat
    frequency.  For cos(w- t) + cos(w+ t) this returns (w+ - w-).
    Raises NonOscillatorySignal for traces without a carrier or with a
    flat envelope (single tone).
    """
    times_fs = np.asarray(times_fs, dtype=float)
    trace = np.asarray(trace, dtype=float)
    if trace.ndim != 1 or trace.shape != times_fs.shape:
        raise ValueError("trace must be 1-D and match times")
    _check_uniform(times_fs)

    sig = trace - trace.mean()
    rms = np.sqrt(np.mean(sig**2))
    if rms == 0:
        raise NonOscillatorySignal("trace is constant")
    # carrier check: the dominant spectral bin must sit well above DC
    raw = power_spectrum(times_fs, sig, window="hann", pad_factor=1)
    carrier = int(np.argmax(raw.intensity))
    if carrier < 2:
        raise NonOscillatorySignal("no oscillatory carrier found")

    envelope = np.abs(scipy.signal.hilbert(sig))
    trim = int(round(trim_fraction * envelope.size))
    if trim:
        envelope = envelope[trim:-trim]
        times_fs = times_fs[trim:-trim]
    depth = envelope.max() - envelope.min()
    if depth < 0.05 * envelope.mean():
        raise NonOscillatorySignal(
            "envelope is flat (single tone); no beat present"
        )
    env_spec = power_spectrum(times_fs, envelope, window="hann",
                              pad_factor=pad_factor)
    # skip the handful of DC-adjacent bins the mean-removed envelope and
    # window leakage still populate
    start = 2 * pad_factor
    i = start + int(np.argmax(env_spec.intensity[start:]))
    wn, _ = _refine_quadratic(env_spec.wavenumbers_cm1,
                              env_spec.normalized(), i)
    return wn


@dataclass(frozen=True)
class EffectiveCouplingTrace:
    """Instantaneous coupling measures of one mode along a trajectory.

    projection: e_pol . mu(t) (e*bohr) — the dipole component seen by
    the mode.  orientation: |lambda| |cos theta(t)| with theta between
    the molecular axis and the polarization; in [0, |lambda|].  None
    (with ``notice``) when no molecular axis is defined.
    """

    times_fs: np.ndarray
    projection: np.ndarray
    orientation: np.ndarray | None
    lambda_magnitude: float
    notice: str | None = None

    def __post_init__(self):
        for name in ("times_fs", "projection", "orientation"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.ascontiguousarray(np.asarray(arr, dtype=float))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


_AXIS_LINEARITY_TOL = 0.3  # bohr, max off-axis distance at t = 0


def effective_coupling_trace(traj: Trajectory,
                             mode: PhotonMode) -> EffectiveCouplingTrace:
    """Projection e_pol . mu(t) and orientation factor |lambda||cos theta|.

    The molecular axis is the line through the most-separated atom pair
    of the first sample (the O-O vector for CO2), re-evaluated at every
    sample.  If the initial geometry is not linear along that pair, the
    orientation factor is omitted and ``notice`` says why.
    """
    lam = mode.coupling_strength
    if lam == 0.0:
        return EffectiveCouplingTrace(
            times_fs=traj.times_fs,
            projection=np.zeros_like(traj.times_fs),
            orientation=None,
            lambda_magnitude=0.0,
            notice="zero coupling: no polarization direction defined",
        )
    pol = mode.polarization
    projection = traj.dipole @ pol

    pos0 = traj.positions[0]
    n = pos0.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    i, j = max(pairs, key=lambda p: np.linalg.norm(pos0[p[1]] - pos0[p[0]]))
    axis0 = pos0[j] - pos0[i]
    axis0 /= np.linalg.norm(axis0)
    rel = pos0 - pos0[i]
    off_axis = np.linalg.norm(rel - np.outer(rel @ axis0, axis0), axis=1)
    if off_axis.max() > _AXIS_LINEARITY_TOL:
        notice = (
            f"geometry is not linear (max off-axis distance "
            f"{off_axis.max():.3f} bohr); orientation factor omitted"
        )
        log.warning(notice)
        return EffectiveCouplingTrace(
            times_fs=traj.times_fs, projection=projection, orientation=None,
            lambda_magnitude=lam, notice=notice,
        )

    axis_t = traj.positions[:, j, :] - traj.positions[:, i, :]
    axis_t /= np.linalg.norm(axis_t, axis=1)[:, None]
    orientation = lam * np.abs(axis_t @ pol)
    return EffectiveCouplingTrace(
        times_fs=traj.times_fs, projection=projection,
        orientation=orientation, lambda_magnitude=lam,
    )


# ---------------------------------------------------------------------------
# spectrum files
# ---------------------------------------------------------------------------

def write_spectrum(s: Spectrum, path, extra_header=None):
    """Two-column text file: wavenumber (cm^-1), normalized intensity."""
    with open(path, "w") as fh:
        fh.write("# polaritonmd spectrum v1\n")
        if extra_header:
            for key in sorted(extra_header):
                fh.write(f"# {key} {extra_header[key]}\n")
        comps = ",".join(s.components) if s.components else "custom"
        fh.write(f"# window {s.window} pad_factor {s.pad_factor} "
                 f"components {comps}\n")
        fh.write(f"# n_samples {s.n_samples} dt_fs {s.dt_fs!r} "
                 f"native_resolution_cm1 {s.resolution_cm1:.6f}\n")
        fh.write("# intensity normalized to max = 1 (power spectrum)\n")
        fh.write("# columns: wavenumber_cm1 intensity\n")
        np.savetxt(fh, np.column_stack([s.wavenumbers_cm1, s.normalized()]),
                   fmt="%.10e")


def write_peaks(peaks, path, extra_header=None):
    """Annotation file for located peaks (normalized-intensity units)."""
    with open(path, "w") as fh:
        fh.write("# polaritonmd peaks v1\n")
        if extra_header:
            for key in sorted(extra_header):
                fh.write(f"# {key} {extra_header[key]}\n")
        fh.write("# columns: wavenumber_cm1 height prominence\n")
        for p in peaks:
            fh.write(f"{p.wavenumber_cm1:12.4f} {p.height:.6e} "
                     f"{p.prominence:.6e}\n")
