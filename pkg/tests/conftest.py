"""Shared reference integrators for the photon-propagator checks.

The analytic propagator advances q'' = -omega^2 q + s(t) exactly for a
source that is linear on each step.  The reference here integrates the
same piecewise-linear source with fixed-substep RK4, with substeps
aligned to the sample segments so every RK4 step sees a smooth
(polynomial) right-hand side.  An adaptive black-box solver would step
across the derivative kinks at segment boundaries, which is exactly the
error source we want to exclude from a reference.
"""

import numpy as np

from polaritonmd import propagate_photon_analytic


def rk4_linear_source(omega, samples, dt, substeps=24, q0=0.0, p0=0.0):
    """Integrate q'' = -omega^2 q + s(t) through the given source samples.

    ``samples`` are s(k dt); between samples the source is interpolated
    linearly (the same convention the analytic propagator uses).
    Returns (q, p) arrays at the sample times, including t = 0.
    """
    samples = np.asarray(samples, dtype=float)
    w2 = omega * omega
    h = dt / substeps
    q, p = float(q0), float(p0)
    qs = np.empty(len(samples))
    ps = np.empty(len(samples))
    qs[0], ps[0] = q, p
    for k in range(len(samples) - 1):
        s0 = samples[k]
        slope = (samples[k + 1] - s0) / dt
        tau = 0.0
        for _ in range(substeps):
            sa = s0 + slope * tau
            sm = s0 + slope * (tau + 0.5 * h)
            sb = s0 + slope * (tau + h)
            k1q = p
            k1p = -w2 * q + sa
            k2q = p + 0.5 * h * k1p
            k2p = -w2 * (q + 0.5 * h * k1q) + sm
            k3q = p + 0.5 * h * k2p
            k3p = -w2 * (q + 0.5 * h * k2q) + sm
            k4q = p + h * k3p
            k4p = -w2 * (q + h * k3q) + sb
            q += h * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
            p += h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
            tau += h
        qs[k + 1], ps[k + 1] = q, p
    return qs, ps


def chain_propagator(mode, samples, dt):
    """Apply the analytic propagator through consecutive source samples.

    Returns (q, p) arrays at the sample times, including t = 0.
    """
    samples = np.asarray(samples, dtype=float)
    qs = np.empty(len(samples))
    ps = np.empty(len(samples))
    qs[0], ps[0] = mode.q, mode.p
    for k in range(len(samples) - 1):
        q, p = propagate_photon_analytic(mode, samples[k], samples[k + 1], dt)
        mode = mode.with_phase_space(q, p)
        qs[k + 1], ps[k + 1] = q, p
    return qs, ps
