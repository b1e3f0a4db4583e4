"""Normal-mode and polariton eigenproblem checks.

Oracles: a hand-built diatomic Hessian, the closed-form 2x2
polariton eigenvalues, and the trace identity tying the polariton
spectrum to the dipole self-energy.
"""

import numpy as np
import pytest

from polaritonmd import (
    AtomicSpecies,
    BondTerm,
    HarmonicForceField,
    MatterState,
    PhotonMode,
    analyze_modes,
    build_co2_preset,
    dipole_jacobian,
    hessian_fd,
    normal_modes,
    polariton_frequencies,
    polariton_gap,
    polariton_model,
    rigid_mode_basis,
    write_mode_report,
    write_polariton_report,
)
from polaritonmd import units


def _diatomic(k=0.8, r0=2.0, m1=2000.0, m2=3000.0, q=0.3):
    a = AtomicSpecies("A", m1 / units.ME_PER_AMU, q)
    b = AtomicSpecies("B", m2 / units.ME_PER_AMU, -q)
    m = MatterState((a, b), [[0, 0, 0], [r0, 0, 0]], np.zeros((2, 3)))
    ff = HarmonicForceField(bonds=(BondTerm(0, 1, r0, k),))
    return m, ff


# ---------------------------------------------------------------------------
# Hessian
# ---------------------------------------------------------------------------

def test_hessian_matches_hand_built_diatomic():
    """Bond along x: the only nonzero block is k * (e_x e_x^T) pattern."""
    k = 0.8
    m, ff = _diatomic(k=k)
    h = hessian_fd(ff, m, step=1e-4)
    expected = np.zeros((6, 6))
    for (i, j), sign in (((0, 0), 1), ((3, 3), 1), ((0, 3), -1), ((3, 0), -1)):
        expected[i, j] = sign * k
    np.testing.assert_allclose(h, expected, atol=1e-8)


def test_hessian_symmetry_defect_small():
    m, ff = build_co2_preset()
    _, defect = hessian_fd(ff, m, full_output=True)
    assert defect < 1e-8


def test_hessian_richardson_step_consistency():
    """Halving the FD step (1e-3 -> 5e-4) moves the Hessian only at the
    level of the quadratic FD error, far below physical scales."""
    m, ff = build_co2_preset()
    h1 = hessian_fd(ff, m, step=1e-3)
    h2 = hessian_fd(ff, m, step=5e-4)
    assert np.abs(h1 - h2).max() < 5e-7


def test_hessian_requires_stationary_point():
    m, ff = build_co2_preset()
    pos = m.positions.copy()
    pos[0, 0] += 0.05
    with pytest.raises(ValueError, match="stationary"):
        hessian_fd(ff, m.with_positions(pos))


# ---------------------------------------------------------------------------
# normal modes
# ---------------------------------------------------------------------------

def test_identity_hessian_unit_masses():
    masses = np.ones(2) * units.ME_PER_AMU * 0 + 1.0  # unit electron masses
    nm = normal_modes(np.eye(6), masses)
    np.testing.assert_allclose(nm.frequencies_cm1,
                               units.INVCM_PER_HARTREE, rtol=1e-12)


def test_diatomic_frequency_closed_form():
    k, m1, m2 = 0.8, 2000.0, 3000.0
    m, ff = _diatomic(k=k, m1=m1, m2=m2)
    # small FD step: rigid-rotation artifacts scale with step^2 and must
    # stay below the vibrational threshold for these light masses
    nm = analyze_modes(ff, m, step=1e-4)
    mu_red = m1 * m2 / (m1 + m2)
    expected = np.sqrt(k / mu_red) * units.INVCM_PER_HARTREE
    vib = nm.frequencies_cm1[nm.vibrational()]
    assert vib.size == 1
    assert vib[0] == pytest.approx(expected, rel=1e-8)


def test_co2_mode_table():
    m, ff = build_co2_preset()
    nm = analyze_modes(ff, m)
    freqs = nm.frequencies_cm1
    assert freqs.size == 9
    # exactly 5 near-zeros for a linear molecule
    assert (np.abs(freqs) < 5.0).sum() == 5
    vib = np.sort(freqs[nm.vibrational()])
    np.testing.assert_allclose(vib, [654.0, 654.0, 1330.0, 2430.0], atol=1.0)


def test_co2_ir_activity_pattern():
    """Bends and asymmetric stretch are IR active; symmetric stretch dark."""
    m, ff = build_co2_preset()
    nm = analyze_modes(ff, m)
    vib = nm.vibrational()
    freqs = nm.frequencies_cm1[vib]
    ir = nm.ir_activity[vib]
    order = np.argsort(freqs)
    bend1, bend2, sym, asym = ir[order]
    assert bend1 > 1e-6 and bend2 > 1e-6 and asym > 1e-6
    assert sym < 1e-12


def test_asymmetric_stretch_shape():
    """Carbon moves against both oxygens in the 2430 mode."""
    m, ff = build_co2_preset()
    nm = analyze_modes(ff, m)
    idx = int(np.argmin(np.abs(nm.frequencies_cm1 - 2430.0)))
    vec = nm.modes[:, idx].reshape(3, 3)
    # cartesian displacement = mass-weighted vector / sqrt(mass)
    disp = vec / np.sqrt(m.masses)[:, None]
    assert abs(disp[0, 0]) > 1e-3
    assert np.sign(disp[0, 0]) == -np.sign(disp[1, 0])
    assert np.sign(disp[0, 0]) == -np.sign(disp[2, 0])


def test_eigenvectors_orthonormal():
    m, ff = build_co2_preset()
    nm = analyze_modes(ff, m)
    gram = nm.modes.T @ nm.modes
    np.testing.assert_allclose(gram, np.eye(9), atol=1e-10)


def test_frequencies_invariant_under_rotation():
    m, ff = build_co2_preset()
    # rotate the molecule by an arbitrary rotation, refit nothing
    angle = 0.83
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]) @ \
        np.array([[1, 0, 0], [0, c, s], [0, -s, c]])
    m_rot = m.with_positions(m.positions @ rot.T)
    nm = analyze_modes(ff, m)
    nm_rot = analyze_modes(ff, m_rot)
    # agreement is limited by the orientation dependence of the FD error
    np.testing.assert_allclose(
        np.sort(nm_rot.frequencies_cm1[nm_rot.vibrational()]),
        np.sort(nm.frequencies_cm1[nm.vibrational()]),
        atol=1e-2,
    )


def test_imaginary_mode_reported_negative():
    nm = normal_modes(np.diag([-0.01, 0.01, 0.02]), np.array([1.0]))
    assert nm.frequencies_cm1[0] < -1.0


def test_rigid_mode_basis_counts():
    m, _ = build_co2_preset()
    assert rigid_mode_basis(m).shape == (9, 5)  # linear: 3 trans + 2 rot
    sp = AtomicSpecies("A", 1.0, 0.0)
    bent = MatterState((sp, sp, sp),
                       [[0, 0, 0], [2, 0, 0], [0.4, 1.9, 0]],
                       np.zeros((3, 3)))
    assert rigid_mode_basis(bent).shape == (9, 6)


# ---------------------------------------------------------------------------
# polaritons
# ---------------------------------------------------------------------------

def _mode(lam_cm1_omega=2430.0, lam=0.05, axis=(1.0, 0.0, 0.0)):
    return PhotonMode(omega=units.cm1_to_ha(lam_cm1_omega),
                      lambda_vec=lam * np.asarray(axis))


def test_polariton_two_by_two_closed_form():
    """Diatomic + one photon reduces to the analytic 2x2 eigenpair."""
    m, ff = _diatomic()
    nm = analyze_modes(ff, m, step=1e-4)
    vib_idx = nm.vibrational()
    assert vib_idx.size == 1
    w_m = units.cm1_to_ha(float(nm.frequencies_cm1[vib_idx[0]]))
    vec = nm.modes[:, vib_idx[0]]

    mode = _mode(lam_cm1_omega=1800.0, lam=0.04)
    jac_mw = dipole_jacobian(m) / np.sqrt(np.repeat(m.masses, 3))
    d = float(mode.lambda_vec @ jac_mw @ vec)
    w_c = mode.omega

    w1_sq = w_m**2 + d**2  # matter diagonal includes the self-energy
    w2_sq = w_c**2
    g = w_c * d
    disc = np.sqrt((w1_sq - w2_sq) ** 2 + 4 * g**2)
    expected = np.sqrt([(w1_sq + w2_sq - disc) / 2,
                        (w1_sq + w2_sq + disc) / 2])
    expected_cm1 = np.sort(expected) * units.INVCM_PER_HARTREE

    freqs = polariton_frequencies(ff, m, [mode],
                                  hessian=hessian_fd(ff, m, step=1e-4))
    np.testing.assert_allclose(freqs, expected_cm1, rtol=1e-8)


def test_polariton_lambda_zero_reduction():
    m, ff = build_co2_preset()
    mode = _mode(lam=0.0)
    freqs = polariton_frequencies(ff, m, [mode])
    nm = analyze_modes(ff, m)
    expected = np.sort(np.concatenate([
        nm.frequencies_cm1[nm.vibrational()], [2430.0]]))
    np.testing.assert_allclose(np.sort(freqs), expected, atol=1e-6)


def test_dark_modes_unshifted():
    """x-polarized cavity leaves the bends at 654 to 0.1 cm^-1 at any lambda."""
    m, ff = build_co2_preset()
    for lam in (0.02, 0.1, 0.3):
        freqs = polariton_frequencies(ff, m, [_mode(lam=lam)])
        bends = np.sort(freqs)[:2]
        np.testing.assert_allclose(bends, 654.0, atol=0.1)
    # symmetric stretch is dark too (no dipole derivative)
    freqs = polariton_frequencies(ff, m, [_mode(lam=0.1)])
    assert np.min(np.abs(freqs - 1330.0)) < 0.1


def test_trace_identity():
    """Sum of squared polariton frequencies = uncoupled sum + tr(self-energy)."""
    m, ff = build_co2_preset()
    inv_sqrt_m = 1.0 / np.sqrt(np.repeat(m.masses, 3))
    jac_mw = dipole_jacobian(m) * inv_sqrt_m
    for lam in (0.02, 0.05, 0.1):
        mode = _mode(lam=lam)
        coupled = polariton_frequencies(ff, m, [mode])
        uncoupled = polariton_frequencies(ff, m, [_mode(lam=0.0)])
        d = mode.lambda_vec @ jac_mw
        lhs = np.sum((coupled / units.INVCM_PER_HARTREE) ** 2)
        rhs = np.sum((uncoupled / units.INVCM_PER_HARTREE) ** 2) + d @ d
        assert lhs == pytest.approx(rhs, rel=1e-8)


def test_resonant_weights_half_half():
    m, ff = build_co2_preset()
    pm = polariton_model(ff, m, [_mode(lam=0.05)])
    i_lp = int(np.argmin(np.abs(pm.frequencies_cm1 - 2395.0)))
    i_up = int(np.argmin(np.abs(pm.frequencies_cm1 - 2465.0)))
    for i in (i_lp, i_up):
        assert pm.matter_weight[i] == pytest.approx(0.5, abs=0.05)
        assert pm.photon_weight[i] == pytest.approx(0.5, abs=0.05)
        assert pm.matter_weight[i] + pm.photon_weight[i] == pytest.approx(1.0)


def test_polariton_gap_monotone_in_lambda():
    m, ff = build_co2_preset()
    gaps = [polariton_gap(polariton_model(ff, m, [_mode(lam=lam)]), 2430.0)
            for lam in (0.02, 0.05, 0.1)]
    assert gaps[0] < gaps[1] < gaps[2]


def test_polariton_multimode_support():
    """Two modes at different frequencies both dress the spectrum."""
    m, ff = build_co2_preset()
    modes = [_mode(lam=0.05), _mode(lam_cm1_omega=654.0, lam=0.03,
                                    axis=(0, 1, 0))]
    freqs = polariton_frequencies(ff, m, modes)
    assert freqs.size == 4 + 2  # 4 vibrations + 2 photons
    # the y-polarized 654 mode splits one bend; the other stays dark
    assert np.min(np.abs(freqs - 654.0)) < 0.1
    assert polariton_gap(polariton_model(ff, m, modes), 2430.0) > 1.0


def test_reports_written(tmp_path):
    m, ff = build_co2_preset()
    nm = analyze_modes(ff, m)
    pm = polariton_model(ff, m, [_mode()])
    mode_path = tmp_path / "modes.dat"
    pol_path = tmp_path / "polaritons.dat"
    write_mode_report(nm, mode_path, extra_header={"config_hash": "abc"})
    write_polariton_report(pm, pol_path)
    mtext = mode_path.read_text()
    assert "2430" in mtext and "config_hash abc" in mtext
    data = np.loadtxt(mode_path)
    assert data.shape == (9, 2 + 9)
    ptext = pol_path.read_text()
    assert "matter_weight" in ptext
    pdata = np.loadtxt(pol_path)
    assert pdata.shape == (5, 3)
    np.testing.assert_allclose(pdata[:, 1] + pdata[:, 2], 1.0, atol=1e-6)
