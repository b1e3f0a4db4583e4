"""Force field, dipole, and domain-type contracts.

The load-bearing checks here are finite-difference oracles: forces must
be the exact negative gradient of the potential, and the dipole
jacobian the exact derivative of the dipole, for randomized geometries.
"""

import numpy as np
import pytest

from polaritonmd import (
    AngleTerm,
    AtomicSpecies,
    BondCouplingTerm,
    BondTerm,
    DriveSignal,
    HarmonicForceField,
    MatterState,
    PhotonMode,
    build_co2_preset,
    dipole_jacobian,
    dipole_moment,
    matter_forces,
    potential_energy,
)
from polaritonmd import units


def _random_state(rng, base, scale=0.3):
    pos = base.positions + scale * rng.standard_normal(base.positions.shape)
    return base.with_positions(pos)


def _fd_gradient(ff, m, step=1e-5):
    grad = np.zeros_like(m.positions)
    for a in range(m.n_atoms):
        for x in range(3):
            dp = m.positions.copy()
            dm = m.positions.copy()
            dp[a, x] += step
            dm[a, x] -= step
            grad[a, x] = (
                potential_energy(ff, m.with_positions(dp))
                - potential_energy(ff, m.with_positions(dm))
            ) / (2 * step)
    return grad


# ---------------------------------------------------------------------------
# potential energy
# ---------------------------------------------------------------------------

def test_equilibrium_energy_zero():
    m, ff = build_co2_preset()
    assert potential_energy(ff, m) == 0.0


def test_single_bond_stretch_energy():
    sp = AtomicSpecies("A", 1.0, 0.0)
    k, r0, delta = 0.7, 2.0, 0.13
    ff = HarmonicForceField(bonds=(BondTerm(0, 1, r0, k),))
    m = MatterState((sp, sp),
                    [[0, 0, 0], [r0 + delta, 0, 0]], np.zeros((2, 3)))
    assert potential_energy(ff, m) == pytest.approx(0.5 * k * delta**2,
                                                    rel=1e-14)


def test_energy_matches_per_term_hand_sum():
    """Displaced CO2 energy equals a scalar re-evaluation of each term."""
    m, ff = build_co2_preset()
    pos = m.positions.copy()
    pos[0] += units.angstrom_to_bohr(np.array([0.01, 0.004, -0.002]))
    m2 = m.with_positions(pos)

    ext = []
    for b in ff.bonds:
        r = np.linalg.norm(pos[b.j] - pos[b.i])
        ext.append(r - b.r0)
    expected = sum(0.5 * b.k * e**2 for b, e in zip(ff.bonds, ext))
    for a in ff.angles:
        u = pos[a.i] - pos[a.j]
        v = pos[a.k] - pos[a.j]
        theta = np.arccos(np.dot(u, v) / np.linalg.norm(u) / np.linalg.norm(v))
        expected += 0.5 * a.kb * (theta - a.theta0) ** 2
    for c in ff.couplings:
        expected += c.k * ext[c.bond_a] * ext[c.bond_b]

    assert potential_energy(ff, m2) == pytest.approx(expected, rel=1e-10)


def test_energy_nonnegative_random():
    m, ff = build_co2_preset()
    rng = np.random.default_rng(7)
    for _ in range(50):
        assert potential_energy(ff, _random_state(rng, m)) >= 0.0


# ---------------------------------------------------------------------------
# forces
# ---------------------------------------------------------------------------

def test_forces_zero_at_equilibrium():
    m, ff = build_co2_preset()
    np.testing.assert_array_equal(matter_forces(ff, m), np.zeros((3, 3)))


def test_forces_match_fd_gradient():
    m, ff = build_co2_preset()
    rng = np.random.default_rng(11)
    for _ in range(20):
        m2 = _random_state(rng, m)
        np.testing.assert_allclose(
            matter_forces(ff, m2), -_fd_gradient(ff, m2),
            atol=1e-7,
        )


def test_forces_fd_with_strong_bend():
    """Angle force stays the exact gradient away from linearity."""
    sp = AtomicSpecies("A", 1.0, 0.0)
    ff = HarmonicForceField(
        bonds=(BondTerm(0, 1, 2.0, 0.5), BondTerm(1, 2, 2.0, 0.5)),
        angles=(AngleTerm(0, 1, 2, np.deg2rad(104.0), 0.2),),
    )
    rng = np.random.default_rng(3)
    base = np.array([[2.0, 0, 0], [0, 0, 0], [-0.5, 1.9, 0.0]])
    for _ in range(20):
        m = MatterState((sp, sp, sp),
                        base + 0.2 * rng.standard_normal((3, 3)),
                        np.zeros((3, 3)))
        np.testing.assert_allclose(
            matter_forces(ff, m), -_fd_gradient(ff, m), atol=1e-7)


def test_newtons_third_law():
    m, ff = build_co2_preset()
    rng = np.random.default_rng(13)
    for _ in range(50):
        f = matter_forces(ff, _random_state(rng, m))
        np.testing.assert_allclose(f.sum(axis=0), 0.0, atol=1e-12)


def test_zero_torque_about_com():
    m, ff = build_co2_preset()
    rng = np.random.default_rng(17)
    for _ in range(20):
        m2 = _random_state(rng, m)
        f = matter_forces(ff, m2)
        com = m2.masses @ m2.positions / m2.masses.sum()
        torque = np.cross(m2.positions - com, f).sum(axis=0)
        np.testing.assert_allclose(torque, 0.0, atol=1e-12)


def test_forces_invariant_under_translation():
    m, ff = build_co2_preset()
    rng = np.random.default_rng(19)
    m2 = _random_state(rng, m)
    shifted = m2.with_positions(m2.positions + np.array([5.0, -3.0, 2.0]))
    np.testing.assert_allclose(matter_forces(ff, shifted),
                               matter_forces(ff, m2), atol=1e-12)


def test_force_regular_at_linear_geometry():
    """theta = pi is an interior minimum of the bend, not a singularity."""
    m, ff = build_co2_preset()
    f = matter_forces(ff, m)  # exactly linear geometry
    assert np.isfinite(f).all()
    # tiny transverse displacement: restoring force, finite and smooth
    pos = m.positions.copy()
    pos[0, 1] += 1e-10
    f2 = matter_forces(ff, m.with_positions(pos))
    assert np.isfinite(f2).all()
    assert f2[0, 1] < 0.0  # pulls the carbon back


def test_bad_indices_rejected():
    sp = AtomicSpecies("A", 1.0, 0.0)
    m = MatterState((sp, sp), np.zeros((2, 3)) + [[0, 0, 0], [2, 0, 0]],
                    np.zeros((2, 3)))
    ff = HarmonicForceField(bonds=(BondTerm(0, 5, 2.0, 1.0),))
    with pytest.raises(IndexError):
        potential_energy(ff, m)


# ---------------------------------------------------------------------------
# dipole
# ---------------------------------------------------------------------------

def test_dipole_zero_at_equilibrium():
    m, _ = build_co2_preset()
    np.testing.assert_allclose(dipole_moment(m), 0.0, atol=1e-15)


def test_dipole_linear_in_carbon_shift():
    m, _ = build_co2_preset()
    d = 0.37
    pos = m.positions.copy()
    pos[0, 0] += d
    mu = dipole_moment(m.with_positions(pos))
    np.testing.assert_allclose(mu, [0.8 * d, 0.0, 0.0], atol=1e-14)


def test_dipole_direct_resummation():
    m, _ = build_co2_preset()
    rng = np.random.default_rng(23)
    m2 = _random_state(rng, m, scale=1.0)
    expected = sum(sp.charge * m2.positions[i]
                   for i, sp in enumerate(m2.species))
    np.testing.assert_allclose(dipole_moment(m2), expected, rtol=1e-14)


def test_dipole_origin_invariance():
    m, _ = build_co2_preset()
    rng = np.random.default_rng(29)
    for _ in range(20):
        m2 = _random_state(rng, m)
        shifted = m2.with_positions(m2.positions + rng.standard_normal(3))
        np.testing.assert_allclose(dipole_moment(shifted), dipole_moment(m2),
                                   atol=1e-12)


def test_charged_system_rejected_without_origin():
    sp = AtomicSpecies("X", 1.0, 0.5)
    m = MatterState((sp,), [[1.0, 0, 0]], np.zeros((1, 3)))
    with pytest.raises(ValueError, match="net charge"):
        dipole_moment(m)
    np.testing.assert_allclose(dipole_moment(m, origin=(0, 0, 0)),
                               [0.5, 0, 0])


def test_dipole_jacobian_blocks():
    m, _ = build_co2_preset()
    jac = dipole_jacobian(m)
    assert jac.shape == (3, 9)
    np.testing.assert_array_equal(jac[:, 0:3], 0.8 * np.eye(3))
    np.testing.assert_array_equal(jac[:, 3:6], -0.4 * np.eye(3))
    np.testing.assert_array_equal(jac[:, 6:9], -0.4 * np.eye(3))


def test_dipole_jacobian_matches_fd():
    m, _ = build_co2_preset()
    step = 1e-6
    jac = dipole_jacobian(m)
    for col in range(9):
        a, x = divmod(col, 3)
        dp = m.positions.copy()
        dm = m.positions.copy()
        dp[a, x] += step
        dm[a, x] -= step
        fd = (dipole_moment(m.with_positions(dp))
              - dipole_moment(m.with_positions(dm))) / (2 * step)
        np.testing.assert_allclose(jac[:, col], fd, atol=1e-9)


def test_dipole_jacobian_neutrality_contraction():
    m, _ = build_co2_preset()
    jac = dipole_jacobian(m)
    translate = np.tile(np.eye(3), (1, 3)).reshape(3, 9).T  # uniform shift
    np.testing.assert_allclose(jac @ translate.reshape(9, -1), 0.0,
                               atol=1e-14)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def test_matter_state_validation():
    sp = AtomicSpecies("A", 1.0, 0.0)
    with pytest.raises(ValueError, match="shape"):
        MatterState((sp,), np.zeros((2, 3)), np.zeros((1, 3)))
    with pytest.raises(ValueError, match="non-finite"):
        MatterState((sp,), [[np.nan, 0, 0]], np.zeros((1, 3)))
    with pytest.raises(ValueError, match="two different species"):
        MatterState((sp, AtomicSpecies("A", 2.0, 0.0)),
                    np.zeros((2, 3)), np.zeros((2, 3)))


def test_matter_state_arrays_read_only():
    m, _ = build_co2_preset()
    with pytest.raises(ValueError):
        m.positions[0, 0] = 1.0


def test_species_mass_conversion():
    sp = AtomicSpecies("O", 15.999, -0.4)
    assert sp.mass == pytest.approx(15.999 * units.ME_PER_AMU, rel=1e-14)
    with pytest.raises(ValueError):
        AtomicSpecies("O", -1.0, 0.0)


def test_photon_mode_validation():
    with pytest.raises(ValueError):
        PhotonMode(omega=-0.01, lambda_vec=[0, 0, 0])
    mode = PhotonMode(omega=0.01, lambda_vec=[0.05, 0, 0])
    assert mode.coupling_strength == pytest.approx(0.05)
    np.testing.assert_allclose(mode.polarization, [1, 0, 0])
    with pytest.raises(ValueError, match="polarization"):
        PhotonMode(omega=0.01, lambda_vec=[0, 0, 0]).polarization


def test_drive_signals():
    none = DriveSignal()
    assert none(3.7) == 0.0
    sin = DriveSignal(kind="sinusoid", amplitude=2.0, omega=0.5, phase=0.1)
    assert sin(1.3) == pytest.approx(2.0 * np.sin(0.5 * 1.3 + 0.1))
    imp = DriveSignal(kind="impulse", amplitude=1.5, t0=10.0, width=2.0)
    assert imp(10.0) == pytest.approx(1.5)
    assert imp(12.0) == pytest.approx(1.5 * np.exp(-0.5))
    with pytest.raises(ValueError):
        DriveSignal(kind="impulse", width=0.0)
    with pytest.raises(ValueError):
        DriveSignal(kind="boxcar")


def test_atom_indices_lookup():
    m, _ = build_co2_preset()
    assert m.atom_indices("C") == [0]
    assert m.atom_indices("O") == [1, 2]
    with pytest.raises(KeyError):
        m.atom_indices("N")


# ---------------------------------------------------------------------------
# CO2 preset contract
# ---------------------------------------------------------------------------

def test_preset_geometry_and_charges():
    m, _ = build_co2_preset()
    assert m.labels == ("C", "O", "O")
    q = m.charges
    assert q[0] == pytest.approx(-2.0 * q[1])
    assert q.sum() == pytest.approx(0.0, abs=1e-15)
    r0 = units.angstrom_to_bohr(1.16)
    np.testing.assert_allclose(m.positions[1], [r0, 0, 0], atol=1e-14)
    np.testing.assert_allclose(m.positions[2], [-r0, 0, 0], atol=1e-14)
    # aligned with x: no off-axis components anywhere
    np.testing.assert_array_equal(m.positions[:, 1:], np.zeros((3, 2)))


def test_preset_is_deterministic():
    m1, ff1 = build_co2_preset()
    m2, ff2 = build_co2_preset()
    assert ff1 == ff2
    np.testing.assert_array_equal(m1.positions, m2.positions)
