import math

import numpy as np
import pytest

from spingauge import (
    EulerAngles,
    NmrHamiltonian,
    NqrHamiltonian,
    Spin,
    classify_fiducial,
    finite_gauss_check,
    gauss_residual,
    generator,
    h0_shift_check,
    isotropy_subgroups,
    make_fiducial,
    neighbor_coherence,
    number_state,
    rotated_number_state,
    spin_operators,
    symmetry_report,
    weak_shift_check,
)
from spingauge.symmetry import TRIVIAL, U1_ABOUT_S3
from conftest import random_angles, random_fiducial

SQ = math.sqrt

FV_II = make_fiducial(Spin(2), [SQ(2 / 3), 0.0, SQ(1 / 3)])
FV_IV = make_fiducial(Spin(2), [SQ(1 / 3), SQ(1 / 3), SQ(1 / 3)])
FV_V = make_fiducial(Spin(2), [SQ(1 / 2), SQ(1 / 6), SQ(1 / 3)])
FV_VI = make_fiducial(Spin(3), [SQ(2 / 3), 0.0, 0.0, SQ(1 / 3)])

GENERIC_B = (0.37, -0.62, 0.55)


def test_neighbor_coherence_values():
    assert neighbor_coherence(FV_II, 1) == 0.0
    assert abs(neighbor_coherence(FV_II, 2) - SQ(2.0) / 3.0) < 1e-15
    for k in (1, 2, 3):
        assert neighbor_coherence(number_state(Spin(3), 0.5), k) == 0.0
    with pytest.raises(ValueError):
        neighbor_coherence(FV_II, 0)
    with pytest.raises(ValueError):
        neighbor_coherence(FV_II, 3)


def test_symmetry_report_standard_fv():
    report = symmetry_report(number_state(Spin(2), 1.0), NmrHamiltonian(1.0, GENERIC_B))
    assert report.a0 == 1.0
    assert not report.a3_present
    assert report.topological_weak_symmetry
    assert report.hamiltonian_psi_invariant
    assert report.total_weak_symmetry


def test_symmetry_report_quadrupole_sees_second_coherence():
    # same fv: symmetric under the linear Hamiltonian, not under the quadratic
    nmr = symmetry_report(FV_II, NmrHamiltonian(1.0, GENERIC_B))
    nqr = symmetry_report(FV_II, NqrHamiltonian(1.0, GENERIC_B))
    assert nmr.total_weak_symmetry
    assert nqr.topological_weak_symmetry
    assert not nqr.hamiltonian_psi_invariant
    assert not nqr.total_weak_symmetry


def test_symmetry_report_spin_three_halves():
    nmr = symmetry_report(FV_VI, NmrHamiltonian(1.0, GENERIC_B))
    nqr = symmetry_report(FV_VI, NqrHamiltonian(1.0, GENERIC_B))
    assert nmr.a0 == pytest.approx(0.5, abs=1e-12)
    assert nmr.total_weak_symmetry
    assert nqr.total_weak_symmetry


def test_symmetry_report_custom_matrix_uses_sweep_only():
    ops = spin_operators(Spin(2))
    from spingauge import CustomHamiltonian

    diag = CustomHamiltonian(np.asarray(ops.s3))
    report = symmetry_report(FV_II, diag)
    assert report.hamiltonian_psi_invariant
    coupled = CustomHamiltonian(np.asarray(ops.s1))
    report = symmetry_report(FV_IV, coupled)
    assert not report.hamiltonian_psi_invariant


def test_weak_shift_check_symmetric_pairs():
    h = NmrHamiltonian(1.0, GENERIC_B)
    assert weak_shift_check(number_state(Spin(2), 1.0), h, 0.7) < 1e-10
    assert weak_shift_check(FV_II, h, 0.7) < 1e-10
    assert weak_shift_check(FV_II, h, 0.0) < 1e-12


def test_weak_shift_check_requires_symmetry():
    with pytest.raises(ValueError):
        weak_shift_check(FV_IV, NmrHamiltonian(1.0, GENERIC_B), 0.5)


def test_generator_reduces_to_s3_on_axis():
    ops = spin_operators(Spin(3))
    G = generator(Spin(3), EulerAngles(0.0, 0.0, 1.3))
    assert np.abs(G - ops.s3).max() < 1e-12


def test_generator_is_spin_along_rotated_axis(rng):
    # R S3 R+ = S . n with n the rotated z-axis (z-component cos(theta))
    for twice in (1, 2, 3, 4):
        ops = spin_operators(Spin(twice))
        for omega in random_angles(rng, 100):
            G = generator(Spin(twice), omega)
            n = np.array(
                [
                    np.sin(omega.theta) * np.cos(omega.phi),
                    np.sin(omega.theta) * np.sin(omega.phi),
                    np.cos(omega.theta),
                ]
            )
            sn = n[0] * ops.s1 + n[1] * ops.s2 + n[2] * ops.s3
            assert np.abs(G - sn).max() < 1e-12


def test_generator_eigensystem(rng):
    spin = Spin(3)
    for omega in random_angles(rng, 20):
        G = generator(spin, omega)
        evals = np.sort(np.linalg.eigvalsh(G))
        assert np.abs(evals - np.sort(spin.m_values())).max() < 1e-12
        for m in spin.m_values():
            v = rotated_number_state(spin, m, omega).amplitudes
            assert np.linalg.norm(G @ v - m * v) < 1e-12


def test_gauss_residual_number_states():
    for twice in (1, 2, 3, 4):
        spin = Spin(twice)
        for m in spin.m_values():
            assert gauss_residual(number_state(spin, m), EulerAngles(0.4, 1.0, -0.7)) < 1e-12


def test_gauss_residual_frozen_values():
    # || (S3 - a0) fv ||, worked by hand from the amplitudes
    assert abs(gauss_residual(FV_II, EulerAngles(0, 0, 0)) - 2 * SQ(2.0) / 3.0) < 1e-12
    assert abs(gauss_residual(FV_VI, EulerAngles(0, 0, 0)) - SQ(2.0)) < 1e-12


def test_gauss_residual_angle_invariance(rng):
    fv = random_fiducial(rng, Spin(3))
    values = [gauss_residual(fv, omega) for omega in random_angles(rng, 20)]
    assert max(values) - min(values) < 1e-12


def test_finite_gauss_check_number_state(rng):
    fv = number_state(Spin(3), -1.5)
    for omega in random_angles(rng, 5):
        psi_prime = rng.uniform(-10, 10)
        assert finite_gauss_check(fv, omega, psi_prime) < 1e-12


def test_finite_gauss_check_periods(rng):
    omega = EulerAngles(0.3, 1.0, -0.2)
    # integer spin with integer a0: closes after 2 pi
    fv = make_fiducial(Spin(2), [SQ(0.5), 0.0, SQ(0.5)])  # a0 = 0
    assert finite_gauss_check(fv, omega, 2 * np.pi) < 1e-12
    # half-integer spin: closes after 4 pi
    assert finite_gauss_check(FV_VI, omega, 4 * np.pi) < 1e-12
    # generic angle does not close when the Gauss residual is nonzero
    assert finite_gauss_check(FV_II, omega, 2 * np.pi) > 0.1


def test_finite_gauss_equivalence_with_gauss_residual(rng):
    # zero for every psi' exactly when the eigenvalue condition holds
    omega = EulerAngles(0.6, 0.8, 0.1)
    grid = np.linspace(0.0, 4 * np.pi, 64, endpoint=False)
    fv_zero = number_state(Spin(2), 0.0)
    assert gauss_residual(fv_zero, omega) < 1e-12
    assert max(finite_gauss_check(fv_zero, omega, p) for p in grid) < 1e-12
    assert gauss_residual(FV_II, omega) > 0.1
    assert max(finite_gauss_check(FV_II, omega, p) for p in grid) > 0.1


def test_classify_standard():
    result = classify_fiducial(number_state(Spin(2), 1.0))
    assert result.verdict == "standard"
    assert result.m == 1.0
    # a global phase keeps the verdict
    fv = make_fiducial(Spin(2), np.exp(0.7j) * number_state(Spin(2), -1.0).amplitudes)
    assert classify_fiducial(fv).verdict == "standard"
    assert classify_fiducial(fv).m == -1.0


def test_classify_any_spin_half_state(rng):
    result = classify_fiducial(make_fiducial(Spin(1), [0.6, 0.8j]))
    assert result.verdict == "orbit"
    assert abs(result.m) == 0.5
    assert result.residual < 1e-10
    for _ in range(10):
        result = classify_fiducial(random_fiducial(rng, Spin(1)))
        assert result.verdict in ("standard", "orbit")


def test_classify_rotated_number_states():
    spin = Spin(2)
    omega = EulerAngles(0.5, 1.1, 0.3)
    expected_axis = np.array(
        [np.sin(1.1) * np.cos(0.5), np.sin(1.1) * np.sin(0.5), np.cos(1.1)]
    )
    for m in (1.0, 0.0):
        fv = make_fiducial(spin, rotated_number_state(spin, m, omega).amplitudes)
        result = classify_fiducial(fv)
        assert result.verdict == "orbit"
        assert result.m == m
        assert result.residual < 1e-8
        # at m = 0 both n and -n solve the eigen relation
        align = abs(float(np.dot(result.axis, expected_axis)))
        assert align > 1.0 - 1e-6


def test_classify_generic_fvs():
    result = classify_fiducial(FV_II)
    assert result.verdict == "generic"
    assert result.residual > 1e-3
    assert not result.a0_zero_exceptional

    result = classify_fiducial(FV_VI)  # a0 = 1/2 yet not on any orbit
    assert result.verdict == "generic"
    assert result.a0 == pytest.approx(0.5, abs=1e-12)
    assert result.a0_is_half_integer


def test_classify_zero_charge_exception():
    result = classify_fiducial(FV_IV)
    assert result.verdict == "generic"
    assert abs(result.a0) < 1e-12
    assert result.a0_zero_exceptional


def test_classify_standard_implies_orbit_axis_z():
    fv = number_state(Spin(3), 0.5)
    ops = spin_operators(Spin(3))
    residual = np.linalg.norm((ops.s3 - 0.5 * np.eye(4)) @ fv.amplitudes)
    assert residual < 1e-12


def test_gauss_zero_iff_standard(rng):
    omega = EulerAngles(0.2, 0.9, -0.5)
    for fv in (number_state(Spin(2), 1.0), number_state(Spin(3), -1.5)):
        assert gauss_residual(fv, omega) < 1e-10
        assert classify_fiducial(fv).verdict == "standard"
    for fv in (FV_II, FV_V, FV_VI, random_fiducial(rng, Spin(2))):
        if classify_fiducial(fv).verdict != "standard":
            assert gauss_residual(fv, omega) > 1e-10


def test_isotropy_table_columns():
    r = isotropy_subgroups(number_state(Spin(2), 1.0), 1)
    assert (r.h_subgroup, r.h0_subgroup) == (U1_ABOUT_S3, U1_ABOUT_S3)
    r = isotropy_subgroups(FV_II, 1)
    assert (r.h_subgroup, r.h0_subgroup) == (TRIVIAL, U1_ABOUT_S3)
    r = isotropy_subgroups(FV_IV, 1)
    assert (r.h_subgroup, r.h0_subgroup) == (TRIVIAL, TRIVIAL)


def test_isotropy_order_dependence():
    # the spin-3/2 pair survives order 2 but not order 3, where the
    # separation-3 coherence enters
    assert isotropy_subgroups(FV_VI, 2).h0_subgroup == U1_ABOUT_S3
    assert isotropy_subgroups(FV_VI, 3).h0_subgroup == TRIVIAL
    assert isotropy_subgroups(FV_II, 2).h0_subgroup == TRIVIAL
    with pytest.raises(ValueError):
        isotropy_subgroups(FV_II, 0)


def test_h0_shift_check_symmetric_columns(rng):
    omega = EulerAngles(0.3, 1.0, -0.2)
    rates = (0.5, -0.3, 0.8)
    assert h0_shift_check(number_state(Spin(2), 1.0), omega, rates, 0.9) < 1e-6
    assert h0_shift_check(number_state(Spin(3), -0.5), omega, rates, 1.7) < 1e-6
    assert h0_shift_check(FV_II, omega, rates, 0.9) < 1e-6
    assert h0_shift_check(FV_VI, omega, rates, 0.9) < 1e-6


def test_h0_shift_check_zero_rate(rng):
    omega = EulerAngles(0.3, 1.0, -0.2)
    assert h0_shift_check(FV_II, omega, (0.5, -0.3, 0.8), 0.0) < 1e-8


def test_h0_shift_check_requires_stabilizer():
    with pytest.raises(ValueError):
        h0_shift_check(FV_IV, EulerAngles(0, 1, 0), (1, 0, 0), 0.5)


def test_symmetry_report_matches_table_booleans():
    # every survey column, checked directly against the embedded goldens
    from spingauge.tables import build_table1

    rows, mismatches = build_table1()
    assert mismatches == []
    assert [r["a0"] for r in rows] == ["m", "1/3", "1/3", "0", "1/6", "1/2", "1/2"]
