import math

import numpy as np
import pytest

from spingauge import (
    EulerAngles,
    NmrHamiltonian,
    NqrHamiltonian,
    Spin,
    coefficients,
    coherent_state,
    expectation_spin_analytic,
    expectation_spin_brute,
    hamiltonian_expectation,
    hamiltonian_gradient,
    lagrangian,
    make_fiducial,
    number_state,
    rotated_number_state,
    topological_term,
)
from conftest import random_angles, random_fiducial

SQ = math.sqrt

FV_II = [SQ(2 / 3), 0.0, SQ(1 / 3)]
FV_V = [SQ(1 / 2), SQ(1 / 6), SQ(1 / 3)]


def test_make_fiducial_preserves_given_unit_vector():
    fv = make_fiducial(Spin(2), FV_II)
    assert np.allclose(fv.amplitudes, FV_II, atol=1e-15)


def test_make_fiducial_normalizes():
    fv = make_fiducial(Spin(2), [2.0, 0.0, 0.0])
    assert np.allclose(fv.amplitudes, [1.0, 0.0, 0.0])


def test_make_fiducial_domain_errors():
    with pytest.raises(ValueError):
        make_fiducial(Spin(2), [0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        make_fiducial(Spin(2), [1.0, 0.0])
    with pytest.raises(ValueError):
        make_fiducial(Spin(2), [np.nan, 0.0, 0.0])


def test_coherent_state_identity_angles():
    fv = make_fiducial(Spin(2), FV_V)
    state = coherent_state(fv, EulerAngles(0.0, 0.0, 0.0))
    assert np.abs(state.amplitudes - fv.amplitudes).max() < 1e-15


def test_coherent_state_diagonal_action(rng):
    # exp(-i psi S3) on |m> is the phase e^{-i m psi}
    for _ in range(5):
        psi = rng.uniform(-6, 6)
        fv = number_state(Spin(3), -0.5)
        state = coherent_state(fv, EulerAngles(0.0, 0.0, psi))
        expected = np.exp(-1j * (-0.5) * psi) * fv.amplitudes
        assert np.abs(state.amplitudes - expected).max() < 1e-12


def test_coherent_state_norm(rng):
    for twice in (1, 2, 3, 4):
        for omega in random_angles(rng, 25):
            fv = random_fiducial(rng, Spin(twice))
            state = coherent_state(fv, omega)
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-12


def test_rotated_number_state_basics(rng):
    spin = Spin(2)
    for m in (1.0, 0.0, -1.0):
        state = rotated_number_state(spin, m, EulerAngles(0.0, 0.0, 0.0))
        assert np.allclose(state.amplitudes, number_state(spin, m).amplitudes)
    with pytest.raises(ValueError):
        rotated_number_state(spin, 2.0, EulerAngles(0.1, 0.2, 0.3))


def test_rotated_number_states_orthonormal(rng):
    spin = Spin(3)
    for omega in random_angles(rng, 10):
        cols = [
            rotated_number_state(spin, m, omega).amplitudes
            for m in spin.m_values()
        ]
        gram = np.array([[np.vdot(a, b) for b in cols] for a in cols])
        assert np.abs(gram - np.eye(spin.dim)).max() < 1e-12


def test_superposition_identity(rng):
    # |Omega> = sum_m c_m |Omega, m>
    for twice in (1, 2, 4):
        spin = Spin(twice)
        fv = random_fiducial(rng, spin)
        for omega in random_angles(rng, 10):
            direct = coherent_state(fv, omega).amplitudes
            summed = sum(
                fv.amplitudes[spin.m_index(m)]
                * rotated_number_state(spin, m, omega).amplitudes
                for m in spin.m_values()
            )
            assert np.abs(direct - summed).max() < 1e-12


def test_coefficients_number_state():
    co = coefficients(number_state(Spin(3), 0.5))
    assert co.a0 == 0.5
    for psi in np.linspace(0, 4 * np.pi, 9):
        assert co.a1(psi) == 0.0
        assert co.a4(psi) == 0.0
        assert co.a2(EulerAngles(0.3, 1.1, psi)) == 0.0


def test_coefficients_survey_values():
    co = coefficients(make_fiducial(Spin(2), FV_II))
    assert abs(co.a0 - 1 / 3) < 1e-12
    for psi in np.linspace(0, 4 * np.pi, 9):
        assert abs(co.a1(psi)) < 1e-15

    co = coefficients(make_fiducial(Spin(2), FV_V))
    assert abs(co.a0 - 1 / 6) < 1e-12
    # pair weight carries the constant (2 + sqrt(6)) / 6
    assert abs(co.a1(0.0) - (2.0 + SQ(6.0)) / 6.0) < 1e-12


def test_coefficients_bounded_by_spin(rng):
    for twice in (1, 2, 3, 4):
        for _ in range(20):
            co = coefficients(random_fiducial(rng, Spin(twice)))
            assert abs(co.a0) <= twice / 2.0 + 1e-12


def test_a1_a4_hermitian_pairing_is_real(rng):
    # evaluate the two-term pairing in full complex arithmetic
    spin = Spin(4)
    fv = random_fiducial(rng, spin)
    co = coefficients(fv)
    w = co.pair_weight
    for psi in rng.uniform(-7, 7, 20):
        a1_complex = 0.5 * (w * np.exp(1j * psi) + np.conj(w) * np.exp(-1j * psi))
        a4_complex = (w * np.exp(1j * psi) - np.conj(w) * np.exp(-1j * psi)) / 2j
        assert abs(a1_complex.imag) < 1e-14
        assert abs(a4_complex.imag) < 1e-14
        assert np.isclose(a1_complex.real, co.a1(psi))
        assert np.isclose(a4_complex.real, co.a4(psi))


def test_expectation_analytic_number_state(rng):
    fv = number_state(Spin(4), 2.0)
    for omega in random_angles(rng, 10):
        s3, sp, sm = expectation_spin_analytic(fv, omega)
        assert abs(s3 - 2.0 * np.cos(omega.theta)) < 1e-12
    # theta = 0 gives <S3> = a0 for any fv
    fv = make_fiducial(Spin(2), FV_V)
    s3, _, _ = expectation_spin_analytic(fv, EulerAngles(0.0, 0.0, 1.7))
    assert abs(s3 - 1 / 6) < 1e-12


def test_expectation_analytic_matches_brute(rng):
    # 200 random (fv, Omega) pairs over s = 1/2 .. 2
    for _ in range(50):
        for twice in (1, 2, 3, 4):
            fv = random_fiducial(rng, Spin(twice))
            omega = random_angles(rng, 1)[0]
            a = expectation_spin_analytic(fv, omega)
            b = expectation_spin_brute(fv, omega)
            assert abs(a[0] - b[0]) < 1e-12
            assert abs(a[1] - b[1]) < 1e-12
            assert abs(a[2] - b[2]) < 1e-12


def test_expectation_brute_adjoint_pair(rng):
    fv = random_fiducial(rng, Spin(3))
    for omega in random_angles(rng, 10):
        _, sp, sm = expectation_spin_brute(fv, omega)
        assert abs(sp - np.conj(sm)) < 1e-14
    s3, _, _ = expectation_spin_brute(
        number_state(Spin(3), 1.5), EulerAngles(0.0, 0.0, 0.0)
    )
    assert abs(s3 - 1.5) < 1e-15


def test_hamiltonian_expectation_number_state(rng):
    mu, b = 1.4, 0.8
    h = NmrHamiltonian(mu, (0.0, 0.0, b))
    for m in (1.0, 0.0, -1.0):
        fv = number_state(Spin(2), m)
        for omega in random_angles(rng, 5):
            val = hamiltonian_expectation(fv, omega, h)
            assert abs(val - (-m * mu * b * np.cos(omega.theta))) < 1e-12


def test_hamiltonian_expectation_survey_fv(rng):
    h = NmrHamiltonian(2.0, (0.0, 0.0, 1.5))
    fv = make_fiducial(Spin(2), FV_II)
    for omega in random_angles(rng, 5):
        val = hamiltonian_expectation(fv, omega, h)
        assert abs(val - (-(1 / 3) * 3.0 * np.cos(omega.theta))) < 1e-12


def test_hamiltonian_expectation_zero_field(rng):
    fv = random_fiducial(rng, Spin(2))
    omega = random_angles(rng, 1)[0]
    assert hamiltonian_expectation(fv, omega, NmrHamiltonian(1.0, (0, 0, 0))) == 0.0


def test_nqr_rejects_spin_half():
    h = NqrHamiltonian(1.0, (0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        hamiltonian_expectation(number_state(Spin(1), 0.5), EulerAngles(0, 1, 0), h)


def test_gradient_number_state(rng):
    mu, b = 1.0, 1.0
    h = NmrHamiltonian(mu, (0.0, 0.0, b))
    for m in (1.0, -1.0):
        fv = number_state(Spin(2), m)
        for omega in random_angles(rng, 5):
            g = hamiltonian_gradient(fv, omega, h)
            assert abs(g[0]) < 1e-12
            assert abs(g[1] - m * mu * b * np.sin(omega.theta)) < 1e-12
            assert abs(g[2]) < 1e-12


def _fd_gradient(fv, omega, h, step=1e-5):
    base = np.asarray(omega, dtype=float)
    out = []
    for i in range(3):
        d = np.zeros(3)
        d[i] = step
        plus = hamiltonian_expectation(fv, EulerAngles(*(base + d)), h)
        minus = hamiltonian_expectation(fv, EulerAngles(*(base - d)), h)
        out.append((plus - minus) / (2 * step))
    return np.array(out)


@pytest.mark.parametrize("ham", [
    NmrHamiltonian(1.3, (0.4, -0.7, 0.5)),
    NqrHamiltonian(0.8, (0.3, 0.9, -0.4)),
])
def test_gradient_matches_finite_differences(rng, ham):
    for twice in (2, 3, 4):
        for _ in range(10):
            fv = random_fiducial(rng, Spin(twice))
            omega = random_angles(rng, 1)[0]
            g = np.array(hamiltonian_gradient(fv, omega, ham))
            fd = _fd_gradient(fv, omega, ham)
            tol = np.maximum(1e-6 * np.maximum(np.abs(g), np.abs(fd)), 1e-9)
            assert np.all(np.abs(g - fd) <= tol)


def test_gradient_psi_component_vanishes_for_symmetric_pairs(rng):
    # H independent of psi whenever the fv has no pair coherences the
    # Hamiltonian can see
    h = NmrHamiltonian(1.0, (0.3, -0.5, 0.8))
    for fv in (number_state(Spin(2), 1.0), make_fiducial(Spin(2), FV_II)):
        for omega in random_angles(rng, 10):
            assert abs(hamiltonian_gradient(fv, omega, h)[2]) < 1e-10


def test_topological_term_no_pair_coherence(rng):
    fv = make_fiducial(Spin(2), FV_II)  # a3 part absent
    for omega in random_angles(rng, 10):
        rates = rng.uniform(-2, 2, 3)
        expected = (1 / 3) * (rates[0] * np.cos(omega.theta) + rates[2])
        assert abs(topological_term(fv, omega, rates) - expected) < 1e-12


def test_topological_term_static():
    fv = make_fiducial(Spin(2), FV_V)
    assert topological_term(fv, EulerAngles(0.2, 0.9, -0.4), (0, 0, 0)) == 0.0


def test_topological_term_matches_state_derivative(rng):
    # i <Omega | d/dt | Omega> along a straight angle path, by central FD
    for twice in (1, 2, 3):
        fv = random_fiducial(rng, Spin(twice))
        omega = random_angles(rng, 1)[0]
        rates = rng.uniform(-2, 2, 3)
        eps = 1e-6

        def state(t):
            ang = EulerAngles(*(np.asarray(omega) + rates * t))
            return coherent_state(fv, ang).amplitudes

        deriv = (state(eps) - state(-eps)) / (2 * eps)
        oracle = (1j * np.vdot(state(0.0), deriv)).real
        assert abs(topological_term(fv, omega, rates) - oracle) < 1e-6


def test_lagrangian_number_state(rng):
    mu, b = 1.0, 1.0
    h = NmrHamiltonian(mu, (0.0, 0.0, b))
    for m in (1.5, -0.5):
        fv = number_state(Spin(3), m)
        for omega in random_angles(rng, 5):
            rates = rng.uniform(-2, 2, 3)
            expected = m * (
                rates[0] * np.cos(omega.theta) + rates[2]
            ) + m * mu * b * np.cos(omega.theta)
            assert abs(lagrangian(fv, omega, rates, h) - expected) < 1e-12


def test_lagrangian_survey_fv(rng):
    mu, b = 1.0, 1.0
    h = NmrHamiltonian(mu, (0.0, 0.0, b))
    fv = make_fiducial(Spin(2), FV_II)
    for omega in random_angles(rng, 5):
        rates = rng.uniform(-2, 2, 3)
        expected = (1 / 3) * (
            rates[0] * np.cos(omega.theta) + rates[2]
        ) + (1 / 3) * mu * b * np.cos(omega.theta)
        assert abs(lagrangian(fv, omega, rates, h) - expected) < 1e-12


def test_lagrangian_static_zero_field():
    fv = make_fiducial(Spin(2), FV_II)
    h = NmrHamiltonian(1.0, (0.0, 0.0, 0.0))
    assert lagrangian(fv, EulerAngles(0.1, 0.7, 0.3), (0, 0, 0), h) == 0.0
