"""Fiducial vectors, coherent states, Lagrangian coefficients and expectations.

A coherent state is the Euler-angle rotation of a fixed unit "fiducial"
vector; everything the semiclassical Lagrangian needs (the monopole
strength a0, the adjacent-pair couplings a1/a4, the transverse coupling
a2) is a functional of the fiducial amplitudes alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .hamiltonians import Hamiltonian
from .spin import (
    EulerAngles,
    Spin,
    _check_angles,
    _rotation_pieces,
    rotation_matrix,
    spin_operators,
)


@dataclass(frozen=True)
class FiducialVector:
    """Unit-norm complex amplitudes c_m, ordered m = s, s-1, ..., -s."""

    spin: Spin
    amplitudes: np.ndarray

    def amplitude(self, m: float) -> complex:
        return complex(self.amplitudes[self.spin.m_index(m)])


def make_fiducial(spin: Spin, raw) -> FiducialVector:
    """Normalize raw amplitudes into a fiducial vector.

    Wrong length, non-finite entries, or a zero vector are domain errors;
    the input ordering (m = s down to -s) is preserved.
    """
    c = np.ascontiguousarray(raw, dtype=np.complex128).reshape(-1)
    if c.shape[0] != spin.dim:
        raise ValueError(
            f"expected {spin.dim} amplitudes for spin {spin.value}, got {c.shape[0]}"
        )
    if not np.all(np.isfinite(c.real)) or not np.all(np.isfinite(c.imag)):
        raise ValueError("amplitudes must be finite")
    norm = np.linalg.norm(c)
    if norm == 0.0:
        raise ValueError("fiducial vector must not be the zero vector")
    c = c / norm
    c.flags.writeable = False
    return FiducialVector(spin, c)


def number_state(spin: Spin, m: float) -> FiducialVector:
    """The S3 eigenvector |m> as a fiducial vector."""
    c = np.zeros(spin.dim, dtype=np.complex128)
    c[spin.m_index(m)] = 1.0
    c.flags.writeable = False
    return FiducialVector(spin, c)


@dataclass(frozen=True)
class CoherentState:
    """Rotated fiducial vector together with the data that produced it."""

    spin: Spin
    amplitudes: np.ndarray
    fiducial: FiducialVector
    angles: EulerAngles


def coherent_state(fv: FiducialVector, omega: EulerAngles) -> CoherentState:
    """Apply the Euler rotation to the fiducial vector."""
    omega = _check_angles(omega)
    v = rotation_matrix(fv.spin, omega) @ fv.amplitudes
    v.flags.writeable = False
    return CoherentState(fv.spin, v, fv, omega)


def rotated_number_state(spin: Spin, m: float, omega: EulerAngles) -> CoherentState:
    """Rotated S3 eigenvector |Omega, m>, i.e. column m of the rotation."""
    return coherent_state(number_state(spin, m), omega)


@dataclass(frozen=True)
class LagrangianCoefficients:
    """Coefficient functions of the coherent-state Lagrangian.

    ``a0`` is the fictitious monopole strength sum_m m |c_m|^2.  The
    psi-dependent couplings all derive from the adjacent-pair weight
    w = sum_m f(s, m) conj(c_m) c_{m-1}:

    * a1(psi) = Re(w e^{i psi})      (pairs with phi_dot sin(theta))
    * a4(psi) = Im(w e^{i psi})      (pairs with theta_dot)
    * a2(omega)                      (transverse ladder expectation part)
    """

    spin: Spin
    amplitudes: np.ndarray
    a0: float
    pair_weight: complex

    def a1(self, psi: float) -> float:
        return (self.pair_weight * np.exp(1j * psi)).real

    def a4(self, psi: float) -> float:
        return (self.pair_weight * np.exp(1j * psi)).imag

    def a2(self, omega: EulerAngles) -> complex:
        phi, theta, psi = omega
        w = self.pair_weight
        return 0.5 * np.exp(1j * phi) * (
            (1.0 + np.cos(theta)) * np.exp(1j * psi) * w
            - (1.0 - np.cos(theta)) * np.exp(-1j * psi) * np.conj(w)
        )

    def a3(self, omega: EulerAngles, omega_dot) -> float:
        """Adjacent-pair part of the topological term,
        -a1 phi_dot sin(theta) + a4 theta_dot."""
        phi_dot, theta_dot, _ = omega_dot
        return -self.a1(omega.psi) * phi_dot * np.sin(omega.theta) + self.a4(
            omega.psi
        ) * theta_dot


def _ladder_weights(spin: Spin) -> np.ndarray:
    dim = spin.dim
    k = np.arange(dim - 1, dtype=np.float64)
    return np.sqrt((spin.twice - k) * (k + 1.0))


def coefficients(fv: FiducialVector) -> LagrangianCoefficients:
    """Lagrangian coefficient set of a fiducial vector."""
    mvals = fv.spin.m_values()
    a0 = float(np.sum(mvals * np.abs(fv.amplitudes) ** 2))
    w = complex(kernels.neighbor_weight(fv.amplitudes, _ladder_weights(fv.spin)))
    return LagrangianCoefficients(fv.spin, fv.amplitudes, a0, w)


def expectation_spin_analytic(fv: FiducialVector, omega: EulerAngles):
    """(<S3>, <S+>, <S->) in the coherent state, from the coefficient formulas."""
    omega = _check_angles(omega)
    co = coefficients(fv)
    phi, theta, psi = omega
    s3 = co.a0 * np.cos(theta) - co.a1(psi) * np.sin(theta)
    s_plus = co.a0 * np.sin(theta) * np.exp(1j * phi) + co.a2(omega)
    return float(s3), complex(s_plus), complex(np.conj(s_plus))


def expectation_spin_brute(fv: FiducialVector, omega: EulerAngles):
    """(<S3>, <S+>, <S->) by direct matrix-vector products (oracle route)."""
    v = coherent_state(fv, omega).amplitudes
    ops = spin_operators(fv.spin)
    s3 = np.vdot(v, ops.s3 @ v).real
    s_plus = np.vdot(v, ops.s_plus @ v)
    s_minus = np.vdot(v, ops.s_minus @ v)
    return float(s3), complex(s_plus), complex(s_minus)


def hamiltonian_expectation(
    fv: FiducialVector, omega: EulerAngles, h: Hamiltonian, t: float = 0.0
) -> float:
    """<Omega| H |Omega> by direct matrix evaluation."""
    omega = _check_angles(omega)
    R = rotation_matrix(fv.spin, omega)
    return float(kernels.sandwich(R, fv.amplitudes, h.matrix(fv.spin)))


def hamiltonian_gradient(
    fv: FiducialVector, omega: EulerAngles, h: Hamiltonian, t: float = 0.0
):
    """(dH/dphi, dH/dtheta, dH/dpsi) from commutator expectations; all real."""
    omega = _check_angles(omega)
    mvals, V, Vh, d = _rotation_pieces(fv.spin.twice)
    R = kernels.rotation(mvals, V, Vh, d, *omega)
    ops = spin_operators(fv.spin)
    g = kernels.angle_gradient(
        R, fv.amplitudes, h.matrix(fv.spin), mvals, ops.s2, omega.phi
    )
    return float(g[0]), float(g[1]), float(g[2])


def topological_term(fv: FiducialVector, omega: EulerAngles, omega_dot) -> float:
    """Geometric-phase part of the Lagrangian,
    a0 (phi_dot cos(theta) + psi_dot) - a1 phi_dot sin(theta) + a4 theta_dot."""
    omega = _check_angles(omega)
    phi_dot, theta_dot, psi_dot = (float(x) for x in omega_dot)
    co = coefficients(fv)
    return (
        co.a0 * (phi_dot * np.cos(omega.theta) + psi_dot)
        + co.a3(omega, (phi_dot, theta_dot, psi_dot))
    )


def lagrangian(
    fv: FiducialVector,
    omega: EulerAngles,
    omega_dot,
    h: Hamiltonian,
    t: float = 0.0,
) -> float:
    """Full semiclassical Lagrangian, topological term minus <H> (hbar = 1)."""
    return topological_term(fv, omega, omega_dot) - hamiltonian_expectation(
        fv, omega, h, t
    )
