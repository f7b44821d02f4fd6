"""Spin operator matrices, ladder weights and Euler-angle rotation unitaries.

Conventions (used everywhere in the package):

* hbar = 1; Hamiltonian parameters are angular frequencies.
* Basis ordering is m = s, s-1, ..., -s top to bottom, so the top
  component of a column vector belongs to m = +s.
* All matrices are dense complex128; dimensions stay at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import kernels


class EulerAngles(NamedTuple):
    """zyz Euler angles (phi, theta, psi) in radians; unbounded reals."""

    phi: float
    theta: float
    psi: float


@dataclass(frozen=True, order=True)
class Spin:
    """Spin quantum number stored as twice its value, keeping half-integers exact."""

    twice: int

    def __post_init__(self):
        if self.twice < 0:
            raise ValueError(f"twice_spin must be >= 0, got {self.twice}")

    @classmethod
    def of(cls, s: float) -> "Spin":
        """Build from the spin value itself (integer or half-integer)."""
        twice = round(2 * s)
        if abs(2 * s - twice) > 1e-12:
            raise ValueError(f"spin must be integer or half-integer, got {s}")
        return cls(twice)

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def dim(self) -> int:
        return self.twice + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers s, s-1, ..., -s in basis order."""
        return (self.twice - 2.0 * np.arange(self.dim)) / 2.0

    def m_index(self, m: float) -> int:
        """Basis index of the eigenvalue m; rejects m off the half-integer grid."""
        twice_m = round(2 * m)
        if abs(2 * m - twice_m) > 1e-12 or (self.twice - twice_m) % 2 != 0:
            raise ValueError(f"m = {m} is not on the m-grid of spin {self.value}")
        if abs(twice_m) > self.twice:
            raise ValueError(f"|m| = {abs(m)} exceeds spin {self.value}")
        return (self.twice - twice_m) // 2


@dataclass(frozen=True)
class SpinOperators:
    """Dense spin matrices S1, S2, S3 and the ladder pair for one spin."""

    spin: Spin
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray


def ladder_coefficient(spin: Spin, m: float) -> float:
    """Ladder weight f(s, m) = sqrt((s + m)(s - m + 1)).

    Defined for m on the grid with -s + 1 <= m <= s; out-of-range m is a
    domain error.
    """
    idx = spin.m_index(m)  # validates the grid and |m| <= s
    if idx == spin.twice:  # m = -s has no partner below it
        raise ValueError(f"m = {m} is below the ladder range of spin {spin.value}")
    s = spin.value
    return math.sqrt((s + m) * (s - m + 1.0))


@lru_cache(maxsize=None)
def _spin_operators(twice: int) -> SpinOperators:
    spin = Spin(twice)
    dim = spin.dim
    mvals = spin.m_values()
    s_plus = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim - 1):
        # entry coupling m-1 -> m sits on the first superdiagonal
        s_plus[k, k + 1] = ladder_coefficient(spin, mvals[k])
    s_minus = s_plus.conj().T.copy()
    s1 = (s_plus + s_minus) / 2.0
    s2 = (s_plus - s_minus) / 2.0j
    s3 = np.diag(mvals).astype(np.complex128)
    ops = SpinOperators(spin, s1, s2, s3, s_plus, s_minus)
    for a in (ops.s1, ops.s2, ops.s3, ops.s_plus, ops.s_minus):
        a.flags.writeable = False
    return ops


def spin_operators(spin: Spin) -> SpinOperators:
    """Spin matrices for the given spin, cached per dimension."""
    return _spin_operators(spin.twice)


def matrix_exponential(A: np.ndarray) -> np.ndarray:
    """exp(A) for a square complex matrix.

    Skew-Hermitian A (the only generators appearing here, A = -i * Hermitian)
    goes through a Hermitian eigendecomposition, which keeps the result
    unitary to rounding; anything else falls back to scipy's expm.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"square matrix required, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise ValueError("matrix entries must be finite")
    M = 1j * A
    scale = np.abs(M).max()
    if scale == 0.0:
        return np.eye(A.shape[0], dtype=np.complex128)
    if np.abs(M - M.conj().T).max() <= 1e-12 * max(scale, 1.0):
        evals, vecs = np.linalg.eigh(M)
        return (vecs * np.exp(-1j * evals)) @ vecs.conj().T
    return scipy.linalg.expm(A)


@lru_cache(maxsize=None)
def _rotation_pieces(twice: int):
    """Eigendecomposition S2 = V diag(d) V+ plus m-values, in kernel layout."""
    ops = _spin_operators(twice)
    d, V = np.linalg.eigh(ops.s2)
    V = np.ascontiguousarray(V)
    Vh = np.ascontiguousarray(V.conj().T)
    mvals = np.ascontiguousarray(Spin(twice).m_values())
    return mvals, V, Vh, np.ascontiguousarray(d)


def _check_angles(omega: EulerAngles) -> EulerAngles:
    omega = EulerAngles(*omega)
    if not all(math.isfinite(x) for x in omega):
        raise ValueError(f"Euler angles must be finite, got {omega}")
    return omega


def rotation_matrix(spin: Spin, omega: EulerAngles) -> np.ndarray:
    """Rotation unitary exp(-i phi S3) exp(-i theta S2) exp(-i psi S3)."""
    phi, theta, psi = _check_angles(omega)
    mvals, V, Vh, d = _rotation_pieces(spin.twice)
    return kernels.rotation(mvals, V, Vh, d, phi, theta, psi)
