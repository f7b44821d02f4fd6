"""Spin Hamiltonians: linear (NMR), quadrupolar (NQR), and custom matrices.

All variants are time-independent; expectation interfaces still accept a
time argument so time-dependent couplings can be added without breaking
callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .spin import Spin, spin_operators


def _as_b_field(b) -> tuple[float, float, float]:
    bx, by, bz = (float(x) for x in b)
    if not all(np.isfinite(v) for v in (bx, by, bz)):
        raise ValueError(f"B field components must be finite, got {b}")
    return (bx, by, bz)


@dataclass(frozen=True)
class NmrHamiltonian:
    """Linear Zeeman coupling H = -mu * B . S."""

    mu: float
    b_field: tuple[float, float, float]

    spin_order: ClassVar[int] = 1
    kind: ClassVar[str] = "nmr"

    def __post_init__(self):
        object.__setattr__(self, "b_field", _as_b_field(self.b_field))

    def matrix(self, spin: Spin) -> np.ndarray:
        ops = spin_operators(spin)
        bx, by, bz = self.b_field
        return -self.mu * (bx * ops.s1 + by * ops.s2 + bz * ops.s3)


@dataclass(frozen=True)
class NqrHamiltonian:
    """Quadrupolar coupling H = omega_q * (B . S)^2; requires spin >= 1."""

    omega_q: float
    b_field: tuple[float, float, float]

    spin_order: ClassVar[int] = 2
    kind: ClassVar[str] = "nqr"

    def __post_init__(self):
        object.__setattr__(self, "b_field", _as_b_field(self.b_field))

    def matrix(self, spin: Spin) -> np.ndarray:
        if spin.twice < 2:
            raise ValueError(
                f"quadrupolar Hamiltonian needs spin >= 1, got {spin.value}"
            )
        ops = spin_operators(spin)
        bx, by, bz = self.b_field
        bs = bx * ops.s1 + by * ops.s2 + bz * ops.s3
        return self.omega_q * (bs @ bs)


class CustomHamiltonian:
    """Explicit Hermitian matrix, validated on construction."""

    spin_order = None
    kind = "custom"

    def __init__(self, array):
        H = np.ascontiguousarray(array, dtype=np.complex128)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError(f"square matrix required, got shape {H.shape}")
        scale = max(np.abs(H).max(), 1.0)
        if np.abs(H - H.conj().T).max() > 1e-12 * scale:
            raise ValueError("custom Hamiltonian must be Hermitian to 1e-12")
        H.flags.writeable = False
        self.array = H

    def matrix(self, spin: Spin) -> np.ndarray:
        if self.array.shape[0] != spin.dim:
            raise ValueError(
                f"matrix dimension {self.array.shape[0]} does not match "
                f"spin {spin.value} (dimension {spin.dim})"
            )
        return self.array

    def __repr__(self):
        return f"CustomHamiltonian(dim={self.array.shape[0]})"


Hamiltonian = Union[NmrHamiltonian, NqrHamiltonian, CustomHamiltonian]
