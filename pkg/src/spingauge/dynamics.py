"""Semiclassical evolution of the Euler angles, exact quantum propagation,
and the comparison between the two.

The variational equations form a structurally degenerate 3x3 linear system
in the angle rates: its matrix has zero determinant identically, so every
configuration leaves at least one free direction.  The integrator solves
for the minimum-norm rates by SVD and then pins the psi-rate of the free
(null) directions to a user-chosen gauge profile, making the otherwise
arbitrary third angle explicit and reproducible.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .coherent import (
    FiducialVector,
    _ladder_weights,
    coefficients,
    coherent_state,
    make_fiducial,
    number_state,
)
from .errors import ConsistencyError, IntegrationError, NoSolutionError
from .hamiltonians import Hamiltonian, NmrHamiltonian
from .spin import EulerAngles, Spin, _check_angles, _rotation_pieces, spin_operators
from .symmetry import classify_fiducial

# least-squares residual above this fraction of |rhs| means "no solution"
INCONSISTENCY_RTOL = 1e-6
# steps landing this close to a coordinate pole get rejected while moving
POLE_SIN_THETA = 1e-8


class ConstantGauge:
    """Hold psi fixed: zero rate along the free direction."""

    def rate(self, t: float) -> float:
        return 0.0

    def __repr__(self):
        return "ConstantGauge()"

    def __eq__(self, other):
        return isinstance(other, ConstantGauge)


@dataclass(frozen=True)
class LinearGauge:
    """Drive psi at a constant rate along the free direction."""

    rate_value: float

    def rate(self, t: float) -> float:
        return self.rate_value


@dataclass(frozen=True)
class TabulatedGauge:
    """Piecewise-linear psi(t) samples; the gauge rate is the local slope
    (zero outside the tabulated range, matching a clamped interpolation)."""

    times: tuple[float, ...]
    psis: tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        psis = tuple(float(p) for p in self.psis)
        if len(times) != len(psis) or len(times) < 2:
            raise ValueError("need at least two (t, psi) samples")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "psis", psis)

    def rate(self, t: float) -> float:
        if t < self.times[0] or t > self.times[-1]:
            return 0.0
        i = min(bisect.bisect_right(self.times, t), len(self.times) - 1)
        return (self.psis[i] - self.psis[i - 1]) / (self.times[i] - self.times[i - 1])


@dataclass(frozen=True)
class VelocityField:
    """Minimum-norm angle rates plus the degeneracy data of the solve."""

    rates: np.ndarray
    rank: int
    null_direction: Optional[np.ndarray]
    residual: float
    singular_values: np.ndarray


class _Workspace:
    """Flat arrays for the kernels, built once per (fv, Hamiltonian)."""

    def __init__(self, fv: FiducialVector, h: Hamiltonian):
        self.c = np.ascontiguousarray(fv.amplitudes)
        self.mvals, self.V, self.Vh, self.d = _rotation_pieces(fv.spin.twice)
        self.fvals = _ladder_weights(fv.spin)
        self.S2 = np.ascontiguousarray(spin_operators(fv.spin).s2)
        self.H = np.ascontiguousarray(h.matrix(fv.spin), dtype=np.complex128)
        self.a0 = coefficients(fv).a0

    def solve(self, phi, theta, psi):
        return kernels.velocity_rhs(
            phi, theta, psi, self.c, self.mvals, self.fvals,
            self.V, self.Vh, self.d, self.S2, self.H, self.a0,
        )


def _oriented(direction: np.ndarray) -> np.ndarray:
    for comp in (direction[2], direction[0], direction[1]):
        if abs(comp) > 1e-12:
            return direction if comp > 0 else -direction
    return direction


def velocity_field(
    fv: FiducialVector, omega: EulerAngles, h: Hamiltonian, t: float = 0.0
) -> VelocityField:
    """Minimum-norm solution of the variational equations at one configuration.

    Raises :class:`NoSolutionError` when the least-squares residual shows the
    system is inconsistent (a nonzero psi-gradient in a gauge-degenerate
    direction).
    """
    omega = _check_angles(omega)
    ws = _Workspace(fv, h)
    x, svals, Vt, rank, resid, rhs_norm = ws.solve(*omega)
    if resid > INCONSISTENCY_RTOL * rhs_norm:
        raise NoSolutionError(
            f"variational system inconsistent at {tuple(omega)}: "
            f"residual {resid:.3e} vs |rhs| {rhs_norm:.3e}"
        )
    null = _oriented(Vt[rank].copy()) if rank < 3 else None
    return VelocityField(x, int(rank), null, float(resid), svals.copy())


@dataclass(frozen=True)
class SemiclassicalTrajectory:
    times: np.ndarray
    omegas: np.ndarray
    rank_deficient: np.ndarray
    stats: dict


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_ERR = (
    71 / 57600, 0.0, -71 / 16695, 71 / 1920,
    -17253 / 339200, 22 / 525, -1 / 40,
)


def semiclassical_evolve(
    fv: FiducialVector,
    omega0: EulerAngles,
    h: Hamiltonian,
    t_final: float,
    gauge=None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    sample_times=None,
    first_step: Optional[float] = None,
    max_steps: int = 1_000_000,
) -> SemiclassicalTrajectory:
    """Integrate the variational equations with an embedded 4(5) pair.

    The psi-rate of every rank-deficient solve is pinned to the gauge
    profile.  Steps that land next to a coordinate pole while still moving
    in (phi, theta) are rejected and halved; if that drives the step size
    to underflow an :class:`IntegrationError` carrying the failing time is
    raised.
    """
    if t_final <= 0.0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    omega0 = _check_angles(omega0)
    gauge = gauge if gauge is not None else ConstantGauge()
    ws = _Workspace(fv, h)

    def rhs(t, y):
        x, svals, Vt, rank, resid, rhs_norm = ws.solve(y[0], y[1], y[2])
        if resid > INCONSISTENCY_RTOL * rhs_norm:
            if abs(math.sin(y[1])) < 1e-6:
                raise _PoleInconsistency()
            raise NoSolutionError(
                f"variational system inconsistent at t={t:.6g}: "
                f"residual {resid:.3e} vs |rhs| {rhs_norm:.3e}"
            )
        if rank < 3:
            x = kernels.pin_psi_rate(x, Vt, rank, gauge.rate(t))
        return x, int(rank)

    if sample_times is None:
        sample_times = np.linspace(0.0, t_final, 201)
    sample_times = np.asarray(sample_times, dtype=np.float64)
    if sample_times[0] != 0.0 or np.any(np.diff(sample_times) <= 0.0):
        raise ValueError("sample_times must start at 0 and increase")
    if not math.isclose(sample_times[-1], t_final, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError("sample_times must end at t_final")

    y = np.asarray(omega0, dtype=np.float64)
    t = 0.0
    k = [None] * 7
    try:
        k[0], rank0 = rhs(t, y)
    except _PoleInconsistency:
        raise NoSolutionError(
            f"variational system inconsistent at the initial pole {tuple(omega0)}"
        ) from None
    stats = {"accepted": 0, "rejected": 0, "pole_rejections": 0, "rhs_evals": 1}

    out_y = [y.copy()]
    out_rank = [rank0 < 3]
    next_idx = 1

    h_step = first_step if first_step is not None else t_final / 1000.0
    h_min = 1e-14 * max(1.0, t_final)

    while next_idx < len(sample_times):
        if stats["accepted"] + stats["rejected"] >= max_steps:
            raise IntegrationError(f"step budget exhausted at t={t:.6g}", t=t)
        target = sample_times[next_idx]
        h_step = min(h_step, target - t)
        if h_step < h_min:
            raise IntegrationError(f"step size underflow at t={t:.6g}", t=t)

        try:
            for i in range(1, 7):
                yi = y + h_step * sum(a * k[j] for j, a in enumerate(_A[i]) if a != 0.0)
                k[i], rank_i = rhs(t + _C[i] * h_step, yi)
                stats["rhs_evals"] += 1
        except _PoleInconsistency:
            stats["pole_rejections"] += 1
            h_step *= 0.5
            continue
        y_new = yi  # stage 7 node equals the fifth-order solution (FSAL)

        if abs(math.sin(y_new[1])) < POLE_SIN_THETA and (
            abs(k[0][0]) > 1e-12 or abs(k[0][1]) > 1e-12
        ):
            stats["pole_rejections"] += 1
            h_step *= 0.5
            continue

        err_vec = h_step * sum(e * k[i] for i, e in enumerate(_ERR) if e != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = math.sqrt(float(np.mean((err_vec / scale) ** 2)))

        if err_norm <= 1.0:
            t = t + h_step
            y = y_new
            rank_new = rank_i
            k[0] = k[6]
            stats["accepted"] += 1
            if abs(t - target) <= 1e-12 * max(1.0, t_final):
                t = target
                out_y.append(y.copy())
                out_rank.append(rank_new < 3)
                next_idx += 1
            factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        else:
            stats["rejected"] += 1
            if h_step <= h_min:
                raise IntegrationError(f"step size underflow at t={t:.6g}", t=t)
            factor = max(0.2, 0.9 * err_norm ** -0.2)
        h_step = max(h_step * factor, h_min)

    return SemiclassicalTrajectory(
        times=sample_times.copy(),
        omegas=np.asarray(out_y),
        rank_deficient=np.asarray(out_rank, dtype=bool),
        stats=stats,
    )


class _PoleInconsistency(Exception):
    """Internal: inconsistent solve inside the polar coordinate singularity."""


def full_quantum_states(
    fv: FiducialVector, omega0: EulerAngles, h: Hamiltonian, times
) -> np.ndarray:
    """exp(-i H t) applied to the initial coherent state, for each time."""
    v0 = coherent_state(fv, omega0).amplitudes
    evals, vecs = np.linalg.eigh(h.matrix(fv.spin))
    proj = vecs.conj().T @ v0
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    phases = np.exp(-1j * np.outer(times, evals))
    return (phases * proj) @ vecs.T  # (n, dim)


def full_quantum_evolve(
    fv: FiducialVector, omega0: EulerAngles, h: Hamiltonian, t: float
) -> np.ndarray:
    """Single-time exact propagation by Hermitian eigendecomposition."""
    return full_quantum_states(fv, omega0, h, [t])[0]


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>| for unit vectors, clipped into [0, 1]."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("states must be nonzero")
    return float(min(1.0, abs(np.vdot(a, b)) / (na * nb)))


def ray_distance(a: np.ndarray, b: np.ndarray) -> float:
    """sqrt(1 - |<a|b>|^2): zero exactly on the same ray, one when orthogonal.

    Evaluated as the norm of the projection residual a - b <b|a>, which is
    the same quantity but stays accurate near zero where the fidelity form
    would cancel catastrophically.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("states must be nonzero")
    ah = a / na
    bh = b / nb
    resid = ah - bh * np.vdot(bh, ah)
    return float(min(1.0, np.linalg.norm(resid)))


_DEFAULT_OMEGA0 = EulerAngles(0.0, math.pi / 3.0, 0.4)


def propagator_phase_ratio(
    fv: FiducialVector,
    omega_f: EulerAngles,
    t: float,
    gauge=None,
    h: Optional[Hamiltonian] = None,
    omega0: EulerAngles = _DEFAULT_OMEGA0,
    phase_tol: float = 1e-9,
) -> complex:
    """Ratio of the exact to the semiclassical propagator for an S3 eigenstate.

    For a standard fiducial vector the two transition amplitudes onto any
    final coherent state differ by the pure phase exp(i m (psi(t) - psi0));
    the computed ratio is checked against that phase to ``phase_tol`` and
    returned.  A near-zero semiclassical overlap leaves the ratio undefined.
    """
    verdict = classify_fiducial(fv)
    if verdict.verdict != "standard":
        raise ValueError("propagator phase ratio is defined for S3 eigenstates only")
    m = verdict.m
    h = h if h is not None else NmrHamiltonian(1.0, (0.0, 0.0, 1.0))

    traj = semiclassical_evolve(
        fv, omega0, h, t, gauge=gauge, sample_times=np.array([0.0, t])
    )
    omega_sc = EulerAngles(*traj.omegas[-1])
    sc_state = coherent_state(fv, omega_sc).amplitudes
    fq_state = full_quantum_evolve(fv, omega0, h, t)
    target = coherent_state(fv, omega_f).amplitudes

    denom = np.vdot(target, sc_state)
    if abs(denom) < 1e-12:
        raise ValueError("semiclassical overlap below 1e-12; ratio undefined")
    ratio = complex(np.vdot(target, fq_state) / denom)

    expected = np.exp(1j * m * (omega_sc.psi - omega0.psi))
    if abs(ratio - expected) > phase_tol:
        raise ConsistencyError(
            f"propagator ratio {ratio} deviates from the gauge phase {expected}"
        )
    return ratio


@dataclass(frozen=True)
class TrajectoryResult:
    """Side-by-side semiclassical and exact evolutions of one case."""

    case: str
    times: np.ndarray
    omegas: np.ndarray
    sc_states: np.ndarray
    fq_states: np.ndarray
    fidelity: np.ndarray
    ray_distance: np.ndarray
    rank_deficient: np.ndarray
    stats: dict
    max_ray_distance: float
    verdict: str


_SQ = math.sqrt


def case_fiducial(case_id: str, spin: Optional[Spin] = None, m: Optional[float] = None):
    """Fiducial vectors of the three worked cases (i, ii, v)."""
    if case_id == "i":
        spin = spin if spin is not None else Spin(2)
        return number_state(spin, m if m is not None else spin.value)
    if case_id == "ii":
        return make_fiducial(Spin(2), [_SQ(2 / 3), 0.0, _SQ(1 / 3)])
    if case_id == "v":
        return make_fiducial(Spin(2), [_SQ(1 / 2), _SQ(1 / 6), _SQ(1 / 3)])
    raise ValueError(f"unknown case {case_id!r}; expected 'i', 'ii' or 'v'")


def compare_evolutions(
    fv: FiducialVector,
    omega0: EulerAngles,
    h: Hamiltonian,
    t_final: float,
    gauge=None,
    n_samples: int = 201,
    coincide_tol: float = 1e-6,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    case: str = "custom",
) -> TrajectoryResult:
    """Run both evolutions on a shared time grid and report the ray distance."""
    sample_times = np.linspace(0.0, t_final, n_samples)
    traj = semiclassical_evolve(
        fv, omega0, h, t_final, gauge=gauge, rtol=rtol, atol=atol,
        sample_times=sample_times,
    )
    sc_states = np.stack(
        [coherent_state(fv, EulerAngles(*row)).amplitudes for row in traj.omegas]
    )
    fq_states = full_quantum_states(fv, omega0, h, sample_times)
    overlap = np.sum(sc_states.conj() * fq_states, axis=1)
    fid = np.minimum(1.0, np.abs(overlap))
    resid = sc_states - fq_states * overlap.conj()[:, None]
    dist = np.minimum(1.0, np.linalg.norm(resid, axis=1))
    max_dist = float(dist.max())
    return TrajectoryResult(
        case=case,
        times=sample_times,
        omegas=traj.omegas,
        sc_states=sc_states,
        fq_states=fq_states,
        fidelity=fid,
        ray_distance=dist,
        rank_deficient=traj.rank_deficient,
        stats=traj.stats,
        max_ray_distance=max_dist,
        verdict="coincide" if max_dist < coincide_tol else "diverge",
    )


def compare_case(
    case_id: str,
    mu: float = 1.0,
    b_field=(0.0, 0.0, 1.0),
    theta0: float = math.pi / 3.0,
    psi0: float = 0.4,
    phi0: float = 0.0,
    t_final: float = 10.0,
    gauge=None,
    n_samples: int = 201,
    coincide_tol: float = 1e-6,
    spin: Optional[Spin] = None,
    m: Optional[float] = None,
) -> TrajectoryResult:
    """Run one of the worked cases with overridable defaults."""
    fv = case_fiducial(case_id, spin=spin, m=m)
    return compare_evolutions(
        fv,
        EulerAngles(phi0, theta0, psi0),
        NmrHamiltonian(mu, tuple(b_field)),
        t_final,
        gauge=gauge,
        n_samples=n_samples,
        coincide_tol=coincide_tol,
        case=case_id,
    )
