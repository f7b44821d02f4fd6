"""Hot numeric kernels, JIT-compiled when the numba backend is active.

Data layout shared by all kernels: amplitude vectors ``c`` are ordered
m = s, s-1, ..., -s; ``mvals`` holds those magnetic quantum numbers;
``fvals[k]`` is the ladder weight coupling component k to k+1; rotations
are built from the cached eigendecomposition S2 = V diag(d) V+.

Everything here is written to be valid both as plain numpy code and
under ``numba.njit`` (see :mod:`spingauge.backend`).
"""

import numpy as np

from .backend import jit_kernel

# singular values below RANK_RTOL * smax count as null directions
RANK_RTOL = 1e-10


@jit_kernel
def rotation(mvals, V, Vh, d, phi, theta, psi):
    """Euler-angle rotation exp(-i phi S3) exp(-i theta S2) exp(-i psi S3)."""
    core = (V * np.exp(-1j * theta * d)) @ Vh
    left = np.exp(-1j * phi * mvals).reshape(-1, 1)
    right = np.exp(-1j * psi * mvals).reshape(1, -1)
    return left * core * right


@jit_kernel
def neighbor_weight(c, fvals):
    """Ladder-weighted sum over adjacent amplitude pairs, sum f conj(c_m) c_{m-1}."""
    w = 0.0 + 0.0j
    for k in range(c.shape[0] - 1):
        w += fvals[k] * np.conj(c[k]) * c[k + 1]
    return w


@jit_kernel
def sandwich(R, c, H):
    """Real expectation <c| R+ H R |c> for Hermitian H."""
    v = R @ c
    return np.vdot(v, H @ v).real


@jit_kernel
def angle_gradient(R, c, H, mvals, S2, phi):
    """Gradient (d/dphi, d/dtheta, d/dpsi) of <Omega|H|Omega>.

    Each derivative equals i<[A, H]> with A the Hermitian generator of the
    corresponding angle: S3, the phi-conjugated S2, and R S3 R+.  For
    Hermitian A and H this reduces to -2 Im <A v, H v> with v = R c.
    """
    n = c.shape[0]
    v = R @ c
    Hv = H @ v

    z1 = np.vdot(mvals * v, Hv)

    g2v = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            acc += np.exp(-1j * phi * (mvals[i] - mvals[j])) * S2[i, j] * v[j]
        g2v[i] = acc
    z2 = np.vdot(g2v, Hv)

    u = np.zeros(n, dtype=np.complex128)  # u = R+ v
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            acc += np.conj(R[j, i]) * v[j]
        u[i] = acc
    g3v = R @ (mvals * u)
    z3 = np.vdot(g3v, Hv)

    return -2.0 * z1.imag, -2.0 * z2.imag, -2.0 * z3.imag


@jit_kernel
def degenerate_solve(a0, a1, a4, sin_t, cos_t, rhs):
    """Minimum-norm SVD solve of the 3x3 variational system.

    The coefficient matrix is structurally singular (zero determinant), so
    the solve always goes through the SVD with explicit rank detection.
    Returns (rates, svals, Vt, rank, residual).
    """
    M = np.zeros((3, 3))
    arc = a0 * sin_t + a1 * cos_t
    M[0, 0] = arc
    M[0, 2] = a1
    M[1, 1] = arc
    M[1, 2] = -a4 * sin_t
    M[2, 0] = a4 * sin_t
    M[2, 1] = a1
    U, svals, Vt = np.linalg.svd(M)
    smax = svals[0]
    rank = 0
    for i in range(3):
        if svals[i] > RANK_RTOL * smax and svals[i] > 0.0:
            rank += 1
    x = np.zeros(3)
    for i in range(rank):
        coef = (U[0, i] * rhs[0] + U[1, i] * rhs[1] + U[2, i] * rhs[2]) / svals[i]
        for j in range(3):
            x[j] += coef * Vt[i, j]
    resid = 0.0
    for i in range(3):
        ri = M[i, 0] * x[0] + M[i, 1] * x[1] + M[i, 2] * x[2] - rhs[i]
        resid += ri * ri
    return x, svals, Vt, rank, np.sqrt(resid)


@jit_kernel
def pin_psi_rate(x, Vt, rank, target):
    """Move a rank-deficient solution along its null space until the psi
    component equals ``target``; no-op when the null space cannot reach psi."""
    out = x.copy()
    if rank >= 3:
        return out
    npsi = 0.0
    for i in range(rank, 3):
        npsi += Vt[i, 2] * Vt[i, 2]
    if npsi < 1e-24:
        return out
    delta = (target - x[2]) / npsi
    for i in range(rank, 3):
        coef = Vt[i, 2] * delta
        for j in range(3):
            out[j] += coef * Vt[i, j]
    return out


@jit_kernel
def velocity_rhs(phi, theta, psi, c, mvals, fvals, V, Vh, d, S2, H, a0):
    """Assemble and solve the variational system at one configuration.

    Returns (rates, svals, Vt, rank, residual, rhs_norm); the caller decides
    whether the residual means the system has no solution.
    """
    R = rotation(mvals, V, Vh, d, phi, theta, psi)
    gphi, gtheta, gpsi = angle_gradient(R, c, H, mvals, S2, phi)
    we = neighbor_weight(c, fvals) * np.exp(1j * psi)
    rhs = np.empty(3)
    rhs[0] = -gtheta
    rhs[1] = gphi
    rhs[2] = gpsi
    x, svals, Vt, rank, resid = degenerate_solve(
        a0, we.real, we.imag, np.sin(theta), np.cos(theta), rhs
    )
    rhs_norm = np.sqrt(rhs[0] ** 2 + rhs[1] ** 2 + rhs[2] ** 2)
    return x, svals, Vt, rank, resid, rhs_norm
