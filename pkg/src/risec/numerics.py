"""Complex Hermitian linear-algebra primitives shared by the optimization modules.

Eigenpairs are computed by a cyclic Jacobi rotation algorithm on the
2d x 2d real-symmetric embedding [[Re A, -Im A], [Im A, Re A]] of the
Hermitian matrix A.  Problem dimensions never exceed ~130, so the O(d^3)
cost per sweep is acceptable; the inner loops are numba-compiled.
"""

import numpy as np
from numba import njit

HERMITIAN_ATOL = 1e-12
PSD_EIG_TOL = 1e-9


class NotHermitianError(ValueError):
    """Input matrix is not conjugate-symmetric within tolerance."""


class IndefiniteMatrixError(ValueError):
    """Input matrix has an eigenvalue below the PSD tolerance."""


def _check_hermitian(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    if np.max(np.abs(A - A.conj().T)) > HERMITIAN_ATOL * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    # symmetrize so downstream arithmetic sees an exactly Hermitian matrix
    return 0.5 * (A + A.conj().T)


@njit(cache=True)
def _jacobi_symmetric(M, tol, max_sweeps):  # pragma: no cover - compiled
    d = M.shape[0]
    V = np.eye(d)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                off += M[p, q] * M[p, q]
        if np.sqrt(2.0 * off) <= tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = M[p, q]
                if np.abs(apq) <= 1e-300:
                    continue
                phi = 0.5 * np.arctan2(2.0 * apq, M[q, q] - M[p, p])
                c = np.cos(phi)
                s = np.sin(phi)
                for i in range(d):
                    mip = M[i, p]
                    miq = M[i, q]
                    M[i, p] = c * mip - s * miq
                    M[i, q] = s * mip + c * miq
                for i in range(d):
                    mpi = M[p, i]
                    mqi = M[q, i]
                    M[p, i] = c * mpi - s * mqi
                    M[q, i] = s * mpi + c * mqi
                for i in range(d):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = c * vip - s * viq
                    V[i, q] = s * vip + c * viq
    return np.diag(M).copy(), V


def _embed(A):
    """Real-symmetric embedding of a Hermitian matrix (eigenvalues doubled)."""
    R = A.real
    I = A.imag
    return np.block([[R, -I], [I, R]])


def _jacobi_eig(A, max_sweeps=60):
    """All eigenvalues of Hermitian A via the embedding (each appears twice),
    plus the embedding eigenvector matrix."""
    M = _embed(A)
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
    vals, vecs = _jacobi_symmetric(np.ascontiguousarray(M), 1e-14 * scale, max_sweeps)
    return vals, vecs


def _fix_phase(u):
    """Rotate so the largest-magnitude entry is real and nonnegative."""
    k = int(np.argmax(np.abs(u)))
    a = u[k]
    if np.abs(a) > 0:
        u = u * (np.conj(a) / np.abs(a))
        u[k] = np.abs(u[k])
    return u


def max_eigenpair(A):
    """Largest eigenvalue and unit eigenvector of a Hermitian matrix.

    The eigenvector phase is normalized so its largest-magnitude entry is
    real and nonnegative, making the output deterministic.
    """
    A = _check_hermitian(A)
    d = A.shape[0]
    vals, vecs = _jacobi_eig(A)
    k = int(np.argmax(vals))
    lam = float(vals[k])
    z = vecs[:, k]
    u = z[:d] + 1j * z[d:]
    u = u / np.linalg.norm(u)
    return lam, _fix_phase(u)


def eigvals_hermitian(A):
    """Sorted (ascending) eigenvalue estimates of Hermitian A from the Jacobi
    embedding; each eigenvalue of A appears twice in the embedding, so the
    de-duplicated spectrum is every other sorted value."""
    A = _check_hermitian(A)
    vals, _ = _jacobi_eig(A)
    return np.sort(vals)[::2]


def rank_one_gap(A):
    """tr(A) - lambda_max(A) for a Hermitian PSD matrix.

    Zero (within tolerance) iff rank(A) <= 1.  Raises for indefinite input;
    the PSD tolerance is scaled by the top eigenvalue because subproblem
    solvers return iterates PSD only up to solver accuracy.
    """
    A = _check_hermitian(A)
    vals, _ = _jacobi_eig(A)
    lam_max = float(np.max(vals))
    lam_min = float(np.min(vals))
    if lam_min < -PSD_EIG_TOL * max(1.0, abs(lam_max)):
        raise IndefiniteMatrixError(
            f"matrix is not PSD: min eigenvalue {lam_min:.3e}"
        )
    return float(np.real(np.trace(A))) - lam_max
