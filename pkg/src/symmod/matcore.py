"""Dense complex linear algebra kernel.

Everything here works on plain ``numpy`` arrays of shape ``(n, n)``; real
input is promoted to complex so that orthogonal and unitary readings share
one code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class MatrixError(ValueError):
    """Input violates a structural precondition (shape, finiteness, PSD)."""


class ConvergenceError(RuntimeError):
    """A numerical routine did not converge."""


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-8
    abs_floor: float = 1e-12

    def __post_init__(self):
        if not (self.rel > 0 and self.abs_floor > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class PolarParts:
    unitary: np.ndarray
    modulus: np.ndarray
    unique: bool


def as_matrix(M) -> np.ndarray:
    """Validate and return ``M`` as a square complex array."""
    A = np.asarray(M)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise MatrixError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        raise MatrixError("empty matrix")
    A = A.astype(complex, copy=False)
    if not np.all(np.isfinite(A)):
        raise MatrixError("matrix has non-finite entries")
    return A


def adj(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def opnorm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2))


def scale_of(M: np.ndarray) -> float:
    """Comparison floor ``max(1, ||M||_inf)`` used by every relative test."""
    return max(1.0, opnorm(M))


def eig_hermitian(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (nonincreasing) and orthonormal eigenvectors of ``(H+H*)/2``."""
    H = hermitian_part(as_matrix(H))
    try:
        w, Q = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    return w[::-1].copy(), Q[:, ::-1].copy()


def eigvals_hermitian(H) -> np.ndarray:
    H = hermitian_part(as_matrix(H))
    try:
        return np.linalg.eigvalsh(H)[::-1].copy()
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


def svd(Z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, sigma, W)`` with ``Z = U diag(sigma) W*``.

    Note the right factor is returned as ``W`` itself, not ``W*``.
    """
    Z = as_matrix(Z)
    try:
        U, s, Wh = np.linalg.svd(Z)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    return U, s, adj(Wh)


def singular_values(Z) -> np.ndarray:
    Z = as_matrix(Z)
    try:
        return np.linalg.svd(Z, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


def _fix_phase(cols: np.ndarray) -> np.ndarray:
    # make the largest-magnitude entry of each column real positive
    idx = np.argmax(np.abs(cols), axis=0)
    piv = cols[idx, np.arange(cols.shape[1])]
    return cols * (np.abs(piv) / piv)


def polar(S, tol: Tolerance = DEFAULT_TOL) -> PolarParts:
    """Polar decomposition ``S = V |S|``.

    For singular ``S`` the unitary factor is the SVD completion ``U W*`` with
    the null-space singular vectors phase-normalized, so that the result does
    not depend on the LAPACK sign conventions.
    """
    U, s, W = svd(S)
    smax = s[0] if s.size else 0.0
    unique = bool(s[-1] > tol.rel * smax) if smax > 0 else False
    if not unique:
        null = s <= tol.rel * max(smax, tol.abs_floor)
        if np.any(null):
            U = U.copy()
            W = W.copy()
            U[:, null] = _fix_phase(U[:, null])
            W[:, null] = _fix_phase(W[:, null])
    V = U @ adj(W)
    modulus = (W * s) @ adj(W)
    return PolarParts(V, hermitian_part(modulus), unique)


def fun_hermitian(H, f: Callable[[np.ndarray], np.ndarray],
                  tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Spectral calculus: ``Q f(diag(lam)) Q*`` for Hermitian ``H``."""
    H = as_matrix(H)
    if not is_hermitian(H, tol):
        raise MatrixError("fun_hermitian needs a Hermitian matrix")
    w, Q = eig_hermitian(H)
    fw = np.asarray(f(w), dtype=float)
    return hermitian_part((Q * fw) @ adj(Q))


def _clamped_psd_eig(P, tol: Tolerance):
    P = as_matrix(P)
    if not is_hermitian(P, tol):
        raise MatrixError("matrix is not Hermitian")
    w, Q = eig_hermitian(P)
    floor = -tol.rel * scale_of(P)
    if w[-1] < floor:
        raise MatrixError(f"matrix is not PSD (min eigenvalue {w[-1]:.3e})")
    return np.clip(w, 0.0, None), Q


def psd_sqrt(P, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    w, Q = _clamped_psd_eig(P, tol)
    return hermitian_part((Q * np.sqrt(w)) @ adj(Q))


def psd_fun(P, f: Callable[[np.ndarray], np.ndarray],
            tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Like :func:`fun_hermitian` but clamps roundoff-negative eigenvalues first."""
    w, Q = _clamped_psd_eig(P, tol)
    return hermitian_part((Q * np.asarray(f(w), dtype=float)) @ adj(Q))


def psd_margin(M) -> float:
    M = as_matrix(M)
    lam_min = eigvals_hermitian(M)[-1]
    return float(lam_min / scale_of(M))


def is_psd(M, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, float]:
    margin = psd_margin(M)
    return margin >= -tol.rel, margin


def _residual_ok(residual: float, scale: float, tol: Tolerance) -> bool:
    return residual <= tol.rel * max(1.0, scale)


def is_unitary(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    n = M.shape[0]
    return _residual_ok(opnorm(adj(M) @ M - np.eye(n)), 1.0, tol)


def is_hermitian(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    return _residual_ok(opnorm(M - adj(M)), opnorm(M), tol)


def is_normal(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    return _residual_ok(opnorm(adj(M) @ M - M @ adj(M)), opnorm(M) ** 2, tol)


def is_involution(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    n = M.shape[0]
    return _residual_ok(opnorm(M @ M - np.eye(n)), opnorm(M) ** 2, tol)


def is_contraction(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    return bool(singular_values(M)[0] <= 1.0 + tol.rel)


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out
