"""Matrix geometric mean ``A # B`` and its maximal property."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    DEFAULT_TOL,
    ConvergenceError,
    MatrixError,
    Tolerance,
    adj,
    as_matrix,
    eig_hermitian,
    hermitian_part,
    is_psd,
    opnorm,
)
from .spectral import loewner_leq


@dataclass(frozen=True)
class GeoMeanConfig:
    eps_seq: tuple[float, ...] = (1e-4, 1e-6, 1e-8)
    convergence_tol: float = 1e-3

    def __post_init__(self):
        eps = np.asarray(self.eps_seq, dtype=float)
        if eps.size == 0 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
            raise ValueError("eps_seq must be positive and strictly decreasing")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")


def _psd_eig(A, tol: Tolerance):
    w, Q = eig_hermitian(A)
    scale = max(1.0, abs(w[0]))
    if w[-1] < -tol.rel * scale:
        raise MatrixError(f"geometric mean needs PSD input (min eigenvalue {w[-1]:.3e})")
    return np.clip(w, 0.0, None), Q


def _mean_direct(wa, Qa, B) -> np.ndarray:
    ra = np.sqrt(wa)
    half = (Qa * ra) @ adj(Qa)
    ihalf = (Qa / ra) @ adj(Qa)
    inner = hermitian_part(ihalf @ B @ ihalf)
    wi, Qi = eig_hermitian(inner)
    root = (Qi * np.sqrt(np.clip(wi, 0.0, None))) @ adj(Qi)
    return hermitian_part(half @ root @ half)


def geometric_mean(A, B, cfg: GeoMeanConfig = GeoMeanConfig(),
                   tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}``.

    The better-conditioned argument plays the role of ``A`` (the mean is
    symmetric). If both are numerically singular the mean is taken as the
    limit of ``(A + eps s I) # (B + eps s I)`` along ``cfg.eps_seq``, with
    ``s = max(1, ||A||, ||B||)``; a :class:`ConvergenceError` is raised when
    successive iterates stay more than ``cfg.convergence_tol * s`` apart.
    """
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise MatrixError(f"dimension mismatch {A.shape} vs {B.shape}")
    wa, Qa = _psd_eig(A, tol)
    wb, Qb = _psd_eig(B, tol)
    ca = wa[-1] / max(wa[0], tol.abs_floor)
    cb = wb[-1] / max(wb[0], tol.abs_floor)
    if max(ca, cb) > tol.rel:
        if ca >= cb:
            return _mean_direct(wa, Qa, B)
        return _mean_direct(wb, Qb, A)

    s = max(1.0, opnorm(A), opnorm(B))
    n = A.shape[0]
    prev = None
    for eps in cfg.eps_seq:
        shift = eps * s * np.eye(n)
        wa_e, Qa_e = eig_hermitian(A + shift)
        cur = _mean_direct(np.clip(wa_e, eps * s, None), Qa_e, B + shift)
        if prev is not None and opnorm(cur - prev) < cfg.convergence_tol * s:
            return cur
        prev = cur
    raise ConvergenceError("geometric mean did not converge along eps_seq")


def max_property_holds(A, B, X, cfg: GeoMeanConfig = GeoMeanConfig(),
                       tol: Tolerance = DEFAULT_TOL) -> bool:
    """If ``[[A, X], [X, B]]`` is PSD then ``X <= A # B``; vacuously true otherwise."""
    A, B, X = as_matrix(A), as_matrix(B), as_matrix(X)
    block = np.block([[A, X], [adj(X), B]])
    if not is_psd(block, tol)[0]:
        return True
    return loewner_leq(X, geometric_mean(A, B, cfg, tol), tol)[0]
