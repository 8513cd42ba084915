"""Spectral comparisons: Loewner order, Weyl checks, symmetric norms,
weak (log-)majorization and single-orbit dominance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    DEFAULT_TOL,
    MatrixError,
    Tolerance,
    adj,
    as_matrix,
    eig_hermitian,
    eigvals_hermitian,
    hermitian_part,
    is_psd,
    singular_values,
)


@dataclass(frozen=True)
class SpectrumDesc:
    """Nonincreasing real spectrum with the convention ``lam_k = 0`` for ``k > n``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("spectrum must be one-dimensional")
        if np.any(np.diff(v) > 0):
            v = np.sort(v)[::-1]
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size

    def __call__(self, k: int) -> float:
        """1-based access, zero-padded past the dimension."""
        if k < 1:
            raise IndexError("spectral indices start at 1")
        return float(self.values[k - 1]) if k <= self.dim else 0.0

    def __len__(self) -> int:
        return self.dim

    @classmethod
    def of_hermitian(cls, H) -> "SpectrumDesc":
        return cls(eigvals_hermitian(H))

    @classmethod
    def of_singular(cls, Z) -> "SpectrumDesc":
        return cls(singular_values(Z))


def _spec(x) -> SpectrumDesc:
    return x if isinstance(x, SpectrumDesc) else SpectrumDesc(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class NormKind:
    tag: str
    param: float | int | None = None

    def __post_init__(self):
        if self.tag not in ("operator", "trace", "frobenius", "schatten", "kyfan"):
            raise ValueError(f"unknown norm {self.tag!r}")
        if self.tag == "schatten" and (self.param is None or self.param < 1):
            raise ValueError("schatten norm needs p >= 1")
        if self.tag == "kyfan" and (self.param is None or int(self.param) < 1):
            raise ValueError("Ky Fan norm needs k >= 1")

    @property
    def label(self) -> str:
        if self.param is None:
            return self.tag
        return f"{self.tag}({self.param:g})"


OPERATOR = NormKind("operator")
TRACE = NormKind("trace")
FROBENIUS = NormKind("frobenius")


def schatten(p: float) -> NormKind:
    return NormKind("schatten", p)


def kyfan(k: int) -> NormKind:
    return NormKind("kyfan", int(k))


def norm_test_set(n: int) -> list[NormKind]:
    """Operator, trace, Frobenius, Schatten-3 and every Ky Fan norm on ``M_n``.

    The Ky Fan family alone decides symmetric-norm inequalities (Fan dominance).
    """
    return [OPERATOR, TRACE, FROBENIUS, schatten(3)] + [kyfan(k) for k in range(1, n + 1)]


def sym_norm(M, kind: NormKind) -> float:
    s = singular_values(M)
    if kind.tag == "operator":
        return float(s[0])
    if kind.tag == "trace":
        return float(s.sum())
    if kind.tag == "frobenius":
        return float(np.sqrt(np.sum(s ** 2)))
    if kind.tag == "schatten":
        p = float(kind.param)
        top = s[0]
        if top == 0:
            return 0.0
        return float(top * np.sum((s / top) ** p) ** (1 / p))
    k = int(kind.param)
    if k > s.size:
        raise ValueError(f"Ky Fan k={k} exceeds dimension {s.size}")
    return float(s[:k].sum())


def loewner_leq(A, B, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, float]:
    """``A <= B`` in the Loewner order; margin is the scaled ``lam_min(B - A)``."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise MatrixError(f"dimension mismatch {A.shape} vs {B.shape}")
    return is_psd(B - A, tol)


def weyl_triple_check(A, B, C, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``lam_{1+3j}(A+B+C) <= lam_{1+j}(A) + lam_{1+j}(B) + lam_{1+j}(C)`` for all in-range ``j``."""
    total = SpectrumDesc.of_hermitian(as_matrix(A) + as_matrix(B) + as_matrix(C))
    parts = [SpectrumDesc.of_hermitian(X) for X in (A, B, C)]
    scale = max(1.0, abs(total(1)))
    n = total.dim
    for j in range((n - 1) // 3 + 1):
        rhs = sum(p(1 + j) for p in parts)
        if total(1 + 3 * j) > rhs + tol.rel * scale:
            return False
    return True


def weyl_pair_check(A, B, C, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``lam_{1+j+k}(C) <= lam_{1+j}(A) + lam_{1+k}(B)`` for all in-range ``j, k``."""
    c = SpectrumDesc.of_hermitian(C)
    a = SpectrumDesc.of_hermitian(A)
    b = SpectrumDesc.of_hermitian(B)
    n = c.dim
    scale = max(1.0, abs(c(1)), abs(a(1)) + abs(b(1)))
    for j in range(n):
        for k in range(n - j):
            if c(1 + j + k) > a(1 + j) + b(1 + k) + tol.rel * scale:
                return False
    return True


def weak_majorizes(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``b`` is weakly majorized by ``a``: every partial sum of ``b`` is at most that of ``a``."""
    a, b = _spec(a), _spec(b)
    n = max(a.dim, b.dim)
    av = np.array([a(k) for k in range(1, n + 1)])
    bv = np.array([b(k) for k in range(1, n + 1)])
    sa, sb = np.cumsum(av), np.cumsum(bv)
    slack = tol.rel * np.maximum(1.0, np.abs(sa))
    return bool(np.all(sb <= sa + slack))


def weak_log_majorizes(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Partial-product analogue of :func:`weak_majorizes` for nonnegative spectra.

    Values below ``tol.abs_floor`` are clamped to it before taking logs, so a
    zero on the majorizing side facing a nonzero value on the other side gives
    ``False``.
    """
    a, b = _spec(a), _spec(b)
    if np.any(a.values < -tol.abs_floor) or np.any(b.values < -tol.abs_floor):
        raise ValueError("log-majorization needs nonnegative spectra")
    n = max(a.dim, b.dim)
    av = np.array([a(k) for k in range(1, n + 1)])
    bv = np.array([b(k) for k in range(1, n + 1)])
    la = np.cumsum(np.log(np.maximum(av, tol.abs_floor)))
    lb = np.cumsum(np.log(np.maximum(bv, tol.abs_floor)))
    return bool(np.all(lb <= la + np.log1p(tol.rel)))


def orbit_dominance(X, E, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, np.ndarray | None]:
    """Find a unitary ``V`` with ``X <= V E V*``.

    Such a ``V`` exists iff ``lam_j(X) <= lam_j(E)`` for every ``j``; the
    witness maps the descending eigenbasis of ``E`` onto that of ``X``.
    """
    X, E = as_matrix(X), as_matrix(E)
    if X.shape != E.shape:
        raise MatrixError(f"dimension mismatch {X.shape} vs {E.shape}")
    lx, Qx = eig_hermitian(X)
    le, Qe = eig_hermitian(E)
    scale = max(1.0, np.max(np.abs(lx)), np.max(np.abs(le)))
    if np.any(lx > le + tol.rel * scale):
        return False, None
    return True, Qx @ adj(Qe)


def conjugate(V: np.ndarray, E: np.ndarray) -> np.ndarray:
    """``V E V*``, re-symmetrized."""
    return hermitian_part(V @ E @ adj(V))
