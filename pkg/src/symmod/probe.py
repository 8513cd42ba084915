"""Sharpness and counterexample search over small matrix tuples.

Objectives are degree-0 homogeneous ratios; the optimizer is a
derivative-free (1+1) evolution strategy with step-size adaptation and
random restarts, deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .matcore import (
    DEFAULT_TOL,
    MatrixError,
    Tolerance,
    adj,
    eigvals_hermitian,
    hermitian_part,
    is_normal,
    psd_margin,
)
from .moduli import abs_right, sym_modulus
from .sampler import haar_unitary, seed_stream
from .spectral import SpectrumDesc, conjugate, norm_test_set, sym_norm

TARGETS = (
    "opnorm-triangle-failure-m2",
    "cor25-best-constant",
    "quarter-sharpness-m3",
    "frobenius-constant",
    "cor24-best-constant",
)


def feasibility_min_c(A, B, tol: Tolerance = DEFAULT_TOL, check_normal: bool = True) -> float:
    """Smallest ``c >= 0`` with ``|A+B| <= |A| + |B| + c V(|A|+|B|)V*`` for some unitary ``V``.

    By orbit dominance this is ``max_j lam_j(D) / lam_j(P)`` over the indices
    where ``lam_j(D) > 0``, with ``D = |A+B| - |A| - |B|`` and ``P = |A| + |B|``.
    """
    A, B = np.asarray(A, dtype=complex), np.asarray(B, dtype=complex)
    if check_normal and not (is_normal(A, tol) and is_normal(B, tol)):
        raise MatrixError("feasibility_min_c needs normal matrices")
    aA, aB = abs_right(A), abs_right(B)
    P = aA + aB
    d = eigvals_hermitian(abs_right(A + B) - P)
    p = eigvals_hermitian(P)
    scale = max(1.0, p[0])
    pos = d > tol.abs_floor * scale
    if not np.any(pos):
        return 0.0
    if np.any(p[pos] <= tol.abs_floor * scale):
        return float("inf")
    return float(np.max(d[pos] / p[pos]))


# -- parameterizations -------------------------------------------------------

def _unpack(x: np.ndarray, count: int, n: int) -> list[np.ndarray]:
    k = n * n
    return [(x[2 * i * k:(2 * i + 1) * k] + 1j * x[(2 * i + 1) * k:(2 * i + 2) * k]).reshape(n, n)
            for i in range(count)]


def _pack(mats: list[np.ndarray]) -> np.ndarray:
    return np.concatenate([np.concatenate([M.real.ravel(), M.imag.ravel()]) for M in mats])


def _hermitian_contraction(M: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(hermitian_part(M))
    return (Q * np.clip(w, -1.0, 1.0)) @ adj(Q)


def _safe_ratio(num: float, den: float) -> float:
    if den <= 1e-300:
        return 0.0 if num <= 1e-300 else float("inf")
    return num / den


def opnorm_triangle_ratio(A, B) -> float:
    """``|| |A+B|_sym || / (|| |A|_sym || + || |B|_sym ||)`` in the operator norm."""
    top = eigvals_hermitian(sym_modulus(A + B))[0]
    return _safe_ratio(top, eigvals_hermitian(sym_modulus(A))[0] + eigvals_hermitian(sym_modulus(B))[0])


def cor25_ratio(mats: list[np.ndarray]) -> float:
    S = sum(mats)
    lhs = sym_modulus(S)
    rhs = sum(sym_modulus(X) for X in mats)
    return max(_safe_ratio(sym_norm(lhs, k), sym_norm(rhs, k)) for k in norm_test_set(S.shape[0]))


def cor24_ratio(mats: list[np.ndarray]) -> float:
    S = sum(mats)
    lhs = SpectrumDesc.of_hermitian(sym_modulus(S))
    rhs = SpectrumDesc.of_hermitian(sum(sym_modulus(X) for X in mats))
    n = lhs.dim
    return max(_safe_ratio(lhs(1 + 3 * j), rhs(1 + j)) for j in range((n - 1) // 3 + 1))


def frobenius_ratio(mats: list[np.ndarray]) -> float:
    num = np.linalg.norm(sum(mats))
    return _safe_ratio(float(num), float(np.linalg.norm(sum(abs_right(A) for A in mats))))


def frobenius_bound(m: int) -> float:
    return float(np.sqrt((1 + np.sqrt(m)) / 2))


@dataclass(frozen=True)
class SearchTarget:
    id: str
    dim: int
    m: int = 2

    def __post_init__(self):
        if self.id not in TARGETS:
            raise ValueError(f"unknown search target {self.id!r}")
        if self.id == "opnorm-triangle-failure-m2" and self.dim != 2:
            raise ValueError("opnorm-triangle-failure-m2 lives in M_2")
        if self.id == "quarter-sharpness-m3" and self.dim != 3:
            raise ValueError("quarter-sharpness-m3 lives in M_3")
        if self.dim < 1 or self.m < 1:
            raise ValueError("dim and m must be positive")

    @property
    def count(self) -> int:
        return 2 if self.id in ("opnorm-triangle-failure-m2", "quarter-sharpness-m3") else self.m

    @property
    def objective(self) -> str:
        return {
            "opnorm-triangle-failure-m2": "|| |A+B|_sym ||_op / (|| |A|_sym ||_op + || |B|_sym ||_op)",
            "cor25-best-constant": "max over test norms of || |sum X|_sym || / || sum |X_k|_sym ||",
            "quarter-sharpness-m3": "minimal feasible c for Hermitian contractions A, B",
            "frobenius-constant": "|| sum A_k ||_F / || sum |A_k| ||_F",
            "cor24-best-constant": "max_j lam_{1+3j}(|sum X|_sym) / lam_{1+j}(sum |X_k|_sym)",
        }[self.id]

    def project(self, mats: list[np.ndarray]) -> list[np.ndarray]:
        if self.id == "quarter-sharpness-m3":
            return [_hermitian_contraction(M) for M in mats]
        return mats

    def evaluate(self, mats: list[np.ndarray]) -> float:
        if self.id == "opnorm-triangle-failure-m2":
            return opnorm_triangle_ratio(*mats)
        if self.id == "cor25-best-constant":
            return cor25_ratio(mats)
        if self.id == "quarter-sharpness-m3":
            return feasibility_min_c(*mats, check_normal=False)
        if self.id == "frobenius-constant":
            return frobenius_ratio(mats)
        return cor24_ratio(mats)

    @property
    def homogeneous_params(self) -> bool:
        # clipping to contractions breaks scale invariance of the parameters
        return self.id != "quarter-sharpness-m3"


@dataclass
class SearchResult:
    target: SearchTarget
    best_value: float
    argmax: list[np.ndarray]
    restart_trace: list[float] = field(default_factory=list)
    budget_used: int = 0
    seed: int = 0


def _restart_count(budget: int) -> int:
    return int(max(1, min(20, budget // 2500)))


def search(target: SearchTarget, budget: int, seed: int = 0) -> SearchResult:
    """Maximize ``target.evaluate`` with at most ``budget`` objective evaluations."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    restarts = _restart_count(budget)
    shares = [budget // restarts + (1 if r < budget % restarts else 0) for r in range(restarts)]
    n, count = target.dim, target.count
    best_val, best_mats, trace, used = -np.inf, None, [], 0

    def value_of(x):
        mats = target.project(_unpack(x, count, n))
        v = target.evaluate(mats)
        return (v if np.isfinite(v) else -np.inf), mats

    for r, share in enumerate(shares):
        rng = np.random.default_rng(seed_stream(seed, r))
        x = rng.standard_normal(2 * count * n * n)
        if target.homogeneous_params:
            x /= np.linalg.norm(x)
        fx, mats = value_of(x)
        x = _pack(mats)
        evals = 1
        sigma = 0.3 if target.homogeneous_params else 0.3 * np.linalg.norm(x) / np.sqrt(x.size)
        stall = 0
        while evals < share:
            y = x + sigma * rng.standard_normal(x.size)
            if target.homogeneous_params:
                y /= np.linalg.norm(y)
            fy, ymats = value_of(y)
            evals += 1
            if fy >= fx:
                x, fx, mats = _pack(ymats), fy, ymats
                if target.homogeneous_params:
                    x /= np.linalg.norm(x)
                sigma *= 1.5
                stall = 0
            else:
                sigma *= 1.5 ** -0.25
                stall += 1
            if sigma < 1e-9 or stall > 400:
                # local kick without leaving the basin entirely
                sigma = 0.05
                stall = 0
        used += evals
        trace.append(float(fx))
        if fx > best_val:
            best_val, best_mats = fx, [M.copy() for M in mats]

    best_val = target.evaluate(best_mats)
    return SearchResult(target, float(best_val), best_mats, trace, used, seed)


# -- two-orbit feasibility ---------------------------------------------------

def _herm_from_params(p: np.ndarray, n: int) -> np.ndarray:
    H = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    k = len(iu[0])
    H[np.diag_indices(n)] = p[:n]
    H[iu] = p[n:n + k] + 1j * p[n + k:n + 2 * k]
    return H + np.triu(H, 1).conj().T


@dataclass
class TwoOrbitResult:
    margin: float
    U: np.ndarray
    V: np.ndarray
    evaluations: int
    restarts_used: int


def two_orbit_feasibility(C, P, Q, budget: int = 20000, restarts: int = 20, seed: int = 0,
                          start: tuple[np.ndarray, np.ndarray] | None = None,
                          stop_at: float = 0.0) -> TwoOrbitResult:
    """Search unitaries ``U, V`` maximizing the scaled ``lam_min(C - U P U* - V Q V*)``.

    ``U = exp(i H1) U_0`` and ``V = exp(i H2) V_0`` with Hermitian parameters;
    each restart runs finite-difference L-BFGS from its base point. Stops as
    soon as the margin reaches ``stop_at``.
    """
    n = C.shape[0]
    d = n * n
    bases = []
    if start is not None:
        bases.append(start)
    for r in range(restarts):
        rng = np.random.default_rng(seed_stream(seed, r))
        bases.append((haar_unitary(rng, n), haar_unitary(rng, n)))

    best = None
    evals = 0
    per = max(1, budget // len(bases))

    class _Done(Exception):
        pass

    for used, (U0, V0) in enumerate(bases, start=1):
        def unitaries(p):
            return (expm(1j * _herm_from_params(p[:d], n)) @ U0,
                    expm(1j * _herm_from_params(p[d:], n)) @ V0)

        def neg_margin(p):
            nonlocal evals, best
            evals += 1
            U, V = unitaries(p)
            m = psd_margin(C - conjugate(U, P) - conjugate(V, Q))
            if best is None or m > best.margin:
                best = TwoOrbitResult(m, U, V, evals, used)
            if m >= stop_at:
                raise _Done
            if evals >= budget:
                raise _Done
            return -m

        try:
            minimize(neg_margin, np.zeros(2 * d), method="L-BFGS-B",
                     options={"maxfun": per, "maxiter": per})
        except _Done:
            break
        if evals >= budget:
            break
    best.evaluations = evals
    return best
