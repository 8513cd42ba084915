"""Explicit unitaries realizing the orbit-type triangle inequalities.

Each builder returns the witnesses together with the PSD margin of the
inequality they certify, so callers never have to trust the construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .matcore import (
    DEFAULT_TOL,
    MatrixError,
    Tolerance,
    adj,
    as_matrix,
    hermitian_part,
    is_contraction,
    opnorm,
    polar,
    psd_fun,
    psd_margin,
    psd_sqrt,
)
from .means import GeoMeanConfig, geometric_mean
from .moduli import abs_left, abs_right, qsym_modulus, sym_modulus
from .spectral import conjugate, loewner_leq, orbit_dominance


class WitnessError(RuntimeError):
    """A construction failed where the mathematics says it cannot."""


@dataclass
class OrbitBound:
    """``lhs <= sum coeff_i W_i core_i W_i*`` together with its scaled margin."""

    lhs: np.ndarray
    terms: list[tuple[float, np.ndarray, np.ndarray]]
    margin: float = field(init=False)

    def __post_init__(self):
        self.margin = psd_margin(self.rhs() - self.lhs)

    def rhs(self) -> np.ndarray:
        out = np.zeros_like(self.lhs, dtype=complex)
        for coeff, W, core in self.terms:
            out = out + coeff * conjugate(W, core)
        return out

    @property
    def unitaries(self) -> list[np.ndarray]:
        return [W for _, W, _ in self.terms]


@dataclass(frozen=True)
class PolarHermitianCert:
    is_ph: bool
    theta: float
    W: np.ndarray | None
    residual: float
    unique: bool = True


def _stack(Xs: Sequence) -> list[np.ndarray]:
    mats = [as_matrix(X) for X in Xs]
    if not mats:
        raise MatrixError("need at least one matrix")
    n = mats[0].shape
    if any(M.shape != n for M in mats):
        raise MatrixError("all summands must have the same dimension")
    return mats


def sum_sym_moduli(Xs: Sequence) -> np.ndarray:
    return sum(sym_modulus(X) for X in _stack(Xs))


@dataclass
class MainWitness:
    """Unitary ``V`` of the summed polar decomposition and the sums it acts on."""

    V: np.ndarray
    lhs: np.ndarray
    sym_sum: np.ndarray
    right_sum: np.ndarray
    left_sum: np.ndarray

    def rhs(self, beta: float) -> np.ndarray:
        if beta <= 0:
            raise ValueError("beta must be positive")
        twist = conjugate(self.V, self.right_sum) + conjugate(adj(self.V), self.left_sum)
        return beta * self.sym_sum + twist / (8 * beta)

    def margin(self, beta: float) -> float:
        return psd_margin(self.rhs(beta) - self.lhs)


def main_theorem_witness(Xs: Sequence, tol: Tolerance = DEFAULT_TOL) -> MainWitness:
    """One unitary, valid for every ``beta > 0``:

    ``|sum X_k|_sym <= beta sum |X_k|_sym + (V (sum|X_k|) V* + V* (sum|X_k*|) V) / (8 beta)``
    with ``V`` the polar unitary of ``sum X_k``.
    """
    mats = _stack(Xs)
    S = sum(mats)
    return MainWitness(
        V=polar(S, tol).unitary,
        lhs=sym_modulus(S),
        sym_sum=sum(sym_modulus(X) for X in mats),
        right_sum=sum(abs_right(X) for X in mats),
        left_sum=sum(abs_left(X) for X in mats),
    )


def proof_block_chain(X, Y, beta: float = 0.5,
                      tol: Tolerance = DEFAULT_TOL) -> list[tuple[str, np.ndarray, float]]:
    """Every block matrix of the two-summand argument, each with its PSD margin.

    Identity residuals (conjugated forms against their closed forms) are
    appended as ``(label, residual_matrix, -norm)`` entries so that a broken
    identity shows up as a negative margin as well.
    """
    X, Y = _stack([X, Y])
    n = X.shape[0]
    I = np.eye(n)
    Z = np.zeros((n, n))
    S = X + Y
    V = polar(S, tol).unitary
    aX, aXs, aY, aYs = abs_right(X), abs_left(X), abs_right(Y), abs_left(Y)
    R, L = aX + aY, aXs + aYs

    def blk(a, b, c, d):
        return np.block([[a, b], [c, d]])

    chain: list[tuple[str, np.ndarray]] = [
        ("polar-block X", blk(aX, adj(X), X, aXs)),
        ("polar-block X*", blk(aXs, X, adj(X), aX)),
        ("polar-block Y", blk(aY, adj(Y), Y, aYs)),
        ("polar-block Y*", blk(aYs, Y, adj(Y), aY)),
    ]
    first = blk(R, adj(S), S, L)
    second = blk(L, S, adj(S), R)
    chain += [("sum-block first", first), ("sum-block second", second)]

    D1 = blk(I, Z, Z, V)
    D2 = blk(I, Z, Z, adj(V))
    conj1 = adj(D1) @ first @ D1
    conj2 = adj(D2) @ second @ D2
    aS, aSs = abs_right(S), abs_left(S)
    closed1 = blk(R, aS, aS, conjugate(adj(V), L))
    closed2 = blk(L, aSs, aSs, conjugate(V, R))
    chain += [("conjugated first", conj1), ("conjugated second", conj2)]

    bigA = (closed1 + closed2) / 2
    half = blk(I, Z, Z, I / 2)
    bigB = half @ bigA @ half
    compress = np.vstack([np.sqrt(beta) * I, -I / np.sqrt(beta)])
    final = adj(compress) @ bigB @ compress
    chain += [("block A", bigA), ("block B", bigB), ("compressed difference", final)]

    out = [(label, M, psd_margin(hermitian_part(M))) for label, M in chain]
    for label, got, want in (("identity first", conj1, closed1),
                             ("identity second", conj2, closed2)):
        res = got - want
        out.append((label, res, -opnorm(res) / max(1.0, opnorm(want))))
    return out


def thompson_witness(A, B, tol: Tolerance = DEFAULT_TOL) -> OrbitBound:
    """Unitaries ``U, V`` with ``|A + B| <= U|A|U* + V|B|V*``.

    With ``W`` the polar unitary of ``A + B`` one has
    ``|A + B| = Re(W*A) + Re(W*B)``, and ``lam_j(Re(W*A)) <= s_j(A)``
    (Fan-Hoffman), so each real part is dominated by an orbit point of the
    corresponding modulus.
    """
    A, B = _stack([A, B])
    W = polar(A + B, tol).unitary
    terms = []
    for T in (A, B):
        core = abs_right(T)
        ok, U = orbit_dominance(hermitian_part(adj(W) @ T), core, tol)
        if not ok:
            raise WitnessError("Fan-Hoffman dominance failed; this indicates a numerical bug")
        terms.append((1.0, U, core))
    return OrbitBound(abs_right(A + B), terms)


def contraction_lift(K, C, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unitary ``U`` with ``K C K* <= U C U*`` for a contraction ``K`` and PSD ``C``."""
    K, C = as_matrix(K), as_matrix(C)
    if not is_contraction(K, tol):
        raise MatrixError("contraction_lift needs ||K|| <= 1")
    ok, U = orbit_dominance(conjugate(K, C), C, tol)
    if not ok:
        raise WitnessError("contraction failed to compress the spectrum")
    return U


def _compressed_thompson(bigA, bigB, cores, lhs, tol) -> OrbitBound:
    n = lhs.shape[0]
    big = thompson_witness(bigA, bigB, tol)
    terms = []
    for (_, U0, _), core in zip(big.terms, cores):
        K = U0[:n, :n]
        terms.append((1.0, contraction_lift(K, core, tol), core))
    return OrbitBound(lhs, terms)


def sqrt_sum_squares_witness(X, Y, tol: Tolerance = DEFAULT_TOL) -> OrbitBound:
    """``sqrt(X^2 + Y^2) <= U X U* + V Y V*`` for PSD ``X, Y``.

    Thompson's inequality for ``[[X, 0], [0, 0]]`` and ``[[0, 0], [Y, 0]]``,
    compressed to the top-left corner; the corner blocks of the ``2n``
    unitaries are contractions, lifted back to unitaries.
    """
    X, Y = _stack([X, Y])
    n = X.shape[0]
    Z = np.zeros((n, n))
    bigA = np.block([[X, Z], [Z, Z]])
    bigB = np.block([[Z, Z], [Y, Z]])
    lhs = psd_sqrt(hermitian_part(X @ X + Y @ Y), tol)
    return _compressed_thompson(bigA, bigB, [hermitian_part(X), hermitian_part(Y)], lhs, tol)


def zhang_witness(A, B, tol: Tolerance = DEFAULT_TOL) -> OrbitBound:
    """``|A+B|_qsym <= U |A|_qsym U* + V |B|_qsym V*``.

    Uses the column embeddings ``[[A, 0], [A*, 0]]`` whose right modulus is
    ``sqrt(2) |A|_qsym`` in the top-left corner.
    """
    A, B = _stack([A, B])
    n = A.shape[0]
    Z = np.zeros((n, n))
    bigA = np.block([[A, Z], [adj(A), Z]])
    bigB = np.block([[B, Z], [adj(B), Z]])
    cores = [qsym_modulus(A), qsym_modulus(B)]
    return _compressed_thompson(bigA, bigB, cores, qsym_modulus(A + B), tol)


def polar_hermitian_cert(S, tol: Tolerance = DEFAULT_TOL) -> PolarHermitianCert:
    """Decide whether the polar unitary of ``S`` is ``e^{i theta}`` times a Hermitian unitary.

    For singular ``S`` only the canonical completion is examined: a positive
    answer is then still a valid certificate, but a negative one is not, so
    :class:`MatrixError` is raised instead.
    """
    S = as_matrix(S)
    n = S.shape[0]
    parts = polar(S, tol)
    V = parts.unitary
    V2 = V @ V
    theta = float(np.angle(np.trace(V2) / n) / 2)
    if theta <= -np.pi / 2:
        theta += np.pi
    W = np.exp(-1j * theta) * V
    residual = max(opnorm(V2 - np.exp(2j * theta) * np.eye(n)), opnorm(W - adj(W)))
    is_ph = residual <= tol.rel
    if not parts.unique and not is_ph:
        raise MatrixError("singular matrix: polar factor is not unique, cannot refute")
    return PolarHermitianCert(is_ph, theta, hermitian_part(W) if is_ph else None,
                              residual, parts.unique)


@dataclass
class PolarHermitianWitness:
    W: np.ndarray
    theta: float
    lhs: np.ndarray
    sym_sum: np.ndarray
    # residual of V R V* + V* L V = 2 W M W, where the phase cancels
    phase_identity_residual: float

    def rhs(self, beta: float) -> np.ndarray:
        if beta <= 0:
            raise ValueError("beta must be positive")
        return beta * self.sym_sum + conjugate(self.W, self.sym_sum) / (4 * beta)

    def margin(self, beta: float) -> float:
        return psd_margin(self.rhs(beta) - self.lhs)


def polar_hermitian_witness(Xs: Sequence, tol: Tolerance = DEFAULT_TOL) -> PolarHermitianWitness:
    mats = _stack(Xs)
    S = sum(mats)
    cert = polar_hermitian_cert(S, tol)
    if not cert.is_ph:
        raise MatrixError("sum is not polar Hermitian")
    main = main_theorem_witness(mats, tol)
    M = main.sym_sum
    twist = conjugate(main.V, main.right_sum) + conjugate(adj(main.V), main.left_sum)
    resid = opnorm(twist - 2 * conjugate(cert.W, M)) / max(1.0, opnorm(M))
    return PolarHermitianWitness(cert.W, cert.theta, main.lhs, M, resid)


def geomean_witness(Xs: Sequence, cfg: GeoMeanConfig = GeoMeanConfig(),
                    tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Hermitian unitary ``W`` and the margin of ``|S|_sym <= M # (W M W)``, ``M = sum |X_k|_sym``."""
    ph = polar_hermitian_witness(Xs, tol)
    M = ph.sym_sum
    G = geometric_mean(M, conjugate(ph.W, M), cfg, tol)
    return ph.W, loewner_leq(ph.lhs, G, tol)[1]


def candidate_functional_witness(f: Callable[[np.ndarray], np.ndarray], A, B,
                                 tol: Tolerance = DEFAULT_TOL) -> OrbitBound:
    """Zhang unitaries reused for ``f(|A+B|_qsym) <= U f(|A|_qsym) U* + V f(|B|_qsym) V*``.

    Not guaranteed to certify anything; callers must check the margin.
    """
    base = zhang_witness(A, B, tol)
    (_, U, ca), (_, V, cb) = base.terms
    return OrbitBound(psd_fun(base.lhs, f, tol),
                      [(1.0, U, psd_fun(ca, f, tol)), (1.0, V, psd_fun(cb, f, tol))])
