"""Random matrix ensembles and deterministic seed derivation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import adj, hermitian_part, opnorm

KINDS = (
    "ginibre",
    "haar_unitary",
    "psd",
    "hermitian",
    "normal",
    "contraction",
    "involution",
    "hermitian_unitary",
    "polar_hermitian",
    "split",
)

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # bijective 64-bit finalizer
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def seed_stream(root_seed: int, trial_index: int) -> int:
    """Per-trial 64-bit seed; injective in ``trial_index`` for a fixed root."""
    if trial_index < 0:
        raise ValueError("trial_index must be nonnegative")
    base = _splitmix64(int(root_seed) & _MASK)
    return _splitmix64((base + int(trial_index)) & _MASK)


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    dim: int
    seed: int = 0
    scale: float = 1.0
    m: int = 1
    # ensemble of the target matrix that ``split`` decomposes
    base: str = "ginibre"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.kind == "split" and self.base not in KINDS[:-1]:
            raise ValueError(f"cannot split ensemble {self.base!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(rng, n))
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def _hermitian_unitary(rng, n):
    Q = haar_unitary(rng, n)
    signs = rng.choice([-1.0, 1.0], size=n)
    return hermitian_part((Q * signs) @ adj(Q))


def _involution(rng, n):
    P = ginibre(rng, n) + 2 * np.eye(n)
    signs = rng.choice([-1.0, 1.0], size=n)
    S = (P * signs) @ np.linalg.inv(P)
    # one Newton-Schulz-type clean-up step keeps S^2 = I tight
    return 1.5 * S - 0.5 * S @ S @ S


def _draw(kind: str, rng: np.random.Generator, n: int) -> np.ndarray:
    if kind == "ginibre":
        return ginibre(rng, n)
    if kind == "haar_unitary":
        return haar_unitary(rng, n)
    if kind == "psd":
        G = ginibre(rng, n)
        return hermitian_part(adj(G) @ G)
    if kind == "hermitian":
        return hermitian_part(ginibre(rng, n))
    if kind == "normal":
        U = haar_unitary(rng, n)
        d = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        return (U * d) @ adj(U)
    if kind == "contraction":
        return (haar_unitary(rng, n) * rng.uniform(0.0, 1.0, n)) @ adj(haar_unitary(rng, n))
    if kind == "involution":
        return _involution(rng, n)
    if kind == "hermitian_unitary":
        return _hermitian_unitary(rng, n)
    if kind == "polar_hermitian":
        theta = rng.uniform(0.0, 2 * np.pi)
        G = ginibre(rng, n)
        return np.exp(1j * theta) * _hermitian_unitary(rng, n) @ hermitian_part(adj(G) @ G)
    raise ValueError(f"unknown ensemble {kind!r}")


_UNSCALED = ("haar_unitary", "involution", "hermitian_unitary", "contraction")


def split(rng: np.random.Generator, S: np.ndarray, m: int) -> list[np.ndarray]:
    """``m`` summands of ``S``: ``m - 1`` Ginibre pieces scaled to ``||S||/m`` plus the remainder."""
    n = S.shape[0]
    size = opnorm(S) / m
    parts = []
    for _ in range(m - 1):
        G = ginibre(rng, n)
        parts.append(G * (size / max(opnorm(G), 1e-300)))
    parts.append(S - sum(parts, np.zeros_like(S)))
    return parts


def sample(spec: EnsembleSpec) -> np.ndarray | list[np.ndarray]:
    """Draw one sample. ``split`` returns a list of summands, every other kind a matrix.

    ``scale`` multiplies the result except for the ensembles whose structure
    fixes the norm (unitaries, involutions, contractions).
    """
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "split":
        S = _draw(spec.base, rng, spec.dim)
        if spec.base not in _UNSCALED:
            S = spec.scale * S
        return split(rng, S, spec.m)
    M = _draw(spec.kind, rng, spec.dim)
    if spec.kind not in _UNSCALED:
        M = spec.scale * M
    return M
