"""Right, left, symmetric and quadratic symmetric moduli, Cartesian parts."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .matcore import adj, as_matrix, hermitian_part, psd_sqrt, svd


class ModulusKind(str, Enum):
    RIGHT = "right"
    LEFT = "left"
    SYM = "sym"
    QSYM = "qsym"


def abs_right(Z) -> np.ndarray:
    """``|Z| = (Z*Z)^{1/2}``."""
    _, s, W = svd(Z)
    return hermitian_part((W * s) @ adj(W))


def abs_left(Z) -> np.ndarray:
    """``|Z*| = (ZZ*)^{1/2}``."""
    U, s, _ = svd(Z)
    return hermitian_part((U * s) @ adj(U))


def sym_modulus(Z) -> np.ndarray:
    U, s, W = svd(Z)
    return hermitian_part(((W * s) @ adj(W) + (U * s) @ adj(U)) / 2)


def qsym_modulus(Z) -> np.ndarray:
    Z = as_matrix(Z)
    # built from Z*Z and ZZ* directly rather than squaring computed moduli
    return psd_sqrt(hermitian_part(adj(Z) @ Z + Z @ adj(Z)) / 2)


def modulus(Z, kind: ModulusKind | str) -> np.ndarray:
    kind = ModulusKind(kind)
    return {
        ModulusKind.RIGHT: abs_right,
        ModulusKind.LEFT: abs_left,
        ModulusKind.SYM: sym_modulus,
        ModulusKind.QSYM: qsym_modulus,
    }[kind](Z)


def re_part(Z) -> np.ndarray:
    Z = as_matrix(Z)
    return (Z + adj(Z)) / 2


def im_part(Z) -> np.ndarray:
    Z = as_matrix(Z)
    return (Z - adj(Z)) / 2j
