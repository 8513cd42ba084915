import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from symmod.matcore import ConvergenceError, MatrixError, eigvals_hermitian, psd_sqrt
from symmod.means import GeoMeanConfig, geometric_mean, max_property_holds
from symmod.sampler import haar_unitary
from symmod.spectral import loewner_leq

from conftest import rand_psd


def test_idempotent_and_identity(rng):
    A = rand_psd(rng, 4)
    assert_allclose(geometric_mean(A, A), A, atol=1e-9)
    B = rand_psd(rng, 4)
    assert_allclose(geometric_mean(np.eye(4), B), psd_sqrt(B), atol=1e-9)


def test_riccati_and_determinant(rng):
    A, B = rand_psd(rng, 5), rand_psd(rng, 5)
    G = geometric_mean(A, B)
    # G is the unique PSD solution of G A^{-1} G = B
    assert_allclose(G @ np.linalg.solve(A, G), B, atol=1e-8)
    det = np.linalg.det(G).real
    assert det == pytest.approx(np.sqrt(np.linalg.det(A).real * np.linalg.det(B).real), rel=1e-6)
    assert_allclose(geometric_mean(B, A), G, atol=1e-8)


def test_singular_inputs_regularize():
    P = np.diag([1.0, 0.0])
    assert_allclose(geometric_mean(P, P), P, atol=1e-6)
    # orthogonal supports: the mean vanishes, convergence is only sqrt(eps)
    G = geometric_mean(P, np.diag([0.0, 1.0]))
    assert np.linalg.norm(G, 2) < 1e-3
    with pytest.raises(ConvergenceError):
        geometric_mean(P, np.diag([0.0, 1.0]), GeoMeanConfig(convergence_tol=1e-6))


def test_invalid_inputs():
    with pytest.raises(MatrixError):
        geometric_mean(np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(ValueError):
        GeoMeanConfig(eps_seq=(1e-6, 1e-4))


def test_max_property_examples(rng):
    A = rand_psd(rng, 3)
    assert max_property_holds(A, A, A)
    assert max_property_holds(A, rand_psd(rng, 3), np.zeros((3, 3)))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_mean_properties(seed, n):
    rng = np.random.default_rng(seed)
    A, B = rand_psd(rng, n), rand_psd(rng, n)
    G = geometric_mean(A, B)
    U = haar_unitary(rng, n)
    conj = lambda M: U @ M @ U.conj().T  # noqa: E731
    assert_allclose(conj(G), geometric_mean(conj(A), conj(B)), atol=1e-8 * max(1, np.linalg.norm(G, 2)))
    assert loewner_leq(G, (A + B) / 2)[0]
    bigger = A + rand_psd(rng, n)
    assert np.all(eigvals_hermitian(G) <= eigvals_hermitian(geometric_mean(bigger, B)) + 1e-8)
    # a Hermitian X with PSD block [[A, X], [X, B]]: X = G itself, and 0.9 G
    assert max_property_holds(A, B, G) and max_property_holds(A, B, 0.9 * G)
