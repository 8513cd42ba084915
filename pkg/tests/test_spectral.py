import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from symmod.matcore import is_psd, is_unitary
from symmod.sampler import ginibre, haar_unitary
from symmod.spectral import (
    FROBENIUS,
    OPERATOR,
    TRACE,
    NormKind,
    SpectrumDesc,
    conjugate,
    kyfan,
    loewner_leq,
    norm_test_set,
    orbit_dominance,
    schatten,
    sym_norm,
    weak_log_majorizes,
    weak_majorizes,
    weyl_triple_check,
)

from conftest import rand_psd


def test_spectrum_zero_padding():
    s = SpectrumDesc(np.array([1.0, 3.0, 2.0]))
    assert list(s.values) == [3.0, 2.0, 1.0]
    assert s(1) == 3.0 and s(3) == 1.0 and s(4) == 0.0 and s(100) == 0.0
    with pytest.raises(IndexError):
        s(0)


def test_loewner_examples(rng):
    P = rand_psd(rng, 3)
    assert loewner_leq(np.zeros((3, 3)), P)[0]
    ok, margin = loewner_leq(np.diag([2.0, 0.0]), np.diag([1.0, 1.0]))
    assert not ok
    assert margin == pytest.approx(-1.0 / 1.0)
    assert loewner_leq(P, P) == (True, pytest.approx(0.0, abs=1e-15))


def test_weyl_triple():
    I = np.eye(4)
    assert weyl_triple_check(I, I, I)
    x = np.array([[1.0], [2.0], [0.0]])
    R = x @ x.T
    assert weyl_triple_check(R, R, R)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 9))
def test_weyl_triple_random_against_full_spectra(seed, n):
    rng = np.random.default_rng(seed)
    A, B, C = (rand_psd(rng, n) for _ in range(3))
    assert weyl_triple_check(A, B, C)
    # brute force over every in-range index pair, not just the diagonal family
    tot = SpectrumDesc.of_hermitian(A + B + C)
    sa, sb, sc = (SpectrumDesc.of_hermitian(M) for M in (A, B, C))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                if i + j + k - 2 <= n:
                    assert tot(i + j + k - 2) <= sa(i) + sb(j) + sc(k) + 1e-9 * max(1, tot(1))


def test_norms_of_diagonal():
    D = np.diag([3.0, 1.0])
    assert sym_norm(D, OPERATOR) == 3
    assert sym_norm(D, TRACE) == 4
    assert sym_norm(D, FROBENIUS) == pytest.approx(np.sqrt(10))
    assert sym_norm(D, kyfan(1)) == 3


@pytest.mark.parametrize("p", [1, 2, 3, 7.5])
def test_schatten_of_unitary(rng, p):
    U = haar_unitary(rng, 5)
    assert sym_norm(U, schatten(p)) == pytest.approx(5 ** (1 / p))


def test_kyfan_n_is_trace(rng):
    M = ginibre(rng, 6)
    assert sym_norm(M, kyfan(6)) == pytest.approx(sym_norm(M, TRACE), rel=1e-12)


@pytest.mark.parametrize("tag,param", [("schatten", 0.5), ("kyfan", 0), ("spectral", None)])
def test_invalid_norms(tag, param):
    with pytest.raises(ValueError):
        NormKind(tag, param)
    with pytest.raises(ValueError):
        sym_norm(np.eye(2), kyfan(3))


def test_majorization_examples():
    a, b = np.array([2.0, 0.0]), np.array([1.0, 1.0])
    assert weak_majorizes(a, b)
    # a zero on the majorizing side against a nonzero value: partial product 0 < 1
    assert not weak_log_majorizes(a, b)
    assert weak_majorizes(a, a) and weak_log_majorizes(a, a)
    with pytest.raises(ValueError):
        weak_log_majorizes(np.array([1.0, -1.0]), b)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.01, 100), min_size=1, max_size=6),
       st.lists(st.floats(0.01, 100), min_size=1, max_size=6))
def test_log_majorization_implies_majorization(a, b):
    if weak_log_majorizes(np.array(a), np.array(b)):
        assert weak_majorizes(np.array(a), np.array(b))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_fan_dominance(seed, n):
    rng = np.random.default_rng(seed)
    A = ginibre(rng, n)
    B = ginibre(rng, n) * rng.uniform(0, 1)
    sa, sb = SpectrumDesc.of_singular(A), SpectrumDesc.of_singular(B)
    if weak_majorizes(sa, sb):
        for k in norm_test_set(n):
            assert sym_norm(B, k) <= sym_norm(A, k) * (1 + 1e-12)


def test_orbit_dominance_examples(rng):
    ok, V = orbit_dominance(np.diag([1.0, -5.0]), np.diag([1.0, 0.0]))
    assert ok
    assert_allclose(np.abs(V), np.eye(2), atol=1e-15)
    ok, V = orbit_dominance(np.diag([2.0, 0.0]), np.diag([1.0, 1.0]))
    assert not ok and V is None


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7))
def test_orbit_dominance_contraction_compression(seed, n):
    rng = np.random.default_rng(seed)
    K = (haar_unitary(rng, n) * rng.uniform(0, 1, n)) @ haar_unitary(rng, n)
    C = rand_psd(rng, n)
    X = K @ C @ K.conj().T
    # spectral oracle: s_j(K C^{1/2}) <= s_j(C^{1/2})
    assert np.all(np.linalg.eigvalsh(X)[::-1] <= np.linalg.eigvalsh(C)[::-1] + 1e-9 * np.linalg.norm(C, 2))
    ok, V = orbit_dominance(X, C)
    assert ok and is_unitary(V)
    assert is_psd(conjugate(V, C) - X)[1] >= -1e-8


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_orbit_dominance_completeness_by_haar_probes(seed, n):
    rng = np.random.default_rng(seed)
    G = ginibre(rng, n)
    X = (G + G.conj().T) / 2 + np.eye(n)
    E = rand_psd(rng, n) * 0.3
    ok, _ = orbit_dominance(X, E)
    if ok:
        return
    for _ in range(500):
        V = haar_unitary(rng, n)
        assert not is_psd(conjugate(V, E) - X)[0]
