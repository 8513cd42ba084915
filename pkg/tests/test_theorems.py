import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symmod import theorems as th
from symmod.matcore import MatrixError, Tolerance
from symmod.probe import frobenius_bound
from symmod.sampler import EnsembleSpec, ginibre, sample, seed_stream

from conftest import NILPOTENT, rand_psd

SQRT2 = np.sqrt(2)


def general_batch(seed, n, m):
    return [ginibre(np.random.default_rng(seed_stream(seed, k)), n) for k in range(m)]


def ph_batch(seed, n, m, base="involution"):
    return sample(EnsembleSpec("split", n, seed, m=m, base=base))


def test_digest_is_stable_and_sensitive():
    A = np.eye(2)
    assert th.digest([A]) == th.digest([A.copy()])
    assert th.digest([A]) != th.digest([2 * A])
    assert th.digest([A]) != th.digest([np.eye(3)])
    assert len(th.digest([A])) == 16


def test_nilpotent_reports():
    rep = th.verify_thm_2_1([NILPOTENT])
    assert rep.passed and rep.kind == "margin"
    assert rep.extras["beta_margins"][0.5] == pytest.approx(0.0, abs=1e-15)
    assert th.verify_cor_2_2([NILPOTENT]).passed
    assert th.verify_cor_2_3([NILPOTENT]).passed
    # |Z|_sym = I/2 on both sides
    assert th.verify_cor_2_4([NILPOTENT]).value == pytest.approx(1.0)
    assert th.verify_cor_2_5([NILPOTENT]).value == pytest.approx(1.0)


def test_zero_inputs():
    Z = np.zeros((3, 3))
    for fn in (th.verify_thm_2_1, th.verify_cor_2_2, th.verify_cor_2_3):
        assert fn([Z, Z]).value == pytest.approx(0.0, abs=1e-15)
    assert th.verify_cor_2_4([Z, Z]).value == 0.0
    assert th.verify_cor_2_5([Z, Z]).value == 0.0
    assert th.verify_eqc2([Z, Z]).value == 0.0


def test_empty_and_mismatched_batches():
    with pytest.raises(MatrixError):
        th.verify_thm_2_1([])
    with pytest.raises(MatrixError):
        th.verify_cor_2_5([np.eye(2), np.eye(3)])


def test_single_hermitian_unitary_cor_3_6():
    H = sample(EnsembleSpec("hermitian_unitary", 5, 3))
    rep = th.verify_cor_3_6([H])
    assert rep.value == pytest.approx(0.0, abs=1e-12)
    assert rep.passed and rep.extras["checked_indices"] == 3
    with pytest.raises(MatrixError):
        th.verify_cor_3_6([np.diag([1.0, 2.0])])


def test_eqc2_single_matrix_is_tight():
    A = ginibre(np.random.default_rng(0), 4)
    rep = th.verify_eqc2([A])
    assert frobenius_bound(1) == 1.0
    assert rep.value == pytest.approx(1.0, rel=1e-12) and rep.passed


def test_cor_2_4_and_2_5_agree_on_top_eigenvalue():
    for seed in range(20):
        Xs = general_batch(seed, 4, 3)
        r24 = th.verify_cor_2_4(Xs)
        r25 = th.verify_cor_2_5(Xs)
        assert r24.extras["index_ratios"][0] == pytest.approx(r25.extras["norm_ratios"]["kyfan(1)"], rel=1e-12)


def test_tolerance_monotonicity():
    # a ratio just above the bound fails at tight tolerance and passes at a loose one
    A = np.diag([1.0, 0.0])
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    tight = th.verify_opnorm_triangle_failure(A, B, Tolerance(1e-12))
    loose = th.verify_opnorm_triangle_failure(A, B, Tolerance(1.0))
    assert tight.value == loose.value
    assert not loose.passed
    rep = th._ratio_report("x", [A], 1.0 + 1e-6, 1.0, Tolerance(1e-8))
    assert not rep.passed
    assert th._ratio_report("x", [A], 1.0 + 1e-6, 1.0, Tolerance(1e-5)).passed
    assert not th._margin_report("x", [A], -1e-6, Tolerance(1e-8)).passed
    assert th._margin_report("x", [A], -1e-6, Tolerance(1e-5)).passed


def test_normality_required():
    with pytest.raises(MatrixError):
        th.verify_cor_4_2(NILPOTENT, np.eye(2))
    with pytest.raises(MatrixError):
        th.verify_eq_schur(np.eye(2), NILPOTENT)


def test_polar_hermitian_required():
    Z = np.diag([1.0, 1j])
    for fn in (th.verify_cor_3_5, th.verify_cor_3_7, th.verify_cor_6_3):
        with pytest.raises(MatrixError):
            fn([Z])
    with pytest.raises(MatrixError):
        th.verify_thm_3_4([Z])


def test_cor_4_2_psd_inputs_give_equality(rng):
    P, Q = rand_psd(rng, 3), rand_psd(rng, 3)
    rep = th.verify_cor_4_2(P, Q)
    assert rep.passed and rep.extras["feasible"] and rep.extras["min_c"] == 0.0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), m=st.integers(1, 4))
def test_general_suite_passes(seed, n, m):
    Xs = general_batch(seed, n, m)
    for fn in (th.verify_thm_2_1, th.verify_cor_2_2, th.verify_cor_2_3):
        assert fn(Xs).passed
    for fn in (th.verify_cor_2_4, th.verify_cor_2_5):
        rep = fn(Xs)
        assert rep.passed and rep.value <= SQRT2 + 1e-8
    assert th.verify_eqc2(Xs).passed


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), m=st.integers(1, 4),
       base=st.sampled_from(["polar_hermitian", "involution", "hermitian_unitary"]))
def test_polar_hermitian_suite_passes(seed, n, m, base):
    Xs = ph_batch(seed, n, m, base)
    for fn in (th.verify_thm_3_4, th.verify_cor_3_5, th.verify_cor_3_7,
               th.verify_cor_6_3, th.verify_thm_6_2):
        rep = fn(Xs)
        assert rep.passed, (rep.statement_id, rep.value)
    if base == "hermitian_unitary":
        assert th.verify_cor_3_6(Xs).passed


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_pair_statements_pass(seed, n):
    rng = np.random.default_rng(seed)
    A, B = ginibre(rng, n), ginibre(rng, n)
    assert th.verify_proof_blocks(A, B).passed
    assert th.verify_cor_1_2_1_4(A).passed
    rep = th.verify_cor_5_1(A, B, budget=2000)
    assert rep.passed and rep.extras["necessary_weyl"]
    N1 = sample(EnsembleSpec("normal", n, seed))
    N2 = sample(EnsembleSpec("normal", n, seed + 7))
    for fn in (th.verify_cor_4_2, th.verify_eq_schur):
        rep = fn(N1, N2)
        assert rep.passed and rep.extras["eigen_check"]


def test_question_probe_is_a_measurement():
    Xs = ph_batch(5, 5, 3, "hermitian_unitary")
    rep = th.verify_question_6_4_probe(Xs)
    assert rep.kind == "measurement" and rep.passed
    assert rep.extras["index"] == 3
    assert rep.extras["expansive"]
    assert rep.extras["lam_sym"] >= 1 - 1e-8
