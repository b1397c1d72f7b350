import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from opcake import (
    HermitianMatrix,
    InputError,
    LoewnerMatrix,
    dlog_daleckii_krein,
    dlog_finite_difference,
    dlog_trace_identity,
    hs_inner,
)

from conftest import rand_hermitian, rand_pd


def test_loewner_structure():
    lam = np.array([0.5, 1.0, 4.0])
    lw = LoewnerMatrix.for_log(lam).entries
    assert_allclose(np.diag(lw), 1.0 / lam)
    assert_allclose(lw, lw.T)
    assert (lw > 0).all()
    assert lw[0, 2] == pytest.approx((math.log(0.5) - math.log(4.0)) / (0.5 - 4.0))


def test_loewner_near_degenerate_matches_log1p_oracle():
    # divided difference at (1, 1+d) is log1p(d)/d, stable via log1p
    for d in (1e-6, 1e-9, 1e-12, 0.0):
        lw = LoewnerMatrix.for_log(np.array([1.0, 1.0 + d])).entries
        expected = math.log1p(d) / d if d else 1.0
        assert lw[0, 1] == pytest.approx(expected, rel=1e-12)


def test_loewner_rejects_nonpositive():
    with pytest.raises(InputError):
        LoewnerMatrix.for_log(np.array([1.0, -1.0]))


def test_dlog_direction_equal_to_base():
    # log(B + tB) = log B + log(1+t) I, so the derivative is the identity
    b = rand_pd(4, seed=5)
    assert_allclose(dlog_daleckii_krein(b, b).entries, np.eye(4), atol=1e-12)


def test_dlog_commuting_diagonal():
    got = dlog_daleckii_krein(HermitianMatrix.diagonal([1.0, 2.0]), HermitianMatrix.diagonal([3.0, 5.0]))
    assert_allclose(got.entries, np.diag([3.0, 2.5]), atol=1e-14)


def test_dlog_offdiagonal_divided_difference():
    got = dlog_daleckii_krein(HermitianMatrix.diagonal([1.0, 2.0]), HermitianMatrix([[0.0, 1.0], [1.0, 0.0]]))
    expected = (math.log(2.0) - math.log(1.0)) / (2.0 - 1.0)
    assert_allclose(got.entries, np.array([[0.0, expected], [expected, 0.0]]), atol=1e-14)


def test_finite_difference_examples():
    eye = HermitianMatrix.identity(3)
    assert np.linalg.norm(dlog_finite_difference(eye, eye, 1e-5).entries - np.eye(3)) < 1e-10
    b = HermitianMatrix.diagonal([1.0, 2.0])
    assert dlog_finite_difference(b, HermitianMatrix.zero(2)).frobenius_norm() == 0.0


def test_finite_difference_requires_pd_perturbation():
    b = HermitianMatrix.diagonal([1.0, 1e-2])
    h = HermitianMatrix.identity(2)
    with pytest.raises(InputError):
        dlog_finite_difference(b, h, step=0.5)


def test_finite_difference_order2_against_closed_form():
    b = rand_pd(4, seed=6)
    b = HermitianMatrix(b.entries + np.eye(4))  # keep well conditioned
    h = rand_hermitian(4, seed=7)
    dk = dlog_daleckii_krein(b, h)
    errs = {
        step: np.linalg.norm(dlog_finite_difference(b, h, step).entries - dk.entries)
        for step in (1e-3, 1e-4, 1e-5)
    }
    c = errs[1e-3] / 1e-6
    assert errs[1e-4] <= 3.0 * c * 1e-8 + 1e-10
    assert errs[1e-5] <= 10.0 * c * 1e-10 + 1e-10


def test_trace_identity_examples():
    h = rand_hermitian(3, seed=8)
    lhs, rhs = dlog_trace_identity(HermitianMatrix.identity(3), h)
    assert lhs == pytest.approx(h.trace(), rel=1e-12)
    assert rhs == pytest.approx(h.trace(), rel=1e-12)

    lhs, rhs = dlog_trace_identity(HermitianMatrix.diagonal([2.0, 4.0]), HermitianMatrix.identity(2))
    assert (lhs, rhs) == (pytest.approx(0.75), pytest.approx(0.75))

    lhs, rhs = dlog_trace_identity(rand_pd(4, seed=9), HermitianMatrix.zero(4))
    assert lhs == 0.0 and rhs == 0.0


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_trace_identity_agreement(dim, seed):
    b = rand_pd(dim, seed)
    h = rand_hermitian(dim, seed + 1)
    lhs, rhs = dlog_trace_identity(b, h)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_linearity_in_direction():
    b = rand_pd(4, seed=10)
    h1 = rand_hermitian(4, seed=11)
    h2 = rand_hermitian(4, seed=12)
    combo = HermitianMatrix(2.0 * h1.entries - 0.5 * h2.entries)
    got = dlog_daleckii_krein(b, combo)
    expected = 2.0 * dlog_daleckii_krein(b, h1).entries - 0.5 * dlog_daleckii_krein(b, h2).entries
    assert np.linalg.norm(got.entries - expected) <= 1e-10 * max(1.0, np.linalg.norm(expected))


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_self_adjointness(dim, seed):
    b = rand_pd(dim, seed)
    a = rand_hermitian(dim, seed + 1)
    x = rand_hermitian(dim, seed + 2)
    lhs = hs_inner(a, dlog_daleckii_krein(b, x))
    rhs = hs_inner(x, dlog_daleckii_krein(b, a))
    scale = max(1.0, a.frobenius_norm() * x.frobenius_norm())
    assert abs(lhs - rhs) <= 1e-9 * scale


def test_commuting_reduction():
    # B and H diagonal in the same random basis: derivative is B^{-1} H
    rng = np.random.default_rng(13)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    bd = rng.uniform(0.5, 3.0, size=4)
    hd = rng.standard_normal(4)
    b = HermitianMatrix((q * bd) @ q.conj().T)
    h = HermitianMatrix((q * hd) @ q.conj().T)
    expected = (q * (hd / bd)) @ q.conj().T
    got = dlog_daleckii_krein(b, h)
    assert np.linalg.norm(got.entries - expected) <= 1e-10 * max(1.0, np.linalg.norm(expected))


def test_near_degenerate_base_is_stable():
    # eigenvalues split by 1e-9: entrywise relative accuracy should survive
    b = HermitianMatrix.diagonal([1.0, 1.0 + 1e-9])
    h = HermitianMatrix([[0.0, 1.0], [1.0, 0.0]])
    got = dlog_daleckii_krein(b, h)
    expected = math.log1p(1e-9) / 1e-9
    assert got.entries[0, 1].real == pytest.approx(expected, rel=1e-12)
