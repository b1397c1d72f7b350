import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from opcake import (
    HermitianMatrix,
    InputError,
    dlog_daleckii_krein,
    layer_cake_positive,
    layer_cake_two_sided,
    shift_identity_residual,
    support_radius,
)

from conftest import rand_hermitian, rand_pd, rand_psd


def test_support_radius_examples():
    b = rand_pd(3, seed=1)
    assert support_radius(b, b).r == pytest.approx(1.0, rel=1e-8)
    assert support_radius(b, HermitianMatrix.zero(3)).r == 0.0
    got = support_radius(HermitianMatrix.identity(2), HermitianMatrix.diagonal([3.0, -1.0]))
    assert got.r == pytest.approx(3.0, rel=1e-8)


def test_positive_equal_arguments_gives_identity():
    b = rand_pd(3, seed=2)
    res = layer_cake_positive(b, b)
    assert np.linalg.norm(res.value.entries - np.eye(3)) <= 1e-7


def test_positive_diagonal_ratios():
    # diagonal indicators integrate to a_i / b_i
    res = layer_cake_positive(HermitianMatrix.diagonal([1.0, 2.0]), HermitianMatrix.diagonal([2.0, 2.0]))
    assert_allclose(res.value.entries, np.diag([2.0, 1.0]), atol=1e-8)


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8])
def test_positive_matches_daleckii_krein(dim):
    a = rand_psd(dim, seed=10 + dim)
    b = rand_pd(dim, seed=20 + dim)
    dk = dlog_daleckii_krein(b, a)
    res = layer_cake_positive(b, a)
    assert np.linalg.norm(res.value.entries - dk.entries) <= 1e-6 * max(1.0, np.linalg.norm(dk.entries))


def test_positive_rejects_indefinite_direction():
    b = rand_pd(2, seed=3)
    with pytest.raises(InputError):
        layer_cake_positive(b, HermitianMatrix.diagonal([1.0, -1.0]))


def test_two_sided_zero_direction():
    b = rand_pd(4, seed=4)
    res = layer_cake_two_sided(b, HermitianMatrix.zero(4))
    assert res.value.frobenius_norm() == 0.0
    assert res.evaluations == 0


def test_two_sided_negative_base_direction():
    # {-B > gB} vanishes for g >= 0 while {-B <= gB} = I exactly on (-1, 0)
    b = rand_pd(3, seed=5)
    res = layer_cake_two_sided(b, -1.0 * b)
    assert np.linalg.norm(res.value.entries + np.eye(3)) <= 1e-7


def test_two_sided_diagonal_scalar_layer_cake():
    res = layer_cake_two_sided(HermitianMatrix.identity(2), HermitianMatrix.diagonal([1.0, -1.0]))
    assert_allclose(res.value.entries, np.diag([1.0, -1.0]), atol=1e-8)


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8])
def test_two_sided_matches_daleckii_krein(dim):
    b = rand_pd(dim, seed=30 + dim)
    h = rand_hermitian(dim, seed=40 + dim)
    dk = dlog_daleckii_krein(b, h)
    res = layer_cake_two_sided(b, h)
    assert np.linalg.norm(res.value.entries - dk.entries) <= 1e-6 * max(1.0, np.linalg.norm(dk.entries))


@settings(max_examples=15, deadline=None)
@given(dim=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_two_sided_reduces_to_positive_for_psd(dim, seed):
    a = rand_psd(dim, seed)
    b = rand_pd(dim, seed + 1)
    two = layer_cake_two_sided(b, a)
    one = layer_cake_positive(b, a)
    slack = 2.0 * (two.error_estimate + one.error_estimate)
    assert np.linalg.norm(two.value.entries - one.value.entries) <= slack + 1e-12


@settings(max_examples=15, deadline=None)
@given(dim=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_two_sided_trace_identity(dim, seed):
    b = rand_pd(dim, seed)
    h = rand_hermitian(dim, seed + 1)
    res = layer_cake_two_sided(b, h)
    expected = float(np.trace(np.linalg.solve(b.entries, h.entries)).real)
    assert abs(res.value.trace() - expected) <= 1e-6 * max(1.0, abs(expected))


def test_shift_identity_trivial_cases():
    b = rand_pd(3, seed=6)
    assert shift_identity_residual(b, HermitianMatrix.zero(3)) <= 1e-12
    a = rand_psd(3, seed=7)
    res = shift_identity_residual(b, a)
    assert res <= 1e-6


@pytest.mark.parametrize("dim", [2, 3, 4, 5, 6])
def test_shift_identity_random(dim):
    b = rand_pd(dim, seed=50 + dim)
    h = rand_hermitian(dim, seed=60 + dim)
    assert shift_identity_residual(b, h) <= 1e-6


def test_adaptivity_stays_within_budget_for_conditioned_inputs():
    # smooth projector rotation between breakpoints: panel growth is modest
    b = rand_pd(6, seed=8)
    h = rand_hermitian(6, seed=9)
    res = layer_cake_two_sided(b, h)
    assert res.converged
    assert res.panels < 200
