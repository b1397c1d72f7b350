import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opcake import (
    HermitianMatrix,
    InputError,
    frenkel_gamma,
    frenkel_t,
    hockey_stick,
    pencil_eigenvalues,
    relative_entropy,
    trace_norm,
    umegaki,
)

from conftest import rand_hermitian, rand_pd, rand_psd

LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Spectral ground truth


def test_umegaki_equal_arguments():
    b = rand_pd(4, seed=1)
    assert umegaki(b, b) == pytest.approx(0.0, abs=1e-12)


def test_umegaki_commuting_hand_computed():
    # Tr[A log A] = 2 log 2 + 0.5 log 0.5 = 1.5 log 2; Tr[A log B] = 0;
    # Tr B - Tr A = 2 - 2.5
    a = HermitianMatrix.diagonal([2.0, 0.5])
    got = umegaki(a, HermitianMatrix.identity(2))
    assert got == pytest.approx(1.5 * LOG2 - 0.5, rel=1e-12)
    assert got == pytest.approx(0.539720, abs=1e-6)


def test_umegaki_dim1():
    got = umegaki(HermitianMatrix([[2.0]]), HermitianMatrix([[1.0]]))
    assert got == pytest.approx(2.0 * LOG2 - 1.0, rel=1e-12)


def test_umegaki_rank_deficient_first_argument():
    # 0 log 0 = 0 on the null eigenvalue of A
    a = rand_psd(4, seed=2, rank=2)
    b = rand_pd(4, seed=3)
    got = umegaki(a, b)
    assert np.isfinite(got)


def test_umegaki_rejects_bad_inputs():
    with pytest.raises(InputError):
        umegaki(HermitianMatrix.diagonal([1.0, -0.5]), HermitianMatrix.identity(2))
    with pytest.raises(InputError):
        umegaki(HermitianMatrix.identity(2), HermitianMatrix.diagonal([1.0, 0.0]))


# ---------------------------------------------------------------------------
# Hockey-stick divergence


def test_hockey_stick_examples():
    a = rand_psd(3, seed=4)
    assert hockey_stick(a, a, 1.0) == pytest.approx(0.0, abs=1e-12)
    b = rand_psd(3, seed=5)
    assert hockey_stick(a, b, 0.0) == pytest.approx(a.trace())
    got = hockey_stick(HermitianMatrix.diagonal([2.0, 1.0]), HermitianMatrix.diagonal([1.0, 2.0]), 1.0)
    assert got == pytest.approx(1.0)


def test_hockey_stick_rejects_negative_gamma():
    a = rand_psd(2, seed=6)
    with pytest.raises(InputError):
        hockey_stick(a, a, -0.5)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_hockey_stick_monotone_and_supported(seed):
    a = rand_psd(4, seed)
    b = rand_pd(4, seed + 1)
    gammas = np.linspace(0.0, 1.2 * pencil_eigenvalues(a, b)[-1] + 1e-6, 30)
    values = [hockey_stick(a, b, g) for g in gammas]
    assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))
    assert values[-1] <= 1e-10
    for g, v in zip(gammas, values):
        assert v >= a.trace() - g * b.trace() - 1e-10  # Lambda = I lower bound


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_hockey_stick_lipschitz_transfer(seed):
    a = rand_psd(3, seed)
    a2 = rand_psd(3, seed + 1)
    b = rand_pd(3, seed + 2)
    g = 0.7
    assert abs(hockey_stick(a, b, g) - hockey_stick(a2, b, g)) <= trace_norm(a - a2) + 1e-10


# ---------------------------------------------------------------------------
# The gamma-form integral


def test_frenkel_gamma_equal_arguments():
    b = rand_pd(4, seed=7)
    rep = frenkel_gamma(b, b)
    assert abs(rep.value) <= 1e-9
    assert rep.method == "frenkel_gamma"


def test_frenkel_gamma_dim1_closed_form():
    # int_1^2 (2 - g)/g dg = 2 log 2 - 1; the reversed term vanishes
    rep = frenkel_gamma(HermitianMatrix([[2.0]]), HermitianMatrix([[1.0]]))
    assert abs(rep.value - (2.0 * LOG2 - 1.0)) <= 1e-8
    assert rep.branches["reversed_term"] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("dim,rank", [(2, 2), (3, 1), (5, 3), (8, 8), (8, 1)])
def test_frenkel_gamma_matches_umegaki(dim, rank):
    a = rand_psd(dim, seed=100 + dim + rank, rank=rank)
    b = rand_pd(dim, seed=200 + dim + rank)
    u = umegaki(a, b)
    rep = frenkel_gamma(a, b)
    assert abs(rep.value - u) <= 1e-6 * max(1.0, abs(u))
    assert rep.quadrature.converged


def test_frenkel_gamma_zero_direction():
    # A = 0: D(0||B) = Tr B, carried entirely by the reversed term
    b = rand_pd(3, seed=8)
    rep = frenkel_gamma(HermitianMatrix.zero(3), b)
    assert rep.value == pytest.approx(b.trace(), rel=1e-8)


# ---------------------------------------------------------------------------
# The t-form


def test_frenkel_t_equal_arguments():
    b = rand_pd(3, seed=9)
    assert abs(frenkel_t(b, b).value) <= 1e-9


def test_frenkel_t_dim1_closed_form():
    rep = frenkel_t(HermitianMatrix([[2.0]]), HermitianMatrix([[1.0]]))
    assert abs(rep.value - (2.0 * LOG2 - 1.0)) <= 1e-8
    assert set(rep.branches) == {"t_gt_1", "t_lt_0"}


@settings(max_examples=20, deadline=None)
@given(dim=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_frenkel_t_agrees_with_gamma_form(dim, seed):
    a = rand_psd(dim, seed)
    b = rand_pd(dim, seed + 1)
    rt = frenkel_t(a, b)
    rg = frenkel_gamma(a, b)
    slack = 2.0 * (rt.quadrature.error_estimate + rg.quadrature.error_estimate)
    assert abs(rt.value - rg.value) <= slack + 1e-12


def test_t_branch_values_match_gamma_terms():
    a = rand_psd(4, seed=10)
    b = rand_pd(4, seed=11)
    rt = frenkel_t(a, b)
    rg = frenkel_gamma(a, b)
    assert rt.branches["t_gt_1"] == pytest.approx(rg.branches["hockey_stick_term"])
    assert rt.branches["t_lt_0"] == pytest.approx(rg.branches["reversed_term"])


# ---------------------------------------------------------------------------
# Reports and dispatch


def test_relative_entropy_dispatch():
    a = rand_psd(3, seed=12)
    b = rand_pd(3, seed=13)
    values = {m: relative_entropy(a, b, m).value for m in ("umegaki", "frenkel_gamma", "frenkel_t")}
    assert values["frenkel_gamma"] == pytest.approx(values["umegaki"], abs=1e-7, rel=1e-7)
    assert values["frenkel_t"] == pytest.approx(values["umegaki"], abs=1e-7, rel=1e-7)
    with pytest.raises(InputError):
        relative_entropy(a, b, "renyi")


def test_nonnegative_for_density_pairs():
    # trace-normalized pairs: relative entropy is nonnegative
    for seed in range(6):
        a = rand_psd(3, seed=40 + seed)
        b = rand_pd(3, seed=50 + seed)
        a = HermitianMatrix(a.entries / a.trace())
        b = HermitianMatrix(b.entries / b.trace())
        assert frenkel_gamma(a, b).value >= -1e-9


def test_condition_warning_recorded_in_report():
    a = HermitianMatrix.diagonal([1.0, 1.0])
    b = HermitianMatrix.diagonal([1.0, 2e13])
    rep = relative_entropy(a, b, "umegaki")
    assert any("condition" in w for w in rep.warnings)
