"""Projection-valued integral representations of the derivative of log.

The one-sided form integrates {A > gamma B} over gamma >= 0 for a PSD
direction A; the two-sided form subtracts the integral of {H <= gamma B}
over gamma < 0 and holds for any Hermitian direction H.  Both integrands
vanish outside [-r, r] where r bounds the spectrum of B^{-1/2} H B^{-1/2},
so the improper integrals reduce to compact ones.

Note the integrand {H > gamma B} is not constant between pencil
eigenvalues -- only its rank is.  The projector rotates continuously with
gamma whenever H and B do not commute, which is why genuine adaptive
panels are used rather than one sample per plateau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .frechet import dlog_daleckii_krein
from .quadrature import QuadratureConfig, QuadratureResult, integrate_matrix
from .spectral import (
    HermitianMatrix,
    _sym,
    _validated_pd_eigh,
    pencil_eigenvalues,
    positive_projector_array,
)

SUPPORT_MARGIN = 1e-9


@dataclass(frozen=True)
class SupportRadius:
    """Bound r such that {H > gamma B} is trivial for |gamma| > r."""

    r: float


def support_radius(b: HermitianMatrix, h: HermitianMatrix) -> SupportRadius:
    """Operator norm of B^{-1/2} H B^{-1/2}, with a tiny safety margin."""
    pencil = pencil_eigenvalues(h, b)
    return SupportRadius(float(np.abs(pencil).max(initial=0.0)) * (1.0 + SUPPORT_MARGIN))


def _zero_result(dim: int) -> QuadratureResult:
    return QuadratureResult.empty(HermitianMatrix.zero(dim))


def layer_cake_positive(
    b: HermitianMatrix, a: HermitianMatrix, cfg: QuadratureConfig | None = None
) -> QuadratureResult:
    """int_0^inf {A > gamma B} dgamma for PSD A; equals D log[B](A)."""
    if a.dim != b.dim:
        raise InputError("dimension mismatch")
    wa = np.linalg.eigvalsh(a.entries)
    if wa[0] < -1e-10 * max(1.0, abs(wa[-1])):
        raise InputError("layer_cake_positive requires a PSD direction")
    pencil = pencil_eigenvalues(a, b)
    r = support_radius(b, a).r
    if r == 0.0:
        return _zero_result(a.dim)
    arr_a, arr_b = a.entries, b.entries
    inner = [g for g in pencil if 0.0 < g < r]
    return integrate_matrix(
        lambda g: positive_projector_array(arr_a - g * arr_b), 0.0, r, inner, cfg
    )


def layer_cake_two_sided(
    b: HermitianMatrix, h: HermitianMatrix, cfg: QuadratureConfig | None = None
) -> QuadratureResult:
    """int_0^inf {H > gamma B} dgamma - int_{-inf}^0 {H <= gamma B} dgamma."""
    if h.dim != b.dim:
        raise InputError("dimension mismatch")
    _validated_pd_eigh(b, "layer_cake_two_sided")
    pencil = pencil_eigenvalues(h, b)
    r = support_radius(b, h).r
    if r == 0.0:
        return _zero_result(h.dim)
    arr_h, arr_b = h.entries, b.entries
    eye = np.eye(h.dim)
    pos = integrate_matrix(
        lambda g: positive_projector_array(arr_h - g * arr_b),
        0.0,
        r,
        [g for g in pencil if 0.0 < g < r],
        cfg,
    )
    neg = integrate_matrix(
        lambda g: eye - positive_projector_array(arr_h - g * arr_b),
        -r,
        0.0,
        [g for g in pencil if -r < g < 0.0],
        cfg,
    )
    value = HermitianMatrix(_sym(pos.value.entries - neg.value.entries))
    return QuadratureResult(
        value,
        pos.error_estimate + neg.error_estimate,
        pos.evaluations + neg.evaluations,
        pos.panels + neg.panels,
        pos.breakpoints + neg.breakpoints,
        pos.converged and neg.converged,
    )


def shift_identity_residual(
    b: HermitianMatrix, h: HermitianMatrix, cfg: QuadratureConfig | None = None
) -> float:
    """Residual of the reduction from the two-sided to the one-sided form.

    Shifting the direction by r B makes it PSD, and the derivative of
    log shifts by exactly r along the identity:
    D log[B](H) = D log[B](H + r B) - r I.  The left side is evaluated
    by the two-sided integral, the right by the one-sided integral; the
    Frobenius norm of the difference is returned.
    """
    r = support_radius(b, h).r
    shifted = HermitianMatrix(h.entries + r * b.entries)
    one_sided = layer_cake_positive(b, shifted, cfg)
    two_sided = layer_cake_two_sided(b, h, cfg)
    lhs = one_sided.value.entries - r * np.eye(h.dim)
    return float(np.linalg.norm(lhs - two_sided.value.entries))


def layer_cake_vs_daleckii_krein(
    b: HermitianMatrix, h: HermitianMatrix, cfg: QuadratureConfig | None = None
) -> float:
    """Frobenius distance between the integral and closed-form routes."""
    lc = layer_cake_two_sided(b, h, cfg)
    dk = dlog_daleckii_krein(b, h)
    return float(np.linalg.norm(lc.value.entries - dk.entries))
