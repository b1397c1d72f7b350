"""Directional derivative of the matrix logarithm at a PD base point.

Two independent evaluation routes live here: the closed-form divided
difference (Daleckii-Krein) construction, which serves as the oracle
for everything else, and a central finite difference of the defining
limit, which serves as a sanity oracle for the closed form itself.
The third route (the layer cake integral) lives in the layercake
module and is cross-validated against these two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .spectral import HermitianMatrix, _sym, _validated_pd_eigh, matrix_log, operator_norm

# Below this relative eigenvalue separation the divided difference of log
# switches from the quotient to a short atanh series; the quotient loses
# roughly half its digits to cancellation near coincident eigenvalues.
SERIES_CROSSOVER = 1e-7


@dataclass(frozen=True, eq=False)
class LoewnerMatrix:
    """First divided differences of log at eigenvalue pairs.

    Entry (i, j) is (log l_i - log l_j)/(l_i - l_j), with the diagonal
    equal to 1/l_i.  Acts as the entrywise multiplier realizing the
    derivative of log in the eigenbasis of the base point.
    """

    entries: np.ndarray

    @classmethod
    def for_log(cls, eigenvalues: np.ndarray) -> "LoewnerMatrix":
        lam = np.asarray(eigenvalues, dtype=float)
        if np.any(lam <= 0.0):
            raise InputError("Loewner matrix of log requires positive eigenvalues")
        li = lam[:, None]
        lj = lam[None, :]
        total = li + lj
        x = (li - lj) / total
        near = np.abs(x) < SERIES_CROSSOVER
        diff = np.where(near, 1.0, li - lj)
        with np.errstate(divide="ignore", invalid="ignore"):
            quotient = (np.log(li) - np.log(lj)) / diff
        x2 = x * x
        series = (2.0 / total) * (1.0 + x2 / 3.0 + x2 * x2 / 5.0)
        return cls(np.where(near, series, quotient))


def dlog_daleckii_krein(b: HermitianMatrix, h: HermitianMatrix) -> HermitianMatrix:
    """Closed-form derivative of log at B in direction H.

    With B = V diag(lam) V^dagger this is V (L o (V^dagger H V)) V^dagger,
    where L is the Loewner matrix of log at lam and o is the entrywise
    product.
    """
    if b.dim != h.dim:
        raise InputError("dimension mismatch between base point and direction")
    w, v = _validated_pd_eigh(b, "dlog_daleckii_krein")
    loewner = LoewnerMatrix.for_log(w).entries
    ht = v.conj().T @ h.entries @ v
    return HermitianMatrix(_sym(v @ (loewner * ht) @ v.conj().T))


def default_fd_step(b: HermitianMatrix, h: HermitianMatrix) -> float:
    """Step balancing O(h^2) truncation against roundoff O(u/h)."""
    hn = operator_norm(h)
    return 1e-5 * operator_norm(b) / max(hn, np.finfo(float).eps)


def dlog_finite_difference(
    b: HermitianMatrix, h: HermitianMatrix, step: float | None = None
) -> HermitianMatrix:
    """Central difference (log(B+hH) - log(B-hH)) / 2h; O(h^2) accurate.

    Raises InputError if B +/- hH is not positive definite; the caller
    is expected to shrink the step in that case.
    """
    if b.dim != h.dim:
        raise InputError("dimension mismatch between base point and direction")
    t = default_fd_step(b, h) if step is None else float(step)
    if t <= 0:
        raise InputError("finite-difference step must be positive")
    plus = matrix_log(HermitianMatrix(b.entries + t * h.entries))
    minus = matrix_log(HermitianMatrix(b.entries - t * h.entries))
    return HermitianMatrix((plus.entries - minus.entries) / (2.0 * t))


def dlog_trace_identity(b: HermitianMatrix, h: HermitianMatrix) -> tuple[float, float]:
    """(Tr[D log[B](H)], Tr[B^{-1} H]); the two must agree.

    An independent scalar cross-check: the trace of the derivative of
    log equals the derivative of log det, which is Tr[B^{-1} H].
    """
    lhs = dlog_daleckii_krein(b, h).trace()
    _validated_pd_eigh(b, "dlog_trace_identity")
    rhs = float(np.trace(np.linalg.solve(b.entries, h.entries)).real)
    return lhs, rhs
