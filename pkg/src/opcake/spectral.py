"""Dense Hermitian spectral calculus.

Everything downstream (divergences, layer cake integrals, derivative
checks) is built from the handful of primitives in this module:
eigendecomposition, positive/negative parts, spectral projections of
``H - gamma*B`` relative to a positive definite reference ``B``, the
matrix logarithm, and the usual norms.  All operations are pure
functions of immutable values and are safe to call from any thread.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedWarning, InputError, NumericalFailure

# Relative asymmetry accepted before construction refuses to symmetrize.
ASYMMETRY_RTOL = 1e-8
# Eigenvalues of magnitude below dim * |M|_inf * 2**-50 are treated as zero
# when classifying strict positivity; see eps_zero().
EPS_ZERO_FACTOR = 2.0**-50
# Condition number of a PD input above which a warning is emitted.
CONDITION_WARN_THRESHOLD = 1e12


def eps_zero(dim: int, sup_norm: float) -> float:
    """Roundoff threshold below which an eigenvalue counts as zero."""
    return dim * sup_norm * EPS_ZERO_FACTOR


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2.0


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A dense complex square matrix with enforced Hermitian symmetry.

    The constructor validates that the input is Hermitian up to a
    relative Frobenius asymmetry of 1e-8, stores the symmetrized part
    (M + M^dagger)/2, and freezes the buffer.  Larger asymmetry raises
    InputError rather than being silently repaired.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise InputError("dimension must be at least 1")
        norm = np.linalg.norm(a)
        asym = np.linalg.norm(a - a.conj().T)
        if asym > ASYMMETRY_RTOL * max(norm, np.finfo(float).tiny):
            raise InputError(
                f"matrix is not Hermitian: |M - M^H|_F = {asym:.3e} "
                f"exceeds {ASYMMETRY_RTOL:g} * |M|_F"
            )
        a = _sym(a)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls(np.eye(dim))

    @classmethod
    def zero(cls, dim: int) -> "HermitianMatrix":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def diagonal(cls, values) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    # Hermitian-preserving arithmetic (real scalars only).
    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries + other.entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries - other.entries)

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix(-self.entries)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(self.entries * float(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, f) -> HermitianMatrix:
        """V f(Lambda) V^dagger for a scalar function f applied eigenwise."""
        v = self.eigenvectors
        return HermitianMatrix(_sym((v * f(self.eigenvalues)) @ v.conj().T))


@dataclass(frozen=True, eq=False)
class Projection:
    """An orthogonal projection together with its rank."""

    matrix: HermitianMatrix
    rank: int

    def __post_init__(self):
        p = self.matrix.entries
        d = self.matrix.dim
        if np.linalg.norm(p @ p - p) > 1e-10 * d:
            raise NumericalFailure("projection is not idempotent to tolerance")
        if abs(np.trace(p).real - self.rank) > 1e-10 * d:
            raise NumericalFailure("projection trace does not match rank")

    @property
    def dim(self) -> int:
        return self.matrix.dim


# ---------------------------------------------------------------------------
# Raw ndarray kernels.  The public operations validate their inputs once and
# defer to these; quadrature integrands call them directly to keep the cost
# of a node evaluation down to a single LAPACK call.


def positive_eigsum(a: np.ndarray) -> float:
    """Tr[(A)_+] for a raw Hermitian ndarray."""
    w = np.linalg.eigvalsh(a)
    return float(w[w > 0.0].sum())


def positive_projector_array(a: np.ndarray) -> np.ndarray:
    """Projector onto the strictly positive eigenspace of a raw ndarray."""
    w, v = np.linalg.eigh(a)
    cut = eps_zero(a.shape[0], float(np.abs(w).max(initial=0.0)))
    vp = v[:, w > cut]
    return vp @ vp.conj().T


def _validated_pd_eigh(b: HermitianMatrix, who: str):
    """eigh of a PD input; raises InputError if not PD, warns if ill-conditioned."""
    w, v = np.linalg.eigh(b.entries)
    sup = float(np.abs(w).max(initial=0.0))
    if w[0] <= eps_zero(b.dim, sup):
        raise InputError(
            f"{who}: matrix is not positive definite "
            f"(min eigenvalue {w[0]:.3e}, threshold {eps_zero(b.dim, sup):.3e})"
        )
    if w[-1] / w[0] > CONDITION_WARN_THRESHOLD:
        warnings.warn(
            f"{who}: condition number {w[-1] / w[0]:.3e} exceeds "
            f"{CONDITION_WARN_THRESHOLD:.0e}; proceeding",
            IllConditionedWarning,
            stacklevel=3,
        )
    return w, v


# ---------------------------------------------------------------------------
# Eigendecomposition


def jacobi_eigh(a: np.ndarray, max_sweeps: int = 100, tol: float = 1e-14):
    """Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.

    Self-contained reference solver: repeatedly applies complex plane
    rotations to annihilate off-diagonal entries until the off-diagonal
    Frobenius mass falls below ``tol * |A|_F``.  O(d^3) per sweep.

    Returns (eigenvalues ascending, eigenvector columns).  Raises
    NumericalFailure if ``max_sweeps`` is exhausted.
    """
    a = np.array(a, dtype=np.complex128)
    d = a.shape[0]
    v = np.eye(d, dtype=np.complex128)
    if d == 1:
        return a.real.ravel().copy(), v
    anorm = np.linalg.norm(a)
    if anorm == 0.0:
        return np.zeros(d), v
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * anorm:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= tol * anorm / d:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # Unitary J differs from identity only in the (p,q) plane:
                # J[p,p]=c, J[q,q]=c, J[p,q]=s*phase, J[q,p]=-s*conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vcol_p = v[:, p].copy()
                vcol_q = v[:, q].copy()
                v[:, p] = c * vcol_p - s * np.conj(phase) * vcol_q
                v[:, q] = s * phase * vcol_p + c * vcol_q
    else:
        raise NumericalFailure(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps"
        )
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_hermitian(m: HermitianMatrix, method: str = "lapack") -> SpectralDecomposition:
    """Eigendecomposition with an explicit residual contract.

    Any backend is acceptable as long as the reconstruction and
    orthonormality residuals hold; ``method`` selects between the LAPACK
    driver (default) and the self-contained cyclic Jacobi reference.
    """
    if method == "lapack":
        w, v = np.linalg.eigh(m.entries)
    elif method == "jacobi":
        w, v = jacobi_eigh(m.entries)
    else:
        raise InputError(f"unknown eigensolver method {method!r}")
    dec = SpectralDecomposition(np.ascontiguousarray(w), np.ascontiguousarray(v))
    scale = max(1.0, m.frobenius_norm())
    resid = np.linalg.norm(dec.reconstruct() - m.entries)
    if resid > 1e-12 * scale:
        raise NumericalFailure(
            f"eigendecomposition residual {resid:.3e} exceeds 1e-12 * {scale:.3e}"
        )
    ortho = np.linalg.norm(v.conj().T @ v - np.eye(m.dim))
    if ortho > 1e-12 * m.dim:
        raise NumericalFailure(f"eigenvector orthonormality residual {ortho:.3e}")
    return dec


# ---------------------------------------------------------------------------
# Positive/negative parts and spectral projections


def positive_part(m: HermitianMatrix) -> HermitianMatrix:
    """(M)_+ = (sqrt(M^2) + M)/2, i.e. eigenvalues clipped below at zero."""
    return eig_hermitian(m).apply(lambda w: np.maximum(w, 0.0))


def negative_part(m: HermitianMatrix) -> HermitianMatrix:
    """(M)_- = (sqrt(M^2) - M)/2; both parts are PSD and M = (M)_+ - (M)_-."""
    return eig_hermitian(m).apply(lambda w: np.maximum(-w, 0.0))


def positive_projection(m: HermitianMatrix) -> Projection:
    """Orthogonal projection {M > 0} onto the strictly positive eigenspace."""
    w, v = np.linalg.eigh(m.entries)
    cut = eps_zero(m.dim, float(np.abs(w).max(initial=0.0)))
    keep = w > cut
    vp = v[:, keep]
    p = _sym(vp @ vp.conj().T)
    return Projection(HermitianMatrix(p), int(keep.sum()))


def projection_gt(h: HermitianMatrix, b: HermitianMatrix, gamma: float) -> Projection:
    """{H > gamma*B}: projection onto the strictly positive part of H - gamma*B."""
    _validated_pd_eigh(b, "projection_gt")
    return positive_projection(HermitianMatrix(h.entries - gamma * b.entries))


def projection_le(h: HermitianMatrix, b: HermitianMatrix, gamma: float) -> Projection:
    """{H <= gamma*B} = I - {H > gamma*B}."""
    p = projection_gt(h, b, gamma)
    comp = HermitianMatrix(np.eye(h.dim) - p.matrix.entries)
    return Projection(comp, h.dim - p.rank)


# ---------------------------------------------------------------------------
# Matrix functions and norms


def matrix_log(b: HermitianMatrix) -> HermitianMatrix:
    """Natural logarithm of a positive definite matrix."""
    w, v = _validated_pd_eigh(b, "matrix_log")
    return HermitianMatrix(_sym((v * np.log(w)) @ v.conj().T))


def inv_sqrt(b: HermitianMatrix) -> HermitianMatrix:
    """B^{-1/2} for positive definite B."""
    w, v = _validated_pd_eigh(b, "inv_sqrt")
    return HermitianMatrix(_sym((v / np.sqrt(w)) @ v.conj().T))


def trace_norm(m: HermitianMatrix) -> float:
    """Sum of absolute eigenvalues."""
    return float(np.abs(np.linalg.eigvalsh(m.entries)).sum())


def operator_norm(m: HermitianMatrix) -> float:
    """Largest absolute eigenvalue."""
    return float(np.abs(np.linalg.eigvalsh(m.entries)).max(initial=0.0))


def hs_inner(m: HermitianMatrix, n: HermitianMatrix) -> float:
    """Hilbert-Schmidt inner product Tr[M N]; real for Hermitian arguments."""
    return float(np.tensordot(m.entries.conj(), n.entries, axes=2).real)


def pencil_eigenvalues(h: HermitianMatrix, b: HermitianMatrix) -> np.ndarray:
    """Ascending eigenvalues of B^{-1/2} H B^{-1/2}.

    These are exactly the gamma at which H - gamma*B is singular, i.e.
    the breakpoints of every gamma-integrand in this package.
    """
    w, v = _validated_pd_eigh(b, "pencil_eigenvalues")
    wb = _sym((v / np.sqrt(w)) @ v.conj().T)
    return np.linalg.eigvalsh(_sym(wb @ h.entries @ wb))


def variational_positive_trace(x: HermitianMatrix) -> float:
    """Tr[{X > 0} X]: the maximum of Tr[Lambda X] over 0 <= Lambda <= I."""
    p = positive_projection(x)
    return hs_inner(p.matrix, x)
