"""Adaptive breakpoint-aware quadrature for scalar and matrix integrands.

The integrands in this package are piecewise smooth: analytic between
pencil eigenvalues, with kinks (or jumps of a projection-valued
integrand) exactly at them.  The domain is therefore partitioned at the
supplied breakpoints first, and each piece is handled by adaptive
bisection with a fixed-order Gauss-Legendre rule.  Gauss nodes are
strictly interior, so neither endpoints nor breakpoints are ever
evaluated; the measure-zero ambiguity of strict vs. non-strict spectral
projections at a breakpoint can thus be ignored.

Per-panel error is estimated by comparing the panel value against the
sum over its two halves.  Panels with the largest estimate are split
first until the summed estimate meets max(abs_tol, rel_tol * |value|)
or the subdivision budget runs out (ToleranceNotMet, partial result
attached).  Matrix-valued integration is identical with the Frobenius
norm driving adaptivity, which bounds every entry simultaneously.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, ToleranceNotMet
from .spectral import HermitianMatrix, _sym

# Breakpoints closer than this fraction of the domain width are merged;
# avoids zero-width panels from near-degenerate pencil eigenvalues.
BREAKPOINT_MERGE_RTOL = 1e-12


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budget for the adaptive integrators."""

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    matrix_abs_tol: float = 1e-8
    max_subdivisions: int = 2000
    nodes_per_panel: int = 15

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.matrix_abs_tol <= 0:
            raise InputError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise InputError("max_subdivisions must be at least 1")
        if self.nodes_per_panel < 2:
            raise InputError("nodes_per_panel must be at least 2")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of one integration run.

    value is a float for scalar integrands and a HermitianMatrix for
    matrix integrands.  Degenerate empty domains (constructed by callers
    for vanishing integration ranges) carry evaluations = panels = 0;
    results produced by the integrators always evaluate at least one
    panel.
    """

    value: object
    error_estimate: float
    evaluations: int
    panels: int
    breakpoints: tuple
    converged: bool = True

    @classmethod
    def empty(cls, value) -> "QuadratureResult":
        return cls(value, 0.0, 0, 0, (), True)


@lru_cache(maxsize=8)
def _gauss_rule(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


class _Panel:
    __slots__ = ("lo", "hi", "fine", "err")

    def __init__(self, lo, hi, fine, err):
        self.lo = lo
        self.hi = hi
        self.fine = fine
        self.err = err


def _partition(a: float, b: float, breakpoints: Sequence[float]) -> list[float]:
    """Panel boundaries: [a, b] split at interior breakpoints, merged when close."""
    width = b - a
    pts = [a]
    for x in sorted(float(t) for t in breakpoints):
        if x <= a or x >= b:
            continue
        if x - pts[-1] > BREAKPOINT_MERGE_RTOL * width and b - x > BREAKPOINT_MERGE_RTOL * width:
            pts.append(x)
    pts.append(b)
    return pts


def _adaptive(f, a, b, breakpoints, cfg, *, norm, abs_tol):
    if not (np.isfinite(a) and np.isfinite(b)):
        raise InputError("integration limits must be finite")
    if not a < b:
        raise InputError(f"require a < b, got [{a}, {b}]")

    nodes, weights = _gauss_rule(cfg.nodes_per_panel)
    evaluations = 0

    def gl(lo, hi):
        nonlocal evaluations
        half = 0.5 * (hi - lo)
        mid = 0.5 * (lo + hi)
        acc = weights[0] * f(mid + half * nodes[0])
        for w, x in zip(weights[1:], nodes[1:]):
            acc = acc + w * f(mid + half * x)
        evaluations += len(nodes)
        return half * acc

    def make_panel(lo, hi, coarse):
        mid = 0.5 * (lo + hi)
        left = gl(lo, mid)
        right = gl(mid, hi)
        fine = left + right
        return _Panel(lo, hi, fine, norm(coarse - fine))

    bounds = _partition(a, b, breakpoints)
    heap = []
    seq = 0
    value = None
    err_total = 0.0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        panel = make_panel(lo, hi, gl(lo, hi))
        heapq.heappush(heap, (-panel.err, seq, panel))
        seq += 1
        value = panel.fine if value is None else value + panel.fine
        err_total += panel.err

    def final_totals():
        # Accumulate in panel order for bit-stable results at fixed config.
        err = 0.0
        total = None
        for _, _, p in sorted(heap, key=lambda item: item[2].lo):
            err += p.err
            total = p.fine if total is None else total + p.fine
        return total, err

    subdivisions = 0
    while err_total > max(abs_tol, cfg.rel_tol * norm(value)):
        if subdivisions >= cfg.max_subdivisions:
            total, err = final_totals()
            result = QuadratureResult(
                total, err, evaluations, len(heap), tuple(bounds[1:-1]), False
            )
            raise ToleranceNotMet(
                f"subdivision budget {cfg.max_subdivisions} exhausted with "
                f"error estimate {err:.3e}",
                result=result,
            )
        _, _, worst = heapq.heappop(heap)
        value = value - worst.fine
        err_total -= worst.err
        mid = 0.5 * (worst.lo + worst.hi)
        for lo, hi in ((worst.lo, mid), (mid, worst.hi)):
            child = make_panel(lo, hi, gl(lo, hi))
            heapq.heappush(heap, (-child.err, seq, child))
            seq += 1
            value = value + child.fine
            err_total += child.err
        subdivisions += 1

    total, err = final_totals()
    return QuadratureResult(
        total, err, evaluations, len(heap), tuple(bounds[1:-1]), True
    )


def integrate_scalar(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    cfg: QuadratureConfig | None = None,
) -> QuadratureResult:
    """Integrate a real-valued function over [a, b] with known breakpoints."""
    cfg = cfg or DEFAULT_CONFIG
    res = _adaptive(
        lambda x: float(f(x)), a, b, breakpoints, cfg, norm=abs, abs_tol=cfg.abs_tol
    )
    return res


def integrate_matrix(
    f: Callable[[float], object],
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    cfg: QuadratureConfig | None = None,
) -> QuadratureResult:
    """Integrate a Hermitian-matrix-valued function; adaptivity in Frobenius norm.

    The integrand may return either a HermitianMatrix or a raw complex
    ndarray; the result is symmetrized and returned as a HermitianMatrix.
    """
    cfg = cfg or DEFAULT_CONFIG

    def fv(x):
        y = f(x)
        return y.entries if isinstance(y, HermitianMatrix) else np.asarray(y)

    res = _adaptive(
        fv, a, b, breakpoints, cfg, norm=np.linalg.norm, abs_tol=cfg.matrix_abs_tol
    )
    return QuadratureResult(
        HermitianMatrix(_sym(res.value)),
        res.error_estimate,
        res.evaluations,
        res.panels,
        res.breakpoints,
        res.converged,
    )


def compactify_reciprocal(
    g: Callable[[float], float],
    gamma_min: float,
    cfg: QuadratureConfig | None = None,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Integral of g over [gamma_min, inf) via the substitution u = 1/gamma.

    Evaluates int_0^{1/gamma_min} g(1/u)/u^2 du; the caller guarantees the
    transformed integrand extends continuously to u = 0 (open Gauss nodes
    never evaluate the endpoint itself).  Breakpoints are given in gamma
    and mapped to their reciprocals.
    """
    if gamma_min <= 0:
        raise InputError("compactify_reciprocal requires gamma_min > 0")
    mapped = [1.0 / t for t in breakpoints if t > gamma_min]
    return integrate_scalar(
        lambda u: g(1.0 / u) / (u * u), 0.0, 1.0 / gamma_min, mapped, cfg
    )
