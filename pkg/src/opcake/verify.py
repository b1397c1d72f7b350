"""Randomized property-test engine for the identities behind the package.

Every identity, lemma, and proof-step inequality is executed over
seeded random instances.  Checks never abort: each trial produces a
residual, failures are counted against the check tolerance, and the
seeds of failing trials are recorded so any failure can be replayed
exactly with run_single_trial.

Finite-difference-based trials compare against a truncation floor
C * h^2 in addition to the stated tolerance, with C a third-derivative
proxy (10 * |direction|_inf^3 / gap^3); testing tighter than the FD
truncation error would measure the probe, not the identity.  Reported
residuals are normalized so that "residual > tolerance" is exactly the
per-trial failure criterion.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .divergences import frenkel_gamma, umegaki
from .errors import InputError
from .frechet import dlog_daleckii_krein
from .layercake import layer_cake_positive, layer_cake_two_sided
from .quadrature import QuadratureConfig
from .spectral import (
    HermitianMatrix,
    hs_inner,
    operator_norm,
    pencil_eigenvalues,
    positive_eigsum,
    positive_projector_array,
    trace_norm,
)

INSTANCE_KINDS = (
    "pd",
    "psd_full_rank",
    "psd_rank_deficient",
    "hermitian",
    "traceless_hermitian",
)

DEFAULT_DIMS = (1, 2, 3, 4, 5, 6)

# Stated tolerance of each check when the caller does not override it.
DEFAULT_TOLERANCES = {
    "equivalence_chain": 1e-6,
    "derivative_identity": 1e-6,
    "hockey_stick_partials": 1e-6,
    "lemma_differentiability": 1e-6,
    "lipschitz": 1e-9,
    "self_adjointness": 1e-9,
    "dominated_quotient_bound": 1e-9,
    "mixed_partials": 1e-6,
    "convergence_probe": 1.0,
}

# Relative margin kept between a drawn parameter and the singular set of a
# lemma-based check; the statements hold almost everywhere, and sampling on
# top of a pencil eigenvalue would measure numerics rather than the theorem.
SINGULAR_MARGIN = 1e-3


def worker_count() -> int:
    """Worker cap from OPCAKE_THREADS (default: machine parallelism)."""
    env = os.environ.get("OPCAKE_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InputError(f"OPCAKE_THREADS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


@dataclass(frozen=True)
class InstanceSpec:
    """Deterministic description of one random matrix draw."""

    dim: int
    kind: str
    scale: float = 1.0
    seed: int = 0
    rank: int | None = None

    def __post_init__(self):
        if not 1 <= self.dim <= 16:
            raise InputError("instance dimension must be in 1..16")
        if self.kind not in INSTANCE_KINDS:
            raise InputError(f"unknown instance kind {self.kind!r}")
        if self.scale <= 0:
            raise InputError("scale must be positive")
        if self.kind == "psd_rank_deficient":
            if self.rank is None or not 1 <= self.rank <= self.dim:
                raise InputError("psd_rank_deficient requires 1 <= rank <= dim")


def gen_instance(spec: InstanceSpec) -> HermitianMatrix:
    """Draw the matrix described by spec; deterministic in spec.seed."""
    rng = np.random.default_rng(spec.seed)
    d = spec.dim

    def cgauss(cols):
        return rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))

    if spec.kind == "hermitian":
        g = cgauss(d)
        m = g + g.conj().T
    elif spec.kind == "traceless_hermitian":
        g = cgauss(d)
        m = g + g.conj().T
        m = m - (np.trace(m).real / d) * np.eye(d)
    elif spec.kind == "pd":
        g = cgauss(d)
        m = g @ g.conj().T + 1e-3 * np.eye(d)
    elif spec.kind == "psd_full_rank":
        g = cgauss(d)
        m = g @ g.conj().T
    else:  # psd_rank_deficient
        g = cgauss(spec.rank)
        m = g @ g.conj().T
    return HermitianMatrix(m * spec.scale)


@dataclass(frozen=True)
class VerificationReport:
    """Aggregated outcome of one check over its trials.

    max_residual is normalized so that comparing it against tolerance is
    exactly the per-trial failure criterion (FD-based trials rescale
    their residual by tolerance / max(tolerance, C h^2)).
    """

    check_name: str
    trials: int
    failures: int
    max_residual: float
    tolerance: float
    failing_seeds: tuple
    wall_time_ms: float

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "trials": self.trials,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "failing_seeds": list(self.failing_seeds),
            "wall_time_ms": self.wall_time_ms,
        }


def reports_to_json(reports) -> str:
    payload = [r.to_dict() for r in sorted(reports, key=lambda r: r.check_name)]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def trial_seed(master_seed: int, check_name: str, index: int) -> int:
    """Stable 63-bit per-trial seed derived from (master, check, index)."""
    digest = hashlib.sha256(f"{master_seed}:{check_name}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _map_trials(fn, seeds):
    workers = worker_count()
    if workers > 1 and len(seeds) >= 8:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, seeds))
    return [fn(s) for s in seeds]


def _aggregate(name, seeds, outcomes, tolerance, wall_ms) -> VerificationReport:
    max_res = None
    failing = []
    for seed, (residual, trial_tol) in zip(seeds, outcomes):
        scaled = residual * (tolerance / trial_tol) if trial_tol > 0 else residual
        max_res = scaled if max_res is None else max(max_res, scaled)
        if scaled > tolerance:
            failing.append(seed)
    if max_res is None:
        max_res = 0.0
    return VerificationReport(
        check_name=name,
        trials=len(seeds),
        failures=len(failing),
        max_residual=max_res,
        tolerance=tolerance,
        failing_seeds=tuple(failing),
        wall_time_ms=wall_ms,
    )


# ---------------------------------------------------------------------------
# Instance-drawing helpers shared by the trials


def _draw_dim(rng, dims) -> int:
    return int(dims[int(rng.integers(len(dims)))])


def _sub_seed(rng) -> int:
    return int(rng.integers(2**63))


def _draw_psd(rng, dim) -> HermitianMatrix:
    """PSD draw with rank uniform over 1..dim (rank dim means full rank)."""
    rank = 1 + int(rng.integers(dim))
    if rank == dim:
        return gen_instance(InstanceSpec(dim, "psd_full_rank", seed=_sub_seed(rng)))
    return gen_instance(InstanceSpec(dim, "psd_rank_deficient", seed=_sub_seed(rng), rank=rank))


def _draw_pd(rng, dim) -> HermitianMatrix:
    return gen_instance(InstanceSpec(dim, "pd", seed=_sub_seed(rng)))


def _draw_herm(rng, dim) -> HermitianMatrix:
    return gen_instance(InstanceSpec(dim, "hermitian", seed=_sub_seed(rng)))


def _draw_avoiding(rng, lo, hi, avoid, margin) -> float:
    """Uniform draw on [lo, hi] at least margin away from every avoid point."""
    for _ in range(500):
        x = float(rng.uniform(lo, hi))
        if all(abs(x - a) > margin for a in avoid):
            return x
    raise InputError("could not draw a parameter clear of the singular set")


def _pd_safe_step(step, b_min, direction_norm) -> float:
    """Shrink an FD step so the base point stays PD with a 4x margin."""
    if direction_norm == 0.0:
        return step
    return min(step, 0.25 * b_min / direction_norm)


def _hs_raw(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.tensordot(x.conj(), y, axes=2).real)


# ---------------------------------------------------------------------------
# Trial bodies.  Each derives everything (dimension, instances, parameters)
# from its seed alone, so a recorded failing seed replays the identical
# trial.  Returns (raw residual, trial tolerance) pairs.


def trial_equivalence_chain(seed, dims=DEFAULT_DIMS, tol=1e-6, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    a = _draw_psd(rng, dim)
    b = _draw_pd(rng, dim)
    h = _draw_herm(rng, dim)

    u = umegaki(a, b)
    r3 = abs(frenkel_gamma(a, b, cfg).value - u)
    t3 = max(tol, tol * abs(u))

    dk_a = dlog_daleckii_krein(b, a)
    r2 = float(np.linalg.norm(layer_cake_positive(b, a, cfg).value.entries - dk_a.entries))
    t2 = tol * max(1.0, float(np.linalg.norm(dk_a.entries)))

    dk_h = dlog_daleckii_krein(b, h)
    r1 = float(np.linalg.norm(layer_cake_two_sided(b, h, cfg).value.entries - dk_h.entries))
    t1 = tol * max(1.0, float(np.linalg.norm(dk_h.entries)))
    return ((r3, t3), (r2, t2), (r1, t1))


def trial_derivative_identity(seed, dims=DEFAULT_DIMS, tol=1e-6, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    a = _draw_psd(rng, dim)
    b = _draw_pd(rng, dim)
    x = _draw_herm(rng, dim)
    b_min = float(np.linalg.eigvalsh(b.entries)[0])
    h = _pd_safe_step(1e-5, b_min, operator_norm(x))
    lhs = (
        umegaki(a, HermitianMatrix(b.entries + h * x.entries))
        - umegaki(a, HermitianMatrix(b.entries - h * x.entries))
    ) / (2.0 * h)
    rhs = -hs_inner(a, dlog_daleckii_krein(b, x)) + x.trace()
    scale = max(1.0, abs(lhs), abs(rhs))
    c = 10.0 * operator_norm(x) ** 3 / b_min**3
    return abs(lhs - rhs) / scale, max(tol, c * h * h / scale)


def trial_hockey_stick_partials(seed, dims=DEFAULT_DIMS, tol=1e-6, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    b = _draw_pd(rng, dim)
    x = _draw_herm(rng, dim)
    hdir = _draw_herm(rng, dim)
    b_min = float(np.linalg.eigvalsh(b.entries)[0])
    dir_norm = max(operator_norm(x), operator_norm(hdir), np.finfo(float).eps)
    amp = 0.05 * b_min / dir_norm
    sv = float(rng.uniform(-amp, amp))
    tv = float(rng.uniform(-amp, amp))
    base_s = b.entries + sv * x.entries
    base_t = b.entries + tv * hdir.entries

    pencil = pencil_eigenvalues(HermitianMatrix(base_s), HermitianMatrix(base_t))
    hi = 1.5 * float(pencil[-1])
    gamma = _draw_avoiding(rng, 0.0, hi, pencil, SINGULAR_MARGIN * hi)

    h = _pd_safe_step(1e-5, b_min, operator_norm(x))

    def e_fwd(sq):
        return positive_eigsum(b.entries + sq * x.entries - gamma * base_t)

    fd1 = (e_fwd(sv + h) - e_fwd(sv - h)) / (2.0 * h)
    m1 = base_s - gamma * base_t
    rhs1 = _hs_raw(x.entries, positive_projector_array(m1))

    def e_rev(sq):
        return positive_eigsum(base_t - gamma * (b.entries + sq * x.entries))

    fd2 = (e_rev(sv + h) - e_rev(sv - h)) / (2.0 * h)
    m2 = base_t - gamma * base_s
    rhs2 = -gamma * _hs_raw(x.entries, positive_projector_array(m2))

    gap = max(
        min(
            float(np.abs(np.linalg.eigvalsh(m1)).min()),
            float(np.abs(np.linalg.eigvalsh(m2)).min()),
        ),
        1e-12,
    )
    scale = max(1.0, trace_norm(x) * max(1.0, gamma))
    c = 10.0 * (operator_norm(x) * max(1.0, gamma)) ** 3 / gap**3
    residual = max(abs(fd1 - rhs1), abs(fd2 - rhs2)) / scale
    return residual, max(tol, c * h * h / scale)


def trial_lemma_differentiability(seed, dims=DEFAULT_DIMS, tol=1e-6, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    k = _draw_herm(rng, dim)
    l = _draw_herm(rng, dim)
    l_eigs = np.abs(np.linalg.eigvalsh(l.entries))
    singular = []
    if l_eigs.min() > 1e-10 * max(l_eigs.max(), 1.0):
        gen = np.linalg.eigvals(np.linalg.solve(l.entries, k.entries))
        singular = [float(g.real) for g in gen if abs(g.imag) <= 1e-9 * (abs(g) + 1.0)]
    hi = 1.5 * max(1.0, max((abs(t) for t in singular), default=1.0))
    t = _draw_avoiding(rng, -hi, hi, singular, SINGULAR_MARGIN * hi)

    h = 1e-5 * hi
    fd = (
        positive_eigsum(k.entries - (t + h) * l.entries)
        - positive_eigsum(k.entries - (t - h) * l.entries)
    ) / (2.0 * h)
    m = k.entries - t * l.entries
    rhs = -_hs_raw(l.entries, positive_projector_array(m))
    gap = max(float(np.abs(np.linalg.eigvalsh(m)).min()), 1e-12)
    scale = max(1.0, trace_norm(l))
    c = 10.0 * operator_norm(l) ** 3 / gap**3
    return abs(fd - rhs) / scale, max(tol, c * h * h / scale)


def trial_lipschitz(seed, dims=DEFAULT_DIMS, tol=1e-9, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    x = _draw_herm(rng, dim)
    if rng.integers(2):
        z = _draw_herm(rng, dim)
        y = HermitianMatrix(x.entries + 1e-8 * z.entries)
    else:
        y = _draw_herm(rng, dim)
    gap = abs(positive_eigsum(x.entries) - positive_eigsum(y.entries))
    bound = trace_norm(x - y)
    denom = trace_norm(x) + trace_norm(y) + np.finfo(float).tiny
    return (gap - bound) / denom, tol


def trial_self_adjointness(seed, dims=DEFAULT_DIMS, tol=1e-9, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    a = _draw_herm(rng, dim)
    x = _draw_herm(rng, dim)
    b = _draw_pd(rng, dim)
    da = dlog_daleckii_krein(b, x)
    dx = dlog_daleckii_krein(b, a)
    lhs = hs_inner(a, da)
    rhs = hs_inner(x, dx)
    scale = max(
        1.0,
        a.frobenius_norm() * da.frobenius_norm(),
        x.frobenius_norm() * dx.frobenius_norm(),
    )
    return abs(lhs - rhs) / scale, tol


def trial_dominated_quotient_bound(seed, dims=DEFAULT_DIMS, tol=1e-9, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    a = _draw_psd(rng, dim)
    b = _draw_pd(rng, dim)
    x = _draw_herm(rng, dim)
    pencil = pencil_eigenvalues(a, b)
    gamma = float(rng.uniform(0.0, 2.0 * max(1.0, pencil[-1])))
    t = float(rng.uniform(-1.0, 1.0))
    e1 = positive_eigsum(a.entries - gamma * (b.entries + t * x.entries))
    e0 = positive_eigsum(a.entries - gamma * b.entries)
    bound = abs(t) * gamma * trace_norm(x)
    scale = max(1.0, bound, abs(e0), abs(e1))
    return (abs(e1 - e0) - bound * (1.0 + 1e-9)) / scale, tol


def trial_mixed_partials(seed, dims=DEFAULT_DIMS, tol=1e-6, cfg=None):
    rng = np.random.default_rng(seed)
    dim = _draw_dim(rng, dims)
    b = _draw_pd(rng, dim)
    x = _draw_herm(rng, dim)
    hdir = _draw_herm(rng, dim)
    b_min = float(np.linalg.eigvalsh(b.entries)[0])
    hs = _pd_safe_step(1e-3, b_min, operator_norm(x))
    ht = _pd_safe_step(7e-4, b_min, operator_norm(hdir))

    def logm(arr):
        w, v = np.linalg.eigh(arr)
        return (v * np.log(w)) @ v.conj().T

    def f(sv, tv):
        return float(
            np.trace((b.entries + sv * x.entries) @ logm(b.entries + tv * hdir.entries)).real
        )

    f_pp = f(hs, ht)
    f_pm = f(hs, -ht)
    f_mp = f(-hs, ht)
    f_mm = f(-hs, -ht)
    order_st = ((f_pp - f_mp) - (f_pm - f_mm)) / (4.0 * hs * ht)
    order_ts = ((f_pp - f_pm) - (f_mp - f_mm)) / (4.0 * hs * ht)

    def d(sv, tv):
        return umegaki(
            HermitianMatrix(b.entries + sv * x.entries),
            HermitianMatrix(b.entries + tv * hdir.entries),
        )

    mixed_d = -((d(hs, ht) - d(hs, -ht)) - (d(-hs, ht) - d(-hs, -ht))) / (4.0 * hs * ht)
    rhs = hs_inner(x, dlog_daleckii_krein(b, hdir))
    scale = max(1.0, abs(rhs))
    residual = max(abs(order_st - order_ts), abs(order_st - rhs), abs(mixed_d - rhs)) / scale
    c = 10.0 * max(operator_norm(x), operator_norm(hdir)) ** 3 / b_min**3
    return residual, max(tol, c * max(hs, ht) ** 2 / scale)


_TRIAL_BODIES = {
    "equivalence_chain": trial_equivalence_chain,
    "derivative_identity": trial_derivative_identity,
    "hockey_stick_partials": trial_hockey_stick_partials,
    "lemma_differentiability": trial_lemma_differentiability,
    "lipschitz": trial_lipschitz,
    "self_adjointness": trial_self_adjointness,
    "dominated_quotient_bound": trial_dominated_quotient_bound,
    "mixed_partials": trial_mixed_partials,
}


def run_single_trial(check, seed, dims=DEFAULT_DIMS, tol=None, cfg=None):
    """Replay one trial by its recorded seed.

    Returns the raw (residual, trial_tolerance) pair, or a tuple of
    three such pairs for equivalence_chain; the trial failed iff
    residual > trial_tolerance.
    """
    if check not in _TRIAL_BODIES:
        raise InputError(f"unknown check {check!r}; known: {tuple(sorted(_TRIAL_BODIES))}")
    if tol is None:
        tol = DEFAULT_TOLERANCES[check]
    return _TRIAL_BODIES[check](seed, dims=dims, tol=tol, cfg=cfg)


# ---------------------------------------------------------------------------
# Checks (public wrappers producing VerificationReports)


def _run_check(name, trials, tol, dims, cfg, seed) -> VerificationReport:
    body = _TRIAL_BODIES[name]
    seeds = [trial_seed(seed, name, i) for i in range(trials)]
    t0 = time.perf_counter()
    outcomes = _map_trials(lambda s: body(s, dims=dims, tol=tol, cfg=cfg), seeds)
    wall_ms = (time.perf_counter() - t0) * 1e3
    return _aggregate(name, seeds, outcomes, tol, wall_ms)


def check_equivalence_chain(
    dims=DEFAULT_DIMS, trials=100, tol=1e-6, cfg=None, seed=0
) -> tuple:
    """The three-way equivalence, each route against its ground truth.

    (iii) the gamma-form integral against the spectral relative entropy,
    (ii) the one-sided layer cake against the closed form for PSD
    directions, (i) the two-sided layer cake for general Hermitian
    directions.  Three reports, one instance triple per trial.
    """
    names = (
        "equivalence_frenkel_vs_umegaki",
        "equivalence_positive_vs_daleckii_krein",
        "equivalence_two_sided_vs_daleckii_krein",
    )
    seeds = [trial_seed(seed, "equivalence_chain", i) for i in range(trials)]
    t0 = time.perf_counter()
    outcomes = _map_trials(
        lambda s: trial_equivalence_chain(s, dims=dims, tol=tol, cfg=cfg), seeds
    )
    wall_ms = (time.perf_counter() - t0) * 1e3
    return tuple(
        _aggregate(name, seeds, [o[k] for o in outcomes], tol, wall_ms)
        for k, name in enumerate(names)
    )


def check_derivative_identity(trials=100, tol=1e-6, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """d/dt D(A||B+tX) at t=0 equals -Tr[A Dlog[B](X)] + Tr[X]."""
    return _run_check("derivative_identity", trials, tol, dims, cfg, seed)


def check_hockey_stick_partials(trials=100, tol=1e-6, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """FD partials of the hockey-stick divergence against the projection traces."""
    return _run_check("hockey_stick_partials", trials, tol, dims, cfg, seed)


def check_lemma_differentiability(trials=100, tol=1e-6, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """d/dt Tr[(K - tL)_+] = -Tr[L {K > tL}] away from singular t."""
    return _run_check("lemma_differentiability", trials, tol, dims, cfg, seed)


def check_lipschitz(trials=1000, tol=1e-9, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """|Tr[X_+] - Tr[Y_+]| <= |X - Y|_1, including nearly-equal pairs."""
    return _run_check("lipschitz", trials, tol, dims, cfg, seed)


def check_self_adjointness(trials=100, tol=1e-9, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """<A, Dlog[B](X)> = <X, Dlog[B](A)> in the Hilbert-Schmidt inner product."""
    return _run_check("self_adjointness", trials, tol, dims, cfg, seed)


def check_dominated_quotient_bound(trials=100, tol=1e-9, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """|Tr[(A-g(B+tX))_+] - Tr[(A-gB)_+]| <= |t| g |X|_1 on arbitrary draws.

    The everywhere-valid Lipschitz consequence dominating the difference
    quotients; unlike the derivative checks it needs no singular-set
    avoidance.
    """
    return _run_check("dominated_quotient_bound", trials, tol, dims, cfg, seed)


def check_mixed_partials(trials=100, tol=1e-6, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """Mixed second differences of Tr[(B+sX) log(B+tH)] in both orders.

    Both orders must agree (Schwarz), and both must reproduce
    Tr[X Dlog[B](H)]; so must the mixed difference of -D(B+sX||B+tH),
    whose extra terms carry no mixed dependence.
    """
    return _run_check("mixed_partials", trials, tol, dims, cfg, seed)


# ---------------------------------------------------------------------------
# Order-2 convergence probe


def order2_convergence_ratios(instances=10, seed=0, h=1e-2) -> list:
    """Residual ratios err(h)/err(h/2) of the FD probes on tame instances.

    Instances are drawn well-conditioned (eigenvalues bounded away from
    zero and infinity) so truncation dominates roundoff; central
    differences should then decay by a factor of about 4 per halving.
    Two ratios per instance: the relative-entropy derivative identity
    and the positive-part trace derivative.
    """
    ratios = []
    for i in range(instances):
        rng = np.random.default_rng(trial_seed(seed, "convergence_probe", i))
        dim = 2 + int(rng.integers(4))

        def norm_herm():
            g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            m = g + g.conj().T
            return m / max(np.abs(np.linalg.eigvalsh(m)).max(), 1e-12)

        b = HermitianMatrix(np.eye(dim) + 0.3 * norm_herm())
        a = HermitianMatrix(np.eye(dim) + 0.45 * norm_herm())
        x = HermitianMatrix(norm_herm())
        rhs = -hs_inner(a, dlog_daleckii_krein(b, x)) + x.trace()

        def deriv_err(step):
            lhs = (
                umegaki(a, HermitianMatrix(b.entries + step * x.entries))
                - umegaki(a, HermitianMatrix(b.entries - step * x.entries))
            ) / (2.0 * step)
            return abs(lhs - rhs)

        ratios.append(deriv_err(h) / deriv_err(h / 2.0))

        # For the positive-part trace the probe point must see an
        # intermediate-rank projector: with all (or no) eigenvalues of
        # K - tL positive the trace is locally linear in t and central
        # differences are exact, leaving no truncation error to decay.
        for _ in range(100):
            k = norm_herm()
            l = norm_herm()
            gen = np.linalg.eigvals(np.linalg.solve(l, k))
            singular = [float(g.real) for g in gen if abs(g.imag) <= 1e-9 * (abs(g) + 1.0)]
            t = _draw_avoiding(rng, -1.5, 1.5, singular, 0.05)
            w = np.linalg.eigvalsh(k - t * l)
            if not 0 < int((w > 0).sum()) < dim:
                continue
            lemma_rhs = -_hs_raw(l, positive_projector_array(k - t * l))

            def lemma_err(step):
                fd = (
                    positive_eigsum(k - (t + step) * l)
                    - positive_eigsum(k - (t - step) * l)
                ) / (2.0 * step)
                return abs(fd - lemma_rhs)

            if lemma_err(h / 2.0) > 1e-12:
                ratios.append(lemma_err(h) / lemma_err(h / 2.0))
                break
        else:
            raise InputError("could not draw a curved instance for the probe")
    return ratios


def check_convergence_probe(trials=10, tol=1.0, dims=DEFAULT_DIMS, cfg=None, seed=0):
    """Order-2 decay of FD residuals: halving ratio within [3, 5] per instance."""
    t0 = time.perf_counter()
    ratios = order2_convergence_ratios(instances=trials, seed=seed)
    wall_ms = (time.perf_counter() - t0) * 1e3
    seeds = [trial_seed(seed, "convergence_probe", i) for i in range(trials)]
    outcomes = [
        (max(abs(r - 4.0) for r in ratios[2 * i : 2 * i + 2]), tol) for i in range(trials)
    ]
    return _aggregate("convergence_probe", seeds, outcomes, tol, wall_ms)


# ---------------------------------------------------------------------------
# Suite runner

_CHECK_RUNNERS = {
    "equivalence_chain": check_equivalence_chain,
    "derivative_identity": check_derivative_identity,
    "hockey_stick_partials": check_hockey_stick_partials,
    "lemma_differentiability": check_lemma_differentiability,
    "lipschitz": check_lipschitz,
    "self_adjointness": check_self_adjointness,
    "dominated_quotient_bound": check_dominated_quotient_bound,
    "mixed_partials": check_mixed_partials,
    "convergence_probe": check_convergence_probe,
}


def registered_checks() -> tuple:
    return tuple(sorted(_CHECK_RUNNERS))


def run_suite(
    names="all",
    dims=DEFAULT_DIMS,
    trials: int = 100,
    seed: int = 42,
    tol: float | None = None,
    cfg: QuadratureConfig | None = None,
) -> list:
    """Run the named checks; deterministic given seed.

    tol=None applies each check's stated default tolerance; a float
    overrides all of them.  Reports come back sorted by check name.
    """
    if names == "all":
        selected = list(registered_checks())
    else:
        selected = list(names)
        unknown = [n for n in selected if n not in _CHECK_RUNNERS]
        if unknown:
            raise InputError(
                f"unknown checks {unknown}; registered: {registered_checks()}"
            )

    reports = []
    for name in selected:
        check_tol = tol if tol is not None else DEFAULT_TOLERANCES[name]
        out = _CHECK_RUNNERS[name](trials=trials, tol=check_tol, dims=dims, cfg=cfg, seed=seed)
        if isinstance(out, tuple):
            reports.extend(out)
        else:
            reports.append(out)
    return sorted(reports, key=lambda r: r.check_name)
