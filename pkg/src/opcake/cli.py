"""Command-line front end.

Subcommands:
  compute relent        relative entropy of two matrix files by any method
  compute dlog          derivative of log at B in direction H by any route
  compute hockey-stick  E_gamma(A||B) at a given gamma
  verify                run verification suites, write a JSON report
  sweep                 tabulate a quantity over a gamma grid as CSV

Matrices travel as JSON files {"dim": n, "entries": [[re, im], ...]}
(row-major, one [re, im] pair per entry).  Exit codes: 0 success,
1 verification failures, 2 malformed input or contract violation,
3 numerical failure / tolerance not met.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .divergences import hockey_stick, relative_entropy
from .errors import InputError, NumericalFailure, ToleranceNotMet
from .frechet import dlog_daleckii_krein, dlog_finite_difference
from .layercake import layer_cake_two_sided
from .quadrature import QuadratureConfig
from .spectral import HermitianMatrix, projection_gt
from .verify import DEFAULT_DIMS, registered_checks, reports_to_json, run_suite

RELENT_METHODS = {
    "umegaki": "umegaki",
    "frenkel-gamma": "frenkel_gamma",
    "frenkel-t": "frenkel_t",
}
DLOG_METHODS = ("daleckii-krein", "layer-cake", "finite-diff")
SWEEP_QUANTITIES = ("hockey-stick", "frenkel-integrand", "projection-rank")


# ---------------------------------------------------------------------------
# Matrix file I/O


def matrix_to_obj(m: HermitianMatrix) -> dict:
    """Serialize to the wire format; floats keep shortest round-trip form."""
    entries = [[float(z.real), float(z.imag)] for z in m.entries.ravel()]
    return {"dim": m.dim, "entries": entries}


def matrix_from_obj(obj) -> HermitianMatrix:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise InputError("matrix object must have 'dim' and 'entries' fields")
    dim = obj["dim"]
    entries = obj["entries"]
    if not isinstance(dim, int) or dim < 1:
        raise InputError("'dim' must be a positive integer")
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise InputError(f"'entries' must hold dim^2 = {dim * dim} pairs")
    flat = []
    for pair in entries:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise InputError("each entry must be a [re, im] pair")
        flat.append(complex(float(pair[0]), float(pair[1])))
    return HermitianMatrix(np.array(flat, dtype=complex).reshape(dim, dim))


def load_matrix(path: str) -> HermitianMatrix:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return matrix_from_obj(obj)


def save_matrix(m: HermitianMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(matrix_to_obj(m), fh)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Config handling: defaults < --config file < explicit flags.

_CONFIG_FIELDS = ("abs_tol", "rel_tol", "matrix_abs_tol", "max_subdivisions", "nodes_per_panel")


def quad_config_from_args(args) -> QuadratureConfig:
    values = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise InputError("config file must hold a JSON object")
        unknown = set(raw) - set(_CONFIG_FIELDS)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)
    for name in _CONFIG_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return QuadratureConfig(**values)


def _add_quad_flags(parser):
    parser.add_argument("--config", help="JSON file overriding quadrature defaults")
    parser.add_argument("--abs-tol", dest="abs_tol", type=float)
    parser.add_argument("--rel-tol", dest="rel_tol", type=float)
    parser.add_argument("--matrix-abs-tol", dest="matrix_abs_tol", type=float)
    parser.add_argument("--max-subdivisions", dest="max_subdivisions", type=int)
    parser.add_argument("--nodes-per-panel", dest="nodes_per_panel", type=int)


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_relent(args) -> int:
    a = load_matrix(args.a)
    b = load_matrix(args.b)
    cfg = quad_config_from_args(args)
    report = relative_entropy(a, b, RELENT_METHODS[args.method], cfg)
    out = {"value": report.value, "method": args.method, "warnings": list(report.warnings)}
    if report.quadrature is not None:
        out["error_estimate"] = report.quadrature.error_estimate
    if report.branches:
        out["branches"] = report.branches
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_dlog(args) -> int:
    b = load_matrix(args.b)
    h = load_matrix(args.h)
    cfg = quad_config_from_args(args)
    out = {"method": args.method, "warnings": []}
    if args.method == "daleckii-krein":
        result = dlog_daleckii_krein(b, h)
    elif args.method == "finite-diff":
        result = dlog_finite_difference(b, h, args.step)
    else:
        qr = layer_cake_two_sided(b, h, cfg)
        result = qr.value
        out["error_estimate"] = qr.error_estimate
    out["matrix"] = matrix_to_obj(result)
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_hockey_stick(args) -> int:
    a = load_matrix(args.a)
    b = load_matrix(args.b)
    value = hockey_stick(a, b, args.gamma)
    print(json.dumps({"value": value, "gamma": args.gamma}, sort_keys=True))
    return 0


def _parse_dims(spec: str):
    try:
        lo, hi = spec.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise InputError(f"--dims expects LO..HI, got {spec!r}") from exc
    if not 1 <= lo <= hi:
        raise InputError(f"--dims range {spec!r} is empty or out of order")
    return tuple(range(lo, hi + 1))


def _cmd_verify(args) -> int:
    cfg = quad_config_from_args(args)
    if args.suite == "all":
        names = "all"
    else:
        names = tuple(s.strip() for s in args.suite.split(",") if s.strip())
        unknown = [n for n in names if n not in registered_checks()]
        if unknown:
            raise InputError(f"unknown suite names {unknown}; known: {registered_checks()}")
    dims = _parse_dims(args.dims) if args.dims else DEFAULT_DIMS
    reports = run_suite(
        names, dims=dims, trials=args.trials, seed=args.seed, tol=args.tol, cfg=cfg
    )
    payload = reports_to_json(reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    failures = sum(r.failures for r in reports)
    for r in reports:
        status = "ok" if r.failures == 0 else f"{r.failures} FAILURES"
        print(
            f"{r.check_name}: {status} (trials={r.trials}, "
            f"max_residual={r.max_residual:.3e}, tolerance={r.tolerance:g})",
            file=sys.stderr,
        )
    return 0 if failures == 0 else 1


def _sweep_value(quantity, a, b, gamma) -> float:
    if quantity == "hockey-stick":
        return hockey_stick(a, b, gamma)
    if quantity == "frenkel-integrand":
        return hockey_stick(a, b, gamma) / gamma + hockey_stick(b, a, gamma) / gamma**2
    return float(projection_gt(a, b, gamma).rank)


def _cmd_sweep(args) -> int:
    if args.points < 2:
        raise InputError("--points must be at least 2")
    if not args.gamma_min < args.gamma_max:
        raise InputError("--gamma-min must be below --gamma-max")
    if args.quantity == "frenkel-integrand" and args.gamma_min <= 0:
        raise InputError("frenkel-integrand requires gamma-min > 0")
    a = load_matrix(args.a)
    b = load_matrix(args.b)
    grid = np.linspace(args.gamma_min, args.gamma_max, args.points)
    lines = ["gamma,value"]
    for g in grid:
        lines.append(f"{float(g)!r},{_sweep_value(args.quantity, a, b, float(g))!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opcake",
        description="Operator layer cake integrals, hockey-stick divergences, "
        "and integral formulas for quantum relative entropy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="compute a divergence or derivative")
    csub = compute.add_subparsers(dest="what", required=True)

    relent = csub.add_parser("relent", help="relative entropy D(A||B)")
    relent.add_argument("--a", required=True, help="matrix file for A (PSD)")
    relent.add_argument("--b", required=True, help="matrix file for B (PD)")
    relent.add_argument("--method", choices=sorted(RELENT_METHODS), default="umegaki")
    _add_quad_flags(relent)
    relent.set_defaults(func=_cmd_relent)

    dlog = csub.add_parser("dlog", help="derivative of log at B in direction H")
    dlog.add_argument("--b", required=True, help="matrix file for B (PD)")
    dlog.add_argument("--h", required=True, help="matrix file for the direction H")
    dlog.add_argument("--method", choices=DLOG_METHODS, default="daleckii-krein")
    dlog.add_argument("--step", type=float, help="finite-difference step override")
    _add_quad_flags(dlog)
    dlog.set_defaults(func=_cmd_dlog)

    hs = csub.add_parser("hockey-stick", help="E_gamma(A||B)")
    hs.add_argument("--a", required=True)
    hs.add_argument("--b", required=True)
    hs.add_argument("--gamma", type=float, required=True)
    hs.set_defaults(func=_cmd_hockey_stick)

    verify = sub.add_parser("verify", help="run verification suites")
    verify.add_argument("--suite", default="all", help="'all' or comma-separated check names")
    verify.add_argument("--dims", help="dimension range LO..HI (default 1..6)")
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--tol", type=float, help="override every check tolerance")
    verify.add_argument("--out", help="write the JSON report here instead of stdout")
    _add_quad_flags(verify)
    verify.set_defaults(func=_cmd_verify)

    sweep = sub.add_parser("sweep", help="tabulate a quantity over a gamma grid")
    sweep.add_argument("--a", required=True)
    sweep.add_argument("--b", required=True)
    sweep.add_argument("--quantity", choices=SWEEP_QUANTITIES, required=True)
    sweep.add_argument("--gamma-min", dest="gamma_min", type=float, required=True)
    sweep.add_argument("--gamma-max", dest="gamma_max", type=float, required=True)
    sweep.add_argument("--points", type=int, required=True)
    sweep.add_argument("--out", help="write CSV here instead of stdout")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed a message; normalize bad-flag exits to 2
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, ToleranceNotMet) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
