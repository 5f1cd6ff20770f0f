"""Command-line front end.

Exit codes: 0 success, 1 selfcheck failure, 2 invalid parameters,
3 non-existence, 4 bracket failure, 5 invariant violation during a sweep.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import numpy as np

from .nonlinearity import (
    TANGENT_TOL,
    DomainError,
    DoublePowerParams,
    TriplePowerParams,
    classify_triple,
    eta_crit,
    omega_crit,
    tangent_point,
)
from .selfcheck import run_selfcheck
from .shooting import (
    BracketFailure,
    NoExistence,
    ShootingConfig,
    find_ground_state,
    uniqueness_scan,
)

log = logging.getLogger("doublepower")

EXIT_OK = 0
EXIT_SELFCHECK = 1
EXIT_INVALID = 2
EXIT_NO_EXISTENCE = 3
EXIT_BRACKET = 4
EXIT_INVARIANT = 5

SWEEP_HEADER = ("p", "q", "omega_crit", "eta_crit", "gap")
PROFILE_HEADER = ("r", "u", "du")


class InvalidRange(ValueError):
    pass


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(x, ".17g")


def parse_range(text: str) -> list[float]:
    """``min:max:count`` with inclusive endpoints."""
    try:
        lo_s, hi_s, n_s = text.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        raise InvalidRange(f"malformed range {text!r}, expected min:max:count") from None
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise InvalidRange(f"range bounds must be finite: {text!r}")
    if n < 1:
        raise InvalidRange(f"count must be >= 1: {text!r}")
    if hi < lo:
        raise InvalidRange(f"descending range {text!r}")
    if n == 1:
        if hi != lo:
            raise InvalidRange(f"count 1 requires min == max: {text!r}")
        return [lo]
    if hi == lo:
        raise InvalidRange(f"count > 1 requires min < max: {text!r}")
    return [float(v) for v in np.linspace(lo, hi, n)]


def threshold_row(p: float, q: float) -> dict:
    w, e = omega_crit(p, q), eta_crit(p, q)
    return {"p": p, "q": q, "omega_crit": w, "eta_crit": e, "gap": e - w}


def _emit(record: dict, output: str, out=None) -> None:
    out = out or sys.stdout
    if output == "json":
        print(json.dumps(record), file=out)
        return
    width = max(len(k) for k in record)
    for k, v in record.items():
        v = fmt(v) if isinstance(v, float) else v
        print(f"{k:<{width}}  {v}", file=out)


def cmd_thresholds(args) -> int:
    _emit(threshold_row(args.p, args.q), args.output)
    return EXIT_OK


def cmd_classify(args) -> int:
    tp = TriplePowerParams(args.a, args.b, args.c, args.p, args.q, args.r)
    if args.show_config:
        _emit({"tangent_tol": args.tangent_tol}, args.output)
        return EXIT_OK
    sc = classify_triple(tp, args.tangent_tol)
    _emit(
        {
            "case": sc.case.value,
            "a_crit": sc.a_crit,
            "margin": sc.margin,
            "tangent_point": tangent_point(tp),
        },
        args.output,
    )
    return EXIT_OK


def _config_from(args) -> ShootingConfig:
    return ShootingConfig(
        n=args.n,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        h0=args.h0,
        r_max=args.r_max,
        alpha_tol=args.alpha_tol,
        conv_eps=args.conv_eps,
        max_bisect=args.max_bisect,
        max_steps=args.max_steps,
        probe_points=args.probe_points,
    )


def write_profile(path: str, profile: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PROFILE_HEADER)
        for row in profile:
            w.writerow([fmt(float(v)) for v in row])


def cmd_shoot(args) -> int:
    dp = DoublePowerParams(args.omega, args.p, args.q)
    cfg = _config_from(args)
    if args.show_config:
        print(json.dumps(cfg.resolved(dp), indent=2))
        return EXIT_OK
    try:
        gs = find_ground_state(dp, cfg)
    except NoExistence:
        print(
            f"no existence: omega >= omega_crit ({args.omega!r} >= {omega_crit(args.p, args.q)!r})",
            file=sys.stderr,
        )
        return EXIT_NO_EXISTENCE
    except BracketFailure as exc:
        print(f"bracket failure: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    rec = {
        "omega": dp.omega,
        "p": dp.p,
        "q": dp.q,
        "n": cfg.n,
        "alpha": gs.alpha,
        "bracket_low": gs.bracket[0],
        "bracket_high": gs.bracket[1],
        "max_residual": gs.residuals,
        "bisections": gs.bisections,
        "profile_points": int(gs.profile.shape[0]),
        "profile_r_end": float(gs.profile[-1, 0]),
        "profile_u_end": float(gs.profile[-1, 1]),
    }
    if args.profile:
        write_profile(args.profile, gs.profile)
    _emit(rec, args.output)
    if args.scan:
        try:
            rep = uniqueness_scan(dp, cfg, args.scan, workers=args.workers)
        except BracketFailure as exc:
            print(f"bracket failure: {exc}", file=sys.stderr)
            return EXIT_BRACKET
        kinds = rep.kinds
        scan = {
            "scan_grid_size": len(rep.grid),
            "scan_low": float(rep.grid[0]),
            "scan_high": float(rep.grid[-1]),
            "transitions": rep.transitions,
        }
        for k in sorted({k.value for k in kinds}):
            scan[f"count_{k}"] = sum(x.value == k for x in kinds)
        _emit(scan, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        ps, qs = parse_range(args.p), parse_range(args.q)
    except InvalidRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if min(ps) <= 1 or min(qs) <= 1:
        print("error: ranges must lie in (1, inf)", file=sys.stderr)
        return EXIT_INVALID
    if args.show_config:
        print(json.dumps({"p": ps, "q": qs, "output": args.output, "workers": args.workers}))
        return EXIT_OK
    cells = [(p, q) for p in ps for q in qs if p < q]
    if args.workers > 1:
        with ThreadPoolExecutor(args.workers) as pool:
            rows = list(pool.map(lambda c: threshold_row(*c), cells))
    else:
        rows = [threshold_row(p, q) for p, q in cells]
    for row in rows:
        if not row["gap"] > 0:
            print(f"invariant violation: gap <= 0 at p={fmt(row['p'])}, q={fmt(row['q'])}", file=sys.stderr)
            return EXIT_INVARIANT

    out = open(args.file, "w", newline="") if args.file else sys.stdout
    try:
        if args.output == "json":
            for row in rows:
                print(json.dumps(row), file=out)
        else:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(SWEEP_HEADER)
            for row in rows:
                w.writerow([fmt(row[k]) for k in SWEEP_HEADER])
    finally:
        if args.file:
            out.close()
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    if args.show_config:
        print(json.dumps({"seed": args.seed, "cases": args.cases}))
        return EXIT_OK
    if args.cases <= 0:
        log.warning("selfcheck: --cases %d runs no checks; passing vacuously", args.cases)
    results = run_selfcheck(args.seed, args.cases)
    width = max([len(r.name) for r in results], default=0)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  cases={r.cases}  {r.detail}")
    ok = all(r.passed for r in results)
    print(f"selfcheck: {'all passed' if ok else 'FAILED'} ({len(results)} checks)")
    return EXIT_OK if ok else EXIT_SELFCHECK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="doublepower",
        description="Thresholds, sign classification and ground states for double-power nonlinearities.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def out_flag(sp, choices=("text", "json"), default="text"):
        sp.add_argument("--output", choices=choices, default=default)

    sp = sub.add_parser("thresholds", help="omega_crit and eta_crit for exponents p < q")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    out_flag(sp)
    sp.set_defaults(func=cmd_thresholds)

    sp = sub.add_parser("classify", help="sign class of -a u^p + b u^q - c u^r")
    for name in "abcpqr":
        sp.add_argument(f"--{name}", type=float, required=True)
    sp.add_argument("--tangent-tol", type=float, default=TANGENT_TOL)
    sp.add_argument("--show-config", action="store_true")
    out_flag(sp)
    sp.set_defaults(func=cmd_classify)

    d = ShootingConfig()
    sp = sub.add_parser("shoot", help="ground state of the radial equation by shooting")
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--n", type=int, default=d.n)
    sp.add_argument("--rel-tol", type=float, default=d.rel_tol)
    sp.add_argument("--abs-tol", type=float, default=d.abs_tol)
    sp.add_argument("--h0", type=float, default=d.h0, help="start offset (default: derived)")
    sp.add_argument("--r-max", type=float, default=d.r_max, help="horizon (default: 40/sqrt(omega))")
    sp.add_argument("--alpha-tol", type=float, default=d.alpha_tol)
    sp.add_argument("--conv-eps", type=float, default=d.conv_eps)
    sp.add_argument("--max-bisect", type=int, default=d.max_bisect)
    sp.add_argument("--max-steps", type=int, default=d.max_steps)
    sp.add_argument("--probe-points", type=int, default=d.probe_points)
    sp.add_argument("--profile", metavar="FILE", help="write the (r, u, du) profile as CSV")
    sp.add_argument("--scan", type=int, default=0, metavar="N", help="append an N-point uniqueness scan")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--show-config", action="store_true")
    out_flag(sp)
    sp.set_defaults(func=cmd_shoot)

    sp = sub.add_parser("sweep", help="omega_crit / eta_crit over a (p, q) grid")
    sp.add_argument("--p", required=True, metavar="MIN:MAX:COUNT")
    sp.add_argument("--q", required=True, metavar="MIN:MAX:COUNT")
    sp.add_argument("--file", metavar="PATH", help="write to PATH instead of stdout")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--show-config", action="store_true")
    out_flag(sp, ("csv", "json"), "csv")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("selfcheck", help="run the embedded invariant suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=1000)
    sp.add_argument("--show-config", action="store_true")
    sp.set_defaults(func=cmd_selfcheck)
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
