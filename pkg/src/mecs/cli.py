"""Command-line interface.

    mecs measure   --p 0.5 --theta 0 --n 3
    mecs sweep     --n 3 --p-steps 100 --theta-steps 60 --out concurrence.csv
    mecs simulate  --alpha 1 --tau 1.5707963 --n 3 --pattern 000 --sign +
    mecs solve-max --n 3 --theta-pi 0.5
    mecs verify    --suite all

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import measures as ms
from .errors import MecsError
from .protocol import (
    GeneralizedBellOutcome,
    ProtocolParams,
    bell_measure,
    product_state,
    sample_outcome,
)
from .coherent import inner_product
from .states import MecsSpec, build_mecs
from .verify import SUITES, run_suite, summary

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

ORACLE_TOL = 1e-9
# simulate reports a MECS fidelity when tau is this close to pi/2
TAU_HALF_PI_TOL = 1e-6


class UsageError(Exception):
    pass


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


def _theta(args) -> float:
    if args.theta_pi is not None:
        return math.pi * args.theta_pi
    if args.theta is None:
        raise UsageError("one of --theta / --theta-pi is required")
    return args.theta


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _add_theta(parser: argparse.ArgumentParser) -> None:
    g = parser.add_mutually_exclusive_group()
    g.add_argument("--theta", type=float, help="relative phase in radians")
    g.add_argument("--theta-pi", type=float, help="relative phase as a multiple of pi")


def _emit(obj: dict) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


# -- subcommands -----------------------------------------------------------------


def cmd_measure(args) -> int:
    theta = _theta(args)
    if args.alpha is not None:
        spec = MecsSpec.from_alpha(complex(args.alpha), theta, args.n)
    else:
        spec = MecsSpec.from_p(args.p, theta, args.n)
    report = ms.measure_report(spec, k=args.split, oracles=not args.no_oracle)
    out = report.to_dict()
    if args.alpha is not None:
        a = complex(args.alpha)
        out["alpha"] = [a.real, a.imag]
    _emit(out)
    bad = [k for k, v in report.oracle_deltas.items() if not v < ORACLE_TOL]
    if bad:
        print(f"oracle mismatch: {', '.join(bad)}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def sweep_rows(ps, thetas, ns):
    """Rows ordered p outer, then N, then theta innermost."""
    for p in ps:
        for n in ns:
            for theta in thetas:
                spec = MecsSpec.from_p(p, theta, n)
                try:
                    tangle = ms.n_tangle_closed(spec)
                except MecsError:
                    tangle = None
                yield p, theta, n, ms.pair_concurrence_closed(spec), tangle


def cmd_sweep(args) -> int:
    if args.p_steps < 2:
        raise UsageError("--p-steps must be at least 2")
    if not 0.0 < args.p_max <= 1.0:
        raise UsageError("--p-max must lie in (0, 1]")
    ps = [float(x) for x in np.linspace(0.0, args.p_max, args.p_steps)]
    if args.theta_list is not None or args.n_list is not None:
        if args.theta_list is None or args.n_list is None:
            raise UsageError("--theta-list and --n-list go together")
        thetas = _float_list(args.theta_list)
        if args.theta_in_pi:
            thetas = [math.pi * t for t in thetas]
        ns = _int_list(args.n_list)
    else:
        if args.n is None or args.theta_steps is None:
            raise UsageError("grid mode needs --n and --theta-steps")
        if args.theta_steps < 1:
            raise UsageError("--theta-steps must be positive")
        # theta_j = 2 pi j / steps; an even step count puts theta = pi on the grid exactly
        thetas = [math.pi * (2 * j / args.theta_steps) for j in range(args.theta_steps)]
        ns = [args.n]
    if any(n < 2 for n in ns):
        raise UsageError("N must be at least 2")
    rows = list(sweep_rows(ps, thetas, ns))
    try:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["p", "theta", "n", "concurrence", "n_tangle"])
            for p, theta, n, c, t in rows:
                w.writerow([_fmt(p), _fmt(theta), n, _fmt(c), _fmt(t)])
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def _describe(state) -> list[dict]:
    return [
        {"coeff": [c.real, c.imag], "labels": [[z.real, z.imag] for z in labels]}
        for c, labels in state.terms()
    ]


def cmd_simulate(args) -> int:
    params = ProtocolParams(complex(args.alpha), args.tau, args.n)
    state = product_state(params)
    if args.pattern is not None:
        if len(args.pattern) != args.n:
            raise UsageError(f"--pattern must have {args.n} bits")
        result = bell_measure(state, GeneralizedBellOutcome.canonical(args.pattern, args.sign))
    else:
        if args.seed is None:
            raise UsageError("sampling an outcome requires --seed (or give --pattern)")
        result = sample_outcome(state, np.random.default_rng(args.seed))
    out = {
        "alpha": [params.alpha.real, params.alpha.imag],
        "tau": params.tau,
        "n": params.parties,
        "outcome": {"pattern": result.outcome.pattern, "sign": "+" if result.outcome.sign > 0 else "-"},
        "probability": result.probability,
        "status": "ok" if result.possible else "zero-probability",
        "collapsed": None,
        "fidelity": None,
    }
    if result.possible:
        out["collapsed"] = _describe(result.collapsed)
        if abs(params.tau - math.pi / 2) <= TAU_HALF_PI_TOL and set(result.outcome.pattern) == {"0"}:
            theta = 0.0 if result.outcome.sign > 0 else math.pi
            target = build_mecs(MecsSpec.from_alpha(1j * params.alpha, theta, params.parties))
            out["fidelity"] = abs(inner_product(target, result.collapsed)) ** 2
    _emit(out)
    return EXIT_OK


def cmd_solve_max(args) -> int:
    res = ms.solve_max_p(args.n, _theta(args))
    _emit({"n": args.n, "theta": _theta(args), "p_star": res.p_star, "c_star": res.c_star, "boundary": res.boundary})
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite)
    report = summary(checks)
    report["suite"] = args.suite
    _emit(report)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: delta={c.delta:.3e} tol={c.tolerance:.0e}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAILED


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mecs", description="Entanglement of multipartite entangled coherent states")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", help="closed-form measures with numerical cross-checks")
    amp = m.add_mutually_exclusive_group(required=True)
    amp.add_argument("--alpha", type=complex, help="coherent amplitude (complex allowed, e.g. 1+0.5j)")
    amp.add_argument("--p", type=float, help="overlap exp(-2|alpha|^2) in [0, 1]")
    _add_theta(m)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--split", type=int, default=1, help="size k of the first block (default 1)")
    m.add_argument("--no-oracle", action="store_true")
    m.set_defaults(func=cmd_measure)

    s = sub.add_parser("sweep", help="write a concurrence / N-tangle grid as CSV")
    s.add_argument("--n", type=int)
    s.add_argument("--p-steps", type=int, default=100)
    s.add_argument("--p-max", type=float, default=0.999)
    s.add_argument("--theta-steps", type=int)
    s.add_argument("--theta-list", help="comma-separated phases")
    s.add_argument("--theta-in-pi", action="store_true", help="read --theta-list as multiples of pi")
    s.add_argument("--n-list", help="comma-separated party counts")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    sim = sub.add_parser("simulate", help="entanglement swapping onto N modes")
    sim.add_argument("--alpha", type=complex, required=True)
    sim.add_argument("--tau", type=float, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--pattern")
    sim.add_argument("--sign", choices=["+", "-"], default="+")
    sim.add_argument("--seed", type=int)
    sim.set_defaults(func=cmd_simulate)

    sm = sub.add_parser("solve-max", help="overlap maximizing the pair concurrence")
    sm.add_argument("--n", type=int, required=True)
    _add_theta(sm)
    sm.set_defaults(func=cmd_solve_max)

    v = sub.add_parser("verify", help="run cross-check suites")
    v.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MecsError) as exc:
        print(f"mecs {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
