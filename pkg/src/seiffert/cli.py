"""Command-line interface.

Usage:
    seiffert eval T 1 0.5                   # evaluate a mean expression
    seiffert sharp T                        # sharp power-mean exponents and constants
    seiffert verify Y2                      # grid-verify a shipped chain
    seiffert verify all                     # ... every shipped chain
    seiffert verify --expr "T < A_1.6"      # ad-hoc chain
    seiffert profile C-S --grid 128         # CSV of log-margins
    seiffert constants                      # table of named constants
    seiffert identities --seed 1            # randomised identity spot-checks

Exit codes: 0 success / verified, 1 counterexample or failed check,
2 inconclusive, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

import numpy as np

from . import __version__, fp_analysis, means
from .constants import NAMED_CONSTANTS, Const, ConstError
from .expr import ParseError, parse_term
from .formatting import format_bracket, format_certified, format_number, render_json
from .inequality import (COUNTEREXAMPLE, INCONCLUSIVE, ChainSpec, FixtureError,
                         d1_factored, d1_function, load_fixtures, margin_profile,
                         verify_chain)
from .numerics import ConvergenceError
from .precision import DEFAULT_DPS, get_context
from .sharp_bounds import sharp_report

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_precision() -> int:
    env = os.environ.get("MEANS_PRECISION")
    if env is None:
        return DEFAULT_DPS
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"MEANS_PRECISION must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="decimal digits (default 50, or $MEANS_PRECISION)")
    common.add_argument("--grid", type=int, default=10_000, help="grid points (>= 64)")
    common.add_argument("--format", choices=("text", "csv", "json"), default=None)
    common.add_argument("--chain-file", default=None, help="chain fixture file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1, help="processes for grid sweeps")

    parser = _Parser(prog="seiffert", description="Bivariate means and their sharp bounds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="evaluate a mean at (a, b)")
    p.add_argument("mean")
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("sharp", parents=[common], help="sharp power-mean bounds of a mean")
    p.add_argument("mean")

    p = sub.add_parser("verify", parents=[common], help="grid-verify inequality chains")
    p.add_argument("chain", nargs="?", help="chain name, or 'all'")
    p.add_argument("--expr", help="ad-hoc chain, e.g. 'T < A_5/3'")

    p = sub.add_parser("profile", parents=[common], help="CSV table of log-margins")
    p.add_argument("chain", nargs="?")
    p.add_argument("--expr")

    sub.add_parser("constants", parents=[common], help="table of named constants")
    sub.add_parser("identities", parents=[common], help="randomised identity spot-checks")
    return parser


# ---------------------------------------------------------------------------
# output helpers


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(fmt, obj, text_lines, header=None, rows=None, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(render_json(obj))
    elif fmt == "csv":
        out.write(_csv_text(header, rows))
    else:
        out.write("\n".join(text_lines) + "\n")


def _chains(args):
    if args.expr:
        if args.chain:
            raise UsageError("give either a chain name or --expr, not both")
        try:
            return [ChainSpec.from_text("expr", args.expr)]
        except (ParseError, ValueError) as exc:
            raise UsageError(f"cannot parse chain: {exc}") from None
    if not args.chain:
        raise UsageError("a chain name or --expr is required")
    try:
        fixtures = load_fixtures(args.chain_file)
    except (OSError, FixtureError) as exc:
        raise UsageError(str(exc)) from None
    if args.chain == "all":
        return list(fixtures.values())
    if args.chain not in fixtures:
        raise UsageError(f"unknown chain {args.chain!r}; known: {', '.join(fixtures)}")
    return [fixtures[args.chain]]


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args, fmt):
    ctx = get_context(args.precision)
    try:
        expr = parse_term(args.mean)
        a, b = ctx.convert(args.a), ctx.convert(args.b)
    except (ParseError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse input: {exc}") from None
    if not (a > 0 and b > 0):
        raise UsageError(f"arguments must be positive, got a={args.a} b={args.b}")
    value = expr(a, b, args.precision)
    digits = args.precision - 5
    text = format_number(value, digits, strip_zeros=True)
    obj = {"mean": expr.to_text(), "a": args.a, "b": args.b, "value": text, "digits": digits}
    _emit(fmt, obj, [text], ["mean", "a", "b", "value"], [[expr.to_text(), args.a, args.b, text]])
    return EXIT_OK


def cmd_sharp(args, fmt):
    try:
        expr = parse_term(args.mean)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    try:
        report = sharp_report(expr, args.precision, args.grid)
    except (ConvergenceError, ValueError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    d = report.to_dict()
    lines = [f"mean        {d['mean']}", f"status      {d['status']}",
             f"precision   {d['precision']} digits, {d['grid_points']} grid points"]
    rows = []
    for key, note in (("p_lower", f"binding {d['binding_lower']}"),
                      ("p_upper", f"binding {d['binding_upper']}"),
                      ("alpha", "alpha * A_p_upper < M"),
                      ("beta", "M < beta * A_p_lower"),
                      ("x_star", d.get("x_star_of", ""))):
        if key in d:
            v = d[key]
            lines.append(f"{key:<11} {v['value']}  ({v['digits']} digits; {note})")
            rows.append([key, v["value"], v["digits"], note])
    if "x_star_bracket" in d:
        lo, hi = d["x_star_bracket"]
        lines.append(f"x_star in   ({lo}, {hi}), |f1| = {d['x_star_residual']}")
    lines.append(f"sweep       max G(p_upper) = {d['upper_margin']}, "
                 f"min G(p_lower) = {d['lower_margin']}")
    for flag in d["flags"]:
        lines.append(f"flag        {flag}")
    if "witness" in d:
        w = d["witness"]
        lines.append(f"witness     x = {w['ratio']} ({w['side']}), margin {w['log_margin']}")
    _emit(fmt, d, lines, ["quantity", "value", "digits", "note"], rows)
    return EXIT_INCONCLUSIVE if report.status != "ok" else EXIT_OK


def cmd_verify(args, fmt):
    chains = _chains(args)
    reports = [verify_chain(c, args.grid, args.precision, workers=args.workers) for c in chains]
    lines, rows = [], []
    for r in reports:
        d = r.to_dict()
        lines.append(f"{d['chain']}: {d['status']}  min_margin={d['min_margin']} at "
                     f"x={d['argmin']} ({d['argmin_pair']})  grid={d['grid_size']} "
                     f"precision={d['precision']}")
        for w in d["counterexamples"]:
            lines.append(f"  witness x={w['ratio']}  {w['pair']}  "
                         f"left={w['left']} right={w['right']} log_margin={w['log_margin']}")
        if d["violation_count"]:
            lines.append(f"  {d['violation_count']} violating grid points")
        rows.append([d["chain"], d["status"], d["min_margin"], d["argmin"],
                     d["argmin_pair"], d["grid_size"], d["precision"], d["violation_count"]])
    obj = [r.to_dict() for r in reports] if len(reports) > 1 else reports[0].to_dict()
    _emit(fmt, obj, lines, ["chain", "status", "min_margin", "argmin", "argmin_pair",
                            "grid_size", "precision", "violations"], rows)
    statuses = {r.status for r in reports}
    if COUNTEREXAMPLE in statuses:
        return EXIT_COUNTEREXAMPLE
    if INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_profile(args, fmt):
    chains = _chains(args)
    if len(chains) != 1:
        raise UsageError("profile takes a single chain")
    prof = margin_profile(chains[0], args.grid, args.precision, workers=args.workers)
    rows = [[repr(x), *(format_number(m, 20) for m in ms)] for x, ms in prof.rows]
    if fmt == "json":
        obj = {"chain": prof.chain, "precision": prof.precision, "header": prof.header,
               "rows": rows}
        sys.stdout.write(render_json(obj))
    else:
        sys.stdout.write(_csv_text(prof.header, rows))
    return EXIT_OK


def _constant_rows(dps):
    ctx = get_context(dps)
    rows = []
    for name, (formula, note) in NAMED_CONSTANTS.items():
        v = Const(formula).value(ctx)
        text, digits = format_certified(v, 0, dps)
        rows.append([name, formula, text, digits, note])
    fc = fp_analysis.FpContext(NAMED_CONSTANTS["p1"][0], dps)
    br = fp_analysis.find_x3(fc)
    x3_text, x3_digits = format_certified(br.x, br.hi - br.lo, dps)
    blo, bhi = format_bracket(br.lo, br.hi, dps - 5)
    rows.append(["x3", "zero of f1 at p = p1", x3_text, x3_digits, f"bracket ({blo}, {bhi})"])
    b2 = ctx.exp(fp_analysis.F(fc, br.x))
    b2_text, b2_digits = format_certified(b2, ctx.mpf(10) ** (5 - dps), dps)
    rows.append(["beta2", "exp(F_p1(x3))", b2_text, b2_digits,
                 "best constant with T < beta2 * A_p1"])
    return rows


def cmd_constants(args, fmt):
    rows = _constant_rows(args.precision)
    header = ["name", "formula", "value", "digits", "note"]
    width = max(len(r[0]) for r in rows)
    lines = [f"{r[0]:<{width}}  {r[2]}  ({r[3]} digits)  = {r[1]}; {r[4]}" for r in rows]
    obj = [dict(zip(header, r)) for r in rows]
    _emit(fmt, obj, lines, header, rows)
    return EXIT_OK


def _identity_checks(dps, seed, n_pairs=1000, n_points=100):
    rng = np.random.default_rng(seed)
    ctx = get_context(dps)
    checks = []

    a = np.exp(rng.uniform(-5, 5, n_pairs))
    b = np.exp(rng.uniform(-5, 5, n_pairs))
    worst = 0.0
    for ai, bi in zip(a, b):
        x, y = means.sandor_transform(ai, bi)
        for lhs, rhs in ((means.seiffert_t(ai, bi), means.seiffert_p(x, y)),
                         (means.quadratic_mean(ai, bi), means.arithmetic_mean(x, y)),
                         (means.arithmetic_mean(ai, bi), means.geometric_mean(x, y))):
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    checks.append(("sandor transform (native, rel)", worst, 1e-13))

    xs = [ctx.mpf(v) for v in rng.uniform(0, 1, n_points)]
    res = max(abs(fp_analysis.f2_polynomial_5_3(x, dps) - fp_analysis.f2_factored_5_3(x, dps))
              for x in xs)
    fc = fp_analysis.FpContext("5/3", dps)
    res = max(res, max(abs(3 * ctx.power(x, ctx.mpf(4) / 3) * fp_analysis.f2(fc, x)
                           - fp_analysis.f2_factored_5_3(x, dps)) for x in xs))
    checks.append(("f2 factorisation at p = 5/3", res, 1e-30))

    res = max(abs(d1_function(x, dps) - d1_factored(x, dps)) for x in xs)
    checks.append(("D1 rationalisation", res, 1e-30))

    ps = rng.uniform(1.05, 1.6, 20)
    worst = 0
    h = ctx.mpf(10) ** (-(dps // 3))
    for p, x in zip(ps, xs):
        fcp = fp_analysis.FpContext(repr(float(p)), dps)
        x = min(max(x, ctx.mpf("0.01")), ctx.mpf("0.99"))
        d = (fp_analysis.f2(fcp, x + h) - fp_analysis.f2(fcp, x - h)) / (2 * h)
        lhs = ctx.power(x, 4 - fcp.pv) * d
        rhs = fp_analysis.f3(fcp, x)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), ctx.mpf(1e-300)))
    checks.append(("x^(4-p) f2' = f3 (relative)", worst, 1e-10))

    worst = 0
    for p in ("0.5", "1", NAMED_CONSTANTS["p1"][0], "5/3", "2"):
        est, _ = fp_analysis.numerical_limit_at_one(fp_analysis.FpContext(p, dps))
        worst = max(worst, abs(est - fp_analysis.limit_at_one(p, dps)))
    checks.append(("F_p/(x-1)^2 limit vs -(3p-5)/24", worst, 1e-8))
    return checks


def cmd_identities(args, fmt):
    checks = _identity_checks(args.precision, args.seed)
    rows = [[name, format_number(v, 6), repr(tol), "pass" if v <= tol else "FAIL"]
            for name, v, tol in checks]
    lines = [f"{r[3]:<4}  {r[0]:<36} {r[1]:>14}  (tol {r[2]})" for r in rows]
    obj = [dict(zip(("check", "residual", "tolerance", "result"), r)) for r in rows]
    _emit(fmt, obj, lines, ["check", "residual", "tolerance", "result"], rows)
    return EXIT_OK if all(v <= tol for _, v, tol in checks) else EXIT_COUNTEREXAMPLE


COMMANDS = {
    "eval": (cmd_eval, "text"),
    "sharp": (cmd_sharp, "text"),
    "verify": (cmd_verify, "text"),
    "profile": (cmd_profile, "csv"),
    "constants": (cmd_constants, "text"),
    "identities": (cmd_identities, "text"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision is None:
            args.precision = _default_precision()
        if args.precision < 30:
            raise UsageError(f"--precision must be at least 30, got {args.precision}")
        if args.grid < 64:
            raise UsageError(f"--grid must be at least 64, got {args.grid}")
        if args.workers < 1:
            raise UsageError("--workers must be positive")
        func, default_fmt = COMMANDS[args.command]
        return func(args, args.format or default_fmt)
    except (UsageError, ConstError) as exc:
        print(f"seiffert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
