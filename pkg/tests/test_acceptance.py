"""End-to-end acceptance criteria; one PASS/FAIL line each (run with -s to see them inline)."""

import json
import math
import time

import mpmath
import numpy as np
import pytest

from seiffert import fp_analysis as fa
from seiffert import means
from seiffert.cli import main
from seiffert.constants import Const
from seiffert.expr import parse_term
from seiffert.grids import ratio_grid
from seiffert.inequality import (COUNTEREXAMPLE, REFERENCE_SUITE, VERIFIED, ChainSpec,
                                 d1_factored, d1_function, load_fixtures, verify_chain)
from seiffert.precision import get_context
from seiffert.sharp_bounds import (critical_exponent_at_one, critical_exponent_at_zero,
                                   sharp_report)

pytestmark = pytest.mark.acceptance

DPS = 50
GRID = 10_000
X3_BRACKET = ("0.186930110570624", "0.186930110570625")


def reference(expr, dps=70):
    """Independent mpmath evaluation of a closed form."""
    names = {k: getattr(mpmath, k) for k in ("log", "pi", "sqrt", "mpf")}
    with mpmath.workdps(dps):
        return eval(expr, names)


def run(verdict, label, check):
    try:
        ok, detail = check()
    except Exception as exc:  # report, then fail
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    verdict(label, ok, detail)


# ---------------------------------------------------------------------------


def test_criterion_1_x3(verdict, capsys):
    def check():
        start = time.perf_counter()
        code = main(["sharp", "T", "--precision", str(DPS), "--format", "json"])
        elapsed = time.perf_counter() - start
        d = json.loads(capsys.readouterr().out)
        lo, hi = (mpmath.mpf(v) for v in d["x_star_bracket"])
        with mpmath.workdps(DPS):
            inside = mpmath.mpf(X3_BRACKET[0]) < lo <= hi < mpmath.mpf(X3_BRACKET[1])
        residual = float(d["x_star_residual"])
        ok = code == 0 and inside and residual < 1e-40 and elapsed < 5
        return ok, (f"x3={d['x_star']['value'][:22]} bracket inside={inside} "
                    f"residual={residual:.1e} time={elapsed:.2f}s")

    run(verdict, "1 x3 reproduction", check)


def _numpy_log_ratio(p, x):
    t = (1 - x) / (2 * np.arctan((1 - x) / (1 + x)))
    a = ((1 + x ** p) / 2) ** (1 / p)
    return np.log(t) - np.log(a)


def test_criterion_2_beta2(verdict):
    def check():
        fc = fa.FpContext("log(2)/log(pi/2)", DPS)
        beta = fa.beta2(fc)
        report_beta = sharp_report(parse_term("T"), DPS, GRID).beta
        p1 = math.log(2) / math.log(math.pi / 2)
        x = np.arange(1, 100_000) / 100_000
        grid_max = float(np.exp(_numpy_log_ratio(p1, x).max()))
        in_range = 1.0135 < beta < 1.0137
        gap = abs(float(beta) - grid_max)
        ok = in_range and gap <= 1e-10 and abs(report_beta - beta) < 1e-30
        return ok, f"beta2={mpmath.nstr(beta, 20)} grid max gap={gap:.1e}"

    run(verdict, "2 beta2 reproduction", check)


def test_criterion_3_alpha1(verdict):
    def check():
        value = Const("2**(8/5)/pi").value(get_context(DPS))
        ref = reference("mpf(2)**(mpf(8)/5)/pi")
        err = abs(value - ref)
        digits = int(-mpmath.log10(err / ref)) if err else DPS
        ok = digits >= 12 and round(float(value), 5) == 0.96494
        return ok, f"alpha1={mpmath.nstr(value, 16)} agreeing digits={digits}"

    run(verdict, "3 alpha1 reproduction", check)


def test_criterion_4_exponents(verdict):
    def check():
        T, P, N = (parse_term(s) for s in "TPN")
        results = [
            ("T@1", critical_exponent_at_one(T, DPS).value, reference("mpf(5)/3"), 1e-6),
            ("T@0", critical_exponent_at_zero(T, DPS).value, reference("log(2)/log(pi/2)"), 1e-9),
            ("P@1", critical_exponent_at_one(P, DPS).value, reference("mpf(2)/3"), 1e-6),
            ("P@0", critical_exponent_at_zero(P, DPS).value, reference("log(2)/log(pi)"), 1e-6),
            ("N@1", critical_exponent_at_one(N, DPS).value, reference("mpf(4)/3"), 1e-6),
            ("N@0", critical_exponent_at_zero(N, DPS).value,
             reference("log(2)/log(log(3+2*sqrt(2)))"), 1e-6),
        ]
        errs = {k: abs(v - r) for k, v, r, _ in results}
        ok = all(errs[k] <= tol for k, _, _, tol in results)
        ok = ok and round(float(results[5][1]), 4) == 1.2228
        return ok, " ".join(f"{k}:{float(e):.0e}" for k, e in errs.items())

    run(verdict, "4 sharp exponents", check)


def test_criterion_5_chain_suite(verdict):
    def check():
        fixtures = load_fixtures()
        start = time.perf_counter()
        reports = [verify_chain(fixtures[name], GRID, DPS) for name in REFERENCE_SUITE]
        elapsed = time.perf_counter() - start
        bad = [r.chain for r in reports if r.status != VERIFIED or not r.min_margin > 0]
        ok = not bad and len(reports) == 13 and elapsed < 60
        return ok, f"{13 - len(bad)}/13 verified in {elapsed:.1f}s" + (f" failing={bad}" if bad else "")

    run(verdict, "5 chain suite", check)


def _reverifies(spec, witnesses, dps):
    """Each witness is still a violation when recomputed at ``dps`` digits."""
    ctx = get_context(dps)
    one = ctx.mpf(1)
    for w in witnesses:
        left = spec.terms[w.pair]._eval(ctx, one, ctx.mpf(w.ratio))
        right = spec.terms[w.pair + 1]._eval(ctx, one, ctx.mpf(w.ratio))
        if not ctx.log(right / left) < 0:
            return False
    return True


def test_criterion_6_falsification(verdict):
    def check():
        low_spec = ChainSpec.from_text("T < A_1.6", "T < A_1.6")
        high_spec = ChainSpec.from_text("A_1.7 < T", "A_1.7 < T")
        low = verify_chain(low_spec, GRID, DPS)
        high = verify_chain(high_spec, GRID, DPS)
        near_one = [w.ratio for w in low.counterexamples if w.ratio > 0.9]
        worst_high = min(high.counterexamples, key=lambda w: w.margin, default=None)
        sound = (_reverifies(low_spec, low.counterexamples, 2 * DPS)
                 and _reverifies(high_spec, high.counterexamples, 2 * DPS))
        ok = (low.status == COUNTEREXAMPLE and bool(near_one) and sound
              and high.status == COUNTEREXAMPLE and worst_high is not None
              and worst_high.ratio < 1e-3)
        return ok, (f"T<A_1.6: {low.status}, witness ratio {max(near_one, default=None)}; "
                    f"A_1.7<T: {high.status}, worst witness at "
                    f"{worst_high.ratio if worst_high else None}; re-verified={sound}")

    run(verdict, "6 falsification", check)


def test_criterion_7_identities(verdict):
    def check():
        rng = np.random.default_rng(2024)
        a = np.exp(rng.uniform(-20, 20, 1000))
        b = np.exp(rng.uniform(-20, 20, 1000))
        sandor = 0.0
        for ai, bi in zip(a, b):
            x, y = means.sandor_transform(ai, bi)
            for lhs, rhs in ((means.seiffert_t(ai, bi), means.seiffert_p(x, y)),
                             (means.quadratic_mean(ai, bi), means.arithmetic_mean(x, y)),
                             (means.arithmetic_mean(ai, bi), means.geometric_mean(x, y))):
                sandor = max(sandor, abs(lhs - rhs) / rhs)

        dps = 60
        xs = [str(v) for v in rng.uniform(0, 1, 100)]
        f2_res = max(abs(fa.f2_polynomial_5_3(x, dps) - fa.f2_factored_5_3(x, dps)) for x in xs)
        d1_res = max(abs(d1_function(x, dps) - d1_factored(x, dps)) for x in xs)

        rel29 = 0
        h = mpmath.mpf(10) ** -15
        for p in rng.uniform(0.3, 2.5, 20):
            fc = fa.FpContext(repr(float(p)), 40)
            with mpmath.workdps(40):
                for x in rng.uniform(0.02, 0.98, 5):
                    x = mpmath.mpf(x)
                    d = (fa.f2(fc, x + h) - fa.f2(fc, x - h)) / (2 * h)
                    rhs = fa.f3(fc, x)
                    rel29 = max(rel29, abs(x ** (4 - fc.pv) * d - rhs) / abs(rhs))

        lim = max(abs(fa.numerical_limit_at_one(fa.FpContext(p, DPS))[0] - fa.limit_at_one(p, DPS))
                  for p in ("0.5", "1", "log(2)/log(pi/2)", "5/3", "2"))
        ok = sandor <= 1e-13 and f2_res <= 1e-30 and d1_res <= 1e-30 and rel29 <= 1e-10 and lim <= 1e-8
        return ok, (f"sandor={sandor:.1e} f2={float(f2_res):.1e} D1={float(d1_res):.1e} "
                    f"f2'-f3 rel={float(rel29):.1e} limit={float(lim):.1e}")

    run(verdict, "7 identity suite", check)


def test_criterion_8_monotonicity(verdict):
    def check():
        rng = np.random.default_rng(8)
        power_ok = True
        for _ in range(1000):
            r, s = sorted(rng.uniform(-4, 4, 2))
            a, b = np.exp(rng.uniform(-5, 5, 2))
            if a == b or r == s:
                continue
            power_ok &= means.power_mean(r, a, b) < means.power_mean(s, a, b)

        xs = ratio_grid(GRID)
        f53 = [fa.F(fa.FpContext("5/3", DPS), x) for x in xs]
        f1 = [fa.F(fa.FpContext("1", DPS), x) for x in xs]
        inc = all(u < v for u, v in zip(f53, f53[1:]))
        dec = all(u > v for u, v in zip(f1, f1[1:]))

        # extended precision: at x = 1e-6 the p-dependence falls below float64 resolution
        q2_ok = True
        ctx = get_context(DPS)
        orders = [ctx.mpf(k) / 20 for k in range(-60, 101)]
        for x in ["1e-6", "1e-3", "0.1", "0.5", "0.9", "0.999"]:
            vals = [means.q2_over_lehmer(p, 1, x, DPS) for p in orders]
            q2_ok &= all(u > v for u, v in zip(vals, vals[1:]))
        ok = bool(power_ok) and inc and dec and bool(q2_ok)
        return ok, f"A_r={bool(power_ok)} F_5/3 inc={inc} F_1 dec={dec} Q2/L={bool(q2_ok)}"

    run(verdict, "8 monotonicity suite", check)
