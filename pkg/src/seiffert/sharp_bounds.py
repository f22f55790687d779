"""Sharp power-mean exponents and best constants for a symmetric mean M.

Write G_p(x) = ln M(1,x) - ln A_p(1,x) on (0, 1).  Two necessary conditions
pin down the candidate exponents:

* x -> 1: the coefficient of (x-1)^2 in G_p is affine in p (slope -1/8),
  so its zero is found from two Richardson-extrapolated evaluations;
* x -> 0: G_p(0+) = ln M(1,0+) + ln(2)/p vanishes at p = ln 2 / ln(1/M(1,0+)).

The larger candidate is the smallest p with M <= A_p, the smaller the
largest p with A_p <= M; both are then checked on a dense ratio grid and
the best multiplicative constants are read off as exp(inf G) and exp(sup G).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from . import fp_analysis
from .expr import MeanExpr, Named
from .formatting import format_bracket, format_certified, format_number
from .grids import ratio_grid
from .means import power_mean
from .numerics import ConvergenceError, golden_section, richardson
from .precision import DEFAULT_DPS, get_context

__all__ = [
    "Estimate",
    "SharpBoundReport",
    "coefficient_at_one",
    "endpoint_value_at_zero",
    "critical_exponent_at_one",
    "critical_exponent_at_zero",
    "sharp_report",
]

#: tolerance on the x -> 1 coefficient at the computed exponent
RESIDUAL_TOL = 1e-7
#: successive x -> 0 extrapolants must agree to this
ZERO_LIMIT_TOL = 1e-12


class Estimate(NamedTuple):
    value: object
    error: object


def _log_ratio(mean: MeanExpr, ctx, x, p):
    return ctx.log(mean._eval(ctx, ctx.mpf(1), x)) - ctx.log(power_mean(p, 1, x, ctx.dps))


def coefficient_at_one(mean: MeanExpr, p, dps: int = DEFAULT_DPS,
                       kmin: int = 8, kmax: int = 20) -> Estimate:
    """lim_{x->1-} (ln M(1,x) - ln A_p(1,x)) / (x-1)^2 by Richardson on h = 2^-k."""
    ctx = get_context(dps)
    p = ctx.convert(p)
    hs = [ctx.ldexp(1, -k) for k in range(kmin, kmax + 1)]
    vals = [_log_ratio(mean, ctx, 1 - h, p) / (h * h) for h in hs]
    return Estimate(*richardson(vals, 2, list(range(1, len(vals)))))


def critical_exponent_at_one(mean: MeanExpr, dps: int = DEFAULT_DPS) -> Estimate:
    """The p at which the x -> 1 second-order coefficient of G_p vanishes."""
    ctx = get_context(dps)
    c0, e0 = coefficient_at_one(mean, 0, dps)
    c1, e1 = coefficient_at_one(mean, 1, dps)
    slope = c1 - c0
    if slope == 0:
        raise ConvergenceError("x -> 1 coefficient does not depend on p")
    p_star = -c0 / slope
    resid, e_star = coefficient_at_one(mean, p_star, dps)
    if not abs(resid) <= RESIDUAL_TOL:
        raise ConvergenceError(
            f"affine model failed at p* = {ctx.nstr(p_star, 12)}: residual {ctx.nstr(resid, 5)}")
    # x10: the diagonal difference is an optimistic error estimate
    error = 10 * (e0 + abs(p_star) * (e0 + e1) + abs(resid) + e_star) / abs(slope)
    return Estimate(p_star, error)


def endpoint_value_at_zero(mean: MeanExpr, dps: int = DEFAULT_DPS,
                           kmin: int = 4, kmax: int = 12) -> Estimate:
    """M(1, 0+) extrapolated from x = 10^-k, allowing half-integer powers of x."""
    ctx = get_context(dps)
    xs = [ctx.power(10, -k) for k in range(kmin, kmax + 1)]
    vals = [mean._eval(ctx, ctx.mpf(1), x) for x in xs]
    exps = [ctx.mpf(j) / 2 for j in range(1, len(vals))]
    est, err = richardson(vals, ctx.mpf(10), exps)
    if not err <= ZERO_LIMIT_TOL:
        raise ConvergenceError(
            f"M(1, 0+) extrapolation did not settle (successive estimates differ by "
            f"{ctx.nstr(err, 3)})")
    return Estimate(est, err)


def critical_exponent_at_zero(mean: MeanExpr, dps: int = DEFAULT_DPS) -> Estimate:
    """p = ln 2 / ln(1 / M(1, 0+)), the order whose endpoint value matches M."""
    ctx = get_context(dps)
    m0, err = endpoint_value_at_zero(mean, dps)
    # an endpoint indistinguishable from 0 or 1 has no finite positive match
    slack = 10 * err + ctx.mpf(10) ** (-(dps - 10))
    if not slack < m0 < 1 - slack:
        raise ValueError(f"M(1, 0+) = {ctx.nstr(m0, 10)} is outside (0, 1); "
                         "no positive-order power mean matches it")
    lm = ctx.log(m0)
    p = -ctx.log(2) / lm
    return Estimate(p, 10 * ctx.log(2) / (m0 * lm * lm) * err)


@dataclass
class SharpBoundReport:
    """Sharp exponents and constants with A_lower-based and A_upper-based bounds.

    ``alpha * A_{p_upper} < M <= A_{p_upper}`` and
    ``A_{p_lower} <= M < beta * A_{p_lower}`` on the swept grid.
    """

    mean: str
    precision: int
    p_lower: object
    p_upper: object
    p_lower_error: object
    p_upper_error: object
    binding_lower: str
    binding_upper: str
    alpha: object
    beta: object
    alpha_error: object
    beta_error: object
    x_star: object = None
    x_star_error: object = None
    x_star_of: str | None = None
    x_star_residual: object = None
    x_star_bracket: tuple | None = None
    grid_points: int = 0
    upper_margin: object = None  # max over grid of G_{p_upper} (should be <= 0)
    lower_margin: object = None  # min over grid of G_{p_lower} (should be >= 0)
    status: str = "ok"
    flags: list = field(default_factory=list)
    witness: tuple | None = None

    def to_dict(self) -> dict:
        dps = self.precision

        def num(v, e):
            text, digits = format_certified(v, e, dps)
            return {"value": text, "digits": digits}

        out = {
            "mean": self.mean,
            "status": self.status,
            "precision": dps,
            "p_lower": num(self.p_lower, self.p_lower_error),
            "binding_lower": self.binding_lower,
            "p_upper": num(self.p_upper, self.p_upper_error),
            "binding_upper": self.binding_upper,
            "alpha": num(self.alpha, self.alpha_error),
            "beta": num(self.beta, self.beta_error),
        }
        if self.x_star is not None:
            out["x_star"] = num(self.x_star, self.x_star_error)
            out["x_star_of"] = self.x_star_of
            if self.x_star_bracket is not None:
                lo, hi = self.x_star_bracket
                out["x_star_bracket"] = list(format_bracket(lo, hi, dps - 5))
                out["x_star_residual"] = format_number(self.x_star_residual, 6)
        out["grid_points"] = self.grid_points
        out["upper_margin"] = format_number(self.upper_margin, 10)
        out["lower_margin"] = format_number(self.lower_margin, 10)
        out["flags"] = list(self.flags)
        if self.witness is not None:
            out["witness"] = {"ratio": repr(float(self.witness[0])),
                              "side": self.witness[1],
                              "log_margin": format_number(self.witness[2], 10)}
        return out


def _extremum(values, xs, g, ctx, endpoint0, maximize):
    """Best of the x -> 0 limit, the x -> 1 limit (zero) and a refined interior extremum."""
    sign = 1 if maximize else -1
    i = max(range(len(values)), key=lambda k: (sign * values[k], -k))
    best, where, x_int, bracket = endpoint0, "x->0", None, None
    if sign * 0 > sign * best:
        best, where = ctx.mpf(0), "x->1"
    if 0 < i < len(values) - 1 and sign * values[i] > sign * best:
        lo, hi = ctx.mpf(xs[i - 1]), ctx.mpf(xs[i + 1])
        tol = ctx.ldexp(1, -int(ctx.prec) // 2)
        x_int, v, blo, bhi = golden_section(g, lo, hi, tol, maximize=maximize)
        bracket = (blo, bhi)
        best, where = v, "interior"
    return best, where, x_int, bracket


def sharp_report(mean: MeanExpr, dps: int = DEFAULT_DPS,
                 grid_points: int = 10_000) -> SharpBoundReport:
    """Sharp power-mean exponents of ``mean`` and the associated best constants."""
    ctx = get_context(dps)
    p_one, e_one = critical_exponent_at_one(mean, dps)
    p_zero, e_zero = critical_exponent_at_zero(mean, dps)
    m0 = endpoint_value_at_zero(mean, dps).value
    flags = []
    if abs(p_one - p_zero) <= e_one + e_zero + ctx.mpf(10) ** (-dps // 2):
        flags.append("critical exponents coincide")
    if p_one >= p_zero:
        p_up, e_up, bind_up, p_lo, e_lo, bind_lo = p_one, e_one, "x->1", p_zero, e_zero, "x->0"
    else:
        p_up, e_up, bind_up, p_lo, e_lo, bind_lo = p_zero, e_zero, "x->0", p_one, e_one, "x->1"
        flags.append("x->0 exponent exceeds x->1 exponent")

    xs = ratio_grid(grid_points)
    one = ctx.mpf(1)
    lm = [ctx.log(mean._eval(ctx, one, ctx.mpf(x))) for x in xs]

    def g_of(p):
        return lambda x: ctx.log(mean._eval(ctx, one, x)) - ctx.log(power_mean(p, 1, x, dps))

    g_up, g_lo = g_of(p_up), g_of(p_lo)
    up = [v - ctx.log(power_mean(p_up, 1, x, dps)) for v, x in zip(lm, xs)]
    lo = [v - ctx.log(power_mean(p_lo, 1, x, dps)) for v, x in zip(lm, xs)]

    # |d/dp ln A_p(1,x)| <= (ln x)^2 / 8 <= 43 on the grid
    eval_tol = ctx.mpf(10) ** (-(dps - 10))
    status, witness = "ok", None
    for x, u, l_ in zip(xs, up, lo):
        if u > eval_tol + 50 * e_up:
            status, witness = "inconclusive", (x, "upper", u)
            break
        if l_ < -(eval_tol + 50 * e_lo):
            status, witness = "inconclusive", (x, "lower", l_)
            break

    g0_up = ctx.log(m0) + ctx.log(2) / p_up
    g0_lo = ctx.log(m0) + ctx.log(2) / p_lo
    a_log, a_where, a_x, a_br = _extremum(up, xs, g_up, ctx, g0_up, maximize=False)
    b_log, b_where, b_x, b_br = _extremum(lo, xs, g_lo, ctx, g0_lo, maximize=True)

    m0_err = endpoint_value_at_zero(mean, dps).error
    a_err = (m0_err / m0 + ctx.log(2) * e_up / p_up**2) if a_where == "x->0" else 50 * e_up
    b_err = (m0_err / m0 + ctx.log(2) * e_lo / p_lo**2) if b_where == "x->0" else 50 * e_lo
    alpha, beta = ctx.exp(a_log), ctx.exp(b_log)

    report = SharpBoundReport(
        mean=mean.to_text(), precision=dps,
        p_lower=p_lo, p_upper=p_up, p_lower_error=e_lo, p_upper_error=e_up,
        binding_lower=bind_lo, binding_upper=bind_up,
        alpha=alpha, beta=beta, alpha_error=alpha * (a_err + eval_tol),
        beta_error=beta * (b_err + eval_tol),
        grid_points=len(xs), upper_margin=max(up), lower_margin=min(lo),
        status=status, flags=flags, witness=witness,
    )
    interior = [(b_x, b_br, "beta"), (a_x, a_br, "alpha")]
    for x_int, br, tag in interior:
        if x_int is not None:
            report.x_star, report.x_star_of = x_int, tag
            report.x_star_error = br[1] - br[0]
            break

    if (report.x_star_of == "beta" and isinstance(mean, Named) and mean.symbol == "T"
            and 1 < p_lo < ctx.mpf(5) / 3 and dps >= fp_analysis.MIN_ROOT_PRECISION):
        # for T the interior maximiser is the zero of f1; bisection certifies it
        fc = fp_analysis.FpContext(ctx.nstr(p_lo, dps), dps)
        br = fp_analysis.find_x3(fc)
        if abs(br.x - report.x_star) > ctx.sqrt(report.x_star_error) + ctx.mpf(10) ** (-dps // 3):
            report.flags.append("golden-section and f1-bisection maximisers disagree")
        report.x_star = br.x
        report.x_star_bracket = (br.lo, br.hi)
        report.x_star_residual = br.residual
        # the p_lower uncertainty moves the root by about the same order
        report.x_star_error = (br.hi - br.lo) / 2 + 10 * e_lo
        report.beta = ctx.exp(g_lo(br.x))
    return report

