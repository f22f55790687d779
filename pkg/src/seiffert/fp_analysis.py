"""The log-ratio F_p(x) = ln T(1,x) - ln A_p(1,x) and its auxiliary functions.

Sign structure on (0, 1):

* ``sgn F_p'(x) = sgn f1(x)``;
* ``f1'(x) = -x(1-x) / ((x^2+1)^2 (x^(p-1)+1)^2) * f2(x)``;
* ``x^(4-p) f2'(x) = f3(x)``;
* ``f3'(x) >= f4(x)`` for 3/2 <= p < 5/3, with f4 a concave quadratic; for
  1 < p < 3/2 the bound reverses, yet f3' stays positive.

For 1 < p < 5/3 the roots satisfy 0 < x3 < x2 < x1 < 1, where x1, x2, x3 are
the unique interior zeros of f3, f2 and f1; F_p rises on (0, x3) and falls
on (x3, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import means
from .constants import Const, const
from .numerics import Bracket, ConvergenceError, bisect, richardson, sign_scan
from .precision import DEFAULT_DPS, get_context

__all__ = [
    "DomainError",
    "FpContext",
    "AuxiliaryRoots",
    "F",
    "F_derivative",
    "f1",
    "f1_derivative",
    "f2",
    "f2_factored_5_3",
    "f2_polynomial_5_3",
    "f3",
    "f3_derivative",
    "f4",
    "limit_at_one",
    "limit_at_zero",
    "numerical_limit_at_one",
    "find_x3",
    "find_auxiliary_roots",
    "beta2",
    "MIN_ROOT_PRECISION",
]

MIN_ROOT_PRECISION = 30
SCAN_INTERVALS = 64


class DomainError(ValueError):
    """Argument outside the open unit interval."""


@dataclass(frozen=True)
class FpContext:
    """Order ``p`` and working precision (decimal digits) for F_p and friends."""

    p: Const
    precision: int = DEFAULT_DPS

    def __init__(self, p, precision: int = DEFAULT_DPS):
        object.__setattr__(self, "p", const(p))
        object.__setattr__(self, "precision", int(precision))
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @property
    def ctx(self):
        return get_context(self.precision)

    @property
    def pv(self):
        return self.p.value(self.ctx)


def _x(fc: FpContext, x):
    ctx = fc.ctx
    x = ctx.convert(x)
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    return ctx, x


def F(fc: FpContext, x):
    """ln(T(1,x) / A_p(1,x)); p = 0 is the geometric-mean limit."""
    ctx, x = _x(fc, x)
    p = fc.pv
    return ctx.log(means.seiffert_t(1, x, ctx.dps)) - ctx.log(means.power_mean(p, 1, x, ctx.dps))


def F_derivative(fc: FpContext, x):
    """F_p'(x) = (x^(p-1)+1) / ((1-x)(x^p+1) atan((1-x)/(1+x))) * f1(x)."""
    ctx, x = _x(fc, x)
    p = fc.pv
    pref = (ctx.power(x, p - 1) + 1) / (
        (1 - x) * (ctx.power(x, p) + 1) * ctx.atan((1 - x) / (1 + x)))
    return pref * f1(fc, x)


def f1(fc: FpContext, x):
    ctx, x = _x(fc, x)
    p = fc.pv
    return ((1 - x) * (ctx.power(x, p) + 1) / ((x * x + 1) * (ctx.power(x, p - 1) + 1))
            - ctx.atan((1 - x) / (x + 1)))


def f1_derivative(fc: FpContext, x):
    """f1'(x) = -x(1-x) / ((x^2+1)^2 (x^(p-1)+1)^2) * f2(x)."""
    ctx, x = _x(fc, x)
    p = fc.pv
    q = ctx.power(x, p - 1) + 1
    return -x * (1 - x) / ((x * x + 1) ** 2 * q * q) * f2(fc, x)


def f2(fc: FpContext, x):
    ctx, x = _x(fc, x)
    p = fc.pv
    pw = lambda e: ctx.power(x, e)  # noqa: E731
    return ((1 - p) * pw(p) + (p + 1) * pw(p - 1) - 2 * pw(2 * p - 3)
            - (p + 1) * pw(p - 2) + (p - 1) * pw(p - 3) + 2)


def f2_polynomial_5_3(x, dps=DEFAULT_DPS):
    """3 x^(4/3) f2(x) at p = 5/3, expanded."""
    ctx = get_context(dps)
    x = ctx.convert(x)
    c = ctx.cbrt(x)
    return -2 * x**3 + 8 * x**2 - 6 * x * c**2 + 6 * x * c - 8 * x + 2


def f2_factored_5_3(x, dps=DEFAULT_DPS):
    """3 x^(4/3) f2(x) at p = 5/3 in factored form."""
    ctx = get_context(dps)
    x = ctx.convert(x)
    c = ctx.cbrt(x)
    return 2 * (1 - c) ** 3 * (c * c + 1) * (x * c + 3 * x + 5 * c * c + 3 * c + 1)


def f3(fc: FpContext, x):
    ctx, x = _x(fc, x)
    p = fc.pv
    return (-p * (p - 1) * x**3 + (p - 1) * (p + 1) * x**2 - 2 * (2 * p - 3) * ctx.power(x, p)
            - (p + 1) * (p - 2) * x + (p - 1) * (p - 3))


def f3_derivative(fc: FpContext, x):
    ctx, x = _x(fc, x)
    p = fc.pv
    return (-3 * p * (p - 1) * x**2 + 2 * (p - 1) * (p + 1) * x
            - 2 * p * (2 * p - 3) * ctx.power(x, p - 1) - (p + 1) * (p - 2))


def f4(fc: FpContext, x):
    """Quadratic from f3' with x^(p-1) replaced by its tangent (p-1)x + 2 - p.

    A lower bound for f3' when p >= 3/2 (the replaced term has coefficient
    -2p(2p-3) <= 0) and an upper bound when p < 3/2.
    """
    ctx, x = _x(fc, x)
    p = fc.pv
    return (-3 * p * (p - 1) * x**2 - 2 * (p - 1) * (2 * p * p - 4 * p - 1) * x
            + (p - 2) * (4 * p * p - 7 * p - 1))


# ---------------------------------------------------------------------------
# boundary behaviour


def limit_at_one(p, dps=None):
    """lim_{x->1-} F_p(x) / (x-1)^2 = -(3p - 5)/24."""
    ctx = get_context(dps)
    p = const(p).value(ctx)
    return -(3 * p - 5) / 24


def limit_at_zero(p, dps=None):
    """lim_{x->0+} F_p(x): ln(2)/p - ln(pi/2) for p > 0, +inf otherwise."""
    ctx = get_context(dps)
    p = const(p).value(ctx)
    if p <= 0:
        return ctx.inf
    return ctx.log(2) / p - ctx.log(ctx.pi / 2)


def numerical_limit_at_one(fc: FpContext, kmin: int = 8, kmax: int = 20):
    """Richardson-extrapolate F_p(1-h)/h^2 over h = 2^-k.

    Returns ``(estimate, error)``.  The expansion of F_p about x = 1 is a
    plain Taylor series, so every integer power of h is eliminated in turn.
    """
    ctx = fc.ctx
    hs = [ctx.ldexp(1, -k) for k in range(kmin, kmax + 1)]
    vals = [F(fc, 1 - h) / (h * h) for h in hs]
    return richardson(vals, 2, list(range(1, len(vals))))


# ---------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class AuxiliaryRoots:
    x1: Bracket  # zero of f3
    x2: Bracket  # zero of f2
    x3: Bracket  # zero of f1


def _check_root_context(fc: FpContext):
    if fc.precision < MIN_ROOT_PRECISION:
        raise ValueError(f"root finding needs precision >= {MIN_ROOT_PRECISION}, "
                         f"got {fc.precision}")
    p = float(fc.p)
    if not 1 < p < 5 / 3:
        raise ValueError(f"p must lie in (1, 5/3) for the interior root to exist, got {p}")


def _scan_points(ctx):
    pts = [ctx.mpf(i) / SCAN_INTERVALS for i in range(1, SCAN_INTERVALS)]
    # geometric extension toward both ends for roots outside [1/64, 63/64]
    tail = [ctx.ldexp(1, -k) for k in range(7, 60)]
    return sorted(set(tail + pts + [1 - t for t in tail]))


def _unique_root(fc: FpContext, func, name: str) -> Bracket:
    ctx = fc.ctx
    g = lambda x: func(fc, x)  # noqa: E731
    pts = [ctx.mpf(i) / SCAN_INTERVALS for i in range(1, SCAN_INTERVALS)]
    changes = sign_scan(g, pts)
    if not changes:
        changes = sign_scan(g, _scan_points(ctx))
    if len(changes) != 1:
        raise ConvergenceError(f"{name}: expected one sign change, found {len(changes)}")
    lo, hi = changes[0]
    tol = ctx.ldexp(1, -int(ctx.prec) - 4)
    return bisect(g, lo, hi, tol)


def find_x3(fc: FpContext) -> Bracket:
    """Unique zero of f1 in (0, 1) for 1 < p < 5/3, bracketed by bisection.

    The returned bracket carries the signs of f1 at its ends: positive on
    the left (F_p increasing) and negative on the right.
    """
    _check_root_context(fc)
    br = _unique_root(fc, f1, "f1")
    if br.lo != br.hi and not (br.sign_lo > 0 > br.sign_hi):
        raise ConvergenceError("f1 sign pattern at the bracket is not (+, -)")
    return br


def find_auxiliary_roots(fc: FpContext) -> AuxiliaryRoots:
    """Zeros x1 of f3 and x2 of f2, with 0 < x3 < x2 < x1 < 1 checked."""
    _check_root_context(fc)
    r1 = _unique_root(fc, f3, "f3")
    r2 = _unique_root(fc, f2, "f2")
    r3 = find_x3(fc)
    if r1.lo != r1.hi and not (r1.sign_lo < 0 < r1.sign_hi):
        raise ConvergenceError("f3 sign pattern at the bracket is not (-, +)")
    if r2.lo != r2.hi and not (r2.sign_lo > 0 > r2.sign_hi):
        raise ConvergenceError("f2 sign pattern at the bracket is not (+, -)")
    if not (0 < r3.x < r2.x < r1.x < 1):
        raise ConvergenceError("root ordering x3 < x2 < x1 violated")
    return AuxiliaryRoots(r1, r2, r3)


def beta2(fc: FpContext):
    """exp(F_p(x3)): the best constant in T < beta * A_p for 1 < p < 5/3."""
    x3 = find_x3(fc).x
    return fc.ctx.exp(F(fc, x3))
