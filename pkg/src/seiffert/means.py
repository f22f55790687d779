"""Bivariate means on positive pairs.

All means are symmetric, homogeneous of degree one and extended to ``a == b``
by their continuous limit ``a``.  The trigonometric-type means are written as

    M(a, b) = A(a, b) * t / f(t),      t = (a - b) / (a + b),

with ``f`` one of ``atan`` (T), ``asin`` (P), ``asinh`` (N) or ``atanh``
(logarithmic mean).  For ``|t| < SERIES_THRESHOLD`` the ratio ``t / f(t)`` is
summed from its even Maclaurin series instead of being divided out.  Away
from the diagonal P, L and I avoid the t-form, since asin and atanh lose
accuracy as |t| -> 1; see ``_direct``.

Every public function takes an optional ``dps``: ``None`` evaluates in
binary64, an integer evaluates with that many decimal digits via mpmath.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .precision import NATIVE, get_context

__all__ = [
    "PositivePair",
    "SERIES_THRESHOLD",
    "SMALL_ORDER_THRESHOLD",
    "arithmetic_mean",
    "geometric_mean",
    "quadratic_mean",
    "power_mean",
    "lehmer_mean",
    "seiffert_t",
    "seiffert_p",
    "neuman_sandor",
    "logarithmic_mean",
    "identric_mean",
    "contraharmonic",
    "q2_over_lehmer",
    "sandor_transform",
    "kernel_mean",
]

#: |t| below which T, P, N, L and I switch to their series branch.
SERIES_THRESHOLD = 1e-3
#: native-precision |r| below which A_r uses the two-term log-space expansion.
SMALL_ORDER_THRESHOLD = 1e-8
# 8 even terms: the first omitted term is O(t**16) = 1e-48 at t = 1e-3.
_NATIVE_TERMS = 8


class PositivePair(NamedTuple):
    a: float
    b: float


def _check_pair(ctx, a, b):
    a = ctx.convert(a)
    b = ctx.convert(b)
    if not (a > 0 and b > 0) or not (ctx.isfinite(a) and ctx.isfinite(b)):
        raise ValueError(f"means are defined for finite positive pairs, got ({a}, {b})")
    return a, b


# ---------------------------------------------------------------------------
# even series of t / f(t)


def _inverse_series(coeffs):
    """Reciprocal of a power series in s with nonzero constant term."""
    out = [1 / coeffs[0]]
    for k in range(1, len(coeffs)):
        acc = sum(coeffs[j] * out[k - j] for j in range(1, k + 1))
        out.append(-acc / coeffs[0])
    return out


def _central_binomial_ratio(k):
    # (2k)! / (4^k (k!)^2)
    return Fraction(math.comb(2 * k, k), 4**k)


_F_OVER_T = {
    # coefficients of f(t)/t in powers of s = t^2
    "atan": lambda k: Fraction((-1) ** k, 2 * k + 1),
    "asin": lambda k: _central_binomial_ratio(k) / (2 * k + 1),
    "asinh": lambda k: (-1) ** k * _central_binomial_ratio(k) / (2 * k + 1),
    "atanh": lambda k: Fraction(1, 2 * k + 1),
}


@lru_cache(maxsize=None)
def series_coefficients(kind: str, nterms: int) -> tuple:
    """Exact coefficients of t/f(t) = sum c_k t^(2k), k < nterms."""
    if kind == "identric":
        # ln(I/A) = -sum_{k>=1} t^(2k) / (2k (2k+1))
        return (Fraction(0),) + tuple(
            Fraction(-1, 2 * k * (2 * k + 1)) for k in range(1, nterms)
        )
    coeffs = [_F_OVER_T[kind](k) for k in range(nterms)]
    return tuple(_inverse_series(coeffs))


def _nterms(ctx):
    if ctx is NATIVE:
        return _NATIVE_TERMS
    # t^(2K) < 10^-dps at t = SERIES_THRESHOLD
    return ctx.dps // 6 + 2


@lru_cache(maxsize=256)
def _ctx_coefficients(kind, nterms, dps):
    ctx = get_context(dps)
    if ctx is NATIVE:
        return tuple(c.numerator / c.denominator for c in series_coefficients(kind, nterms))
    return tuple(ctx.mpf(c.numerator) / c.denominator for c in series_coefficients(kind, nterms))


def _series(ctx, kind, t):
    coeffs = _ctx_coefficients(kind, _nterms(ctx), ctx.dps)
    s = t * t
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * s + c
    return acc


def _log_ratio(ctx, hi, lo):
    """ln(hi/lo) for hi >= lo, via log1p when the ratio is below 2."""
    if hi < 2 * lo:
        return ctx.log1p((hi - lo) / lo)  # hi - lo is exact here
    return ctx.log(hi / lo)


def _direct(ctx, kind, a, b):
    """Closed forms, arranged to stay well conditioned for extreme ratios."""
    if kind == "atan":
        s = a + b
        t = (a - b) / s
        return (s / 2) * t / ctx.atan(t)
    if kind == "asin":
        # asin((a-b)/(a+b)) = atan((a-b) / (2 sqrt(ab)))
        d = a - b
        return d / (2 * ctx.atan(d / (2 * ctx.sqrt(a) * ctx.sqrt(b))))
    if kind == "asinh":
        s = a + b
        t = (a - b) / s
        return (s / 2) * t / ctx.asinh(t)
    lo, hi = (a, b) if a < b else (b, a)
    if kind == "atanh":
        return (hi - lo) / _log_ratio(ctx, hi, lo)
    if kind == "identric":
        # ln I = ln hi - 1 - x ln x / (1 - x),  x = lo/hi
        x = lo / hi
        lnx = -_log_ratio(ctx, hi, lo)
        return hi * ctx.exp(-1 - x * lnx / ((hi - lo) / hi))
    raise ValueError(f"unknown kernel {kind!r}")


def ratio_kernel(ctx, kind: str, t):
    """t / f(t) from its even series; valid for |t| below the threshold."""
    return _series(ctx, kind, t)


def kernel_mean(kind: str, a, b, dps=None, branch: str | None = None):
    """Mean with kernel ``kind``; ``branch`` forces "series" or "direct".

    ``kind`` is one of "atan" (T), "asin" (P), "asinh" (N), "atanh" (L) or
    "identric" (I).
    """
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    if a == b:
        return a
    s = a + b
    t = (a - b) / s
    if branch is None:
        branch = "series" if abs(t) < SERIES_THRESHOLD else "direct"
    if branch == "direct":
        return _direct(ctx, kind, a, b)
    if kind == "identric":
        return (s / 2) * ctx.exp(_series(ctx, "identric", t))
    return (s / 2) * _series(ctx, kind, t)


# ---------------------------------------------------------------------------
# public means


def arithmetic_mean(a, b, dps=None):
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    return (a + b) / 2


def geometric_mean(a, b, dps=None):
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    return ctx.sqrt(a) * ctx.sqrt(b)


def quadratic_mean(a, b, dps=None):
    return power_mean(2, a, b, dps)


def power_mean(r, a, b, dps=None):
    """Power mean ((a^r + b^r)/2)^(1/r), geometric mean at r = 0.

    The evaluation is normalised so no intermediate power exceeds one:

        A_r = base * exp(log1p(expm1(z) / 2) / r),   z = -|r| ln(max/min)

    with ``base = max(a, b)`` for r > 0 and ``min(a, b)`` for r < 0.  In
    binary64, orders with ``|r| < SMALL_ORDER_THRESHOLD`` use
    ``ln A_r = (ln a + ln b)/2 + r/2 * ((ln a - ln b)/2)^2``, whose error is
    O(r^3) because the odd cumulants of a symmetric two-point law vanish.
    """
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    r = ctx.convert(r)
    if a == b:
        return a
    if r == 0:
        return ctx.sqrt(a) * ctx.sqrt(b)
    lo, hi = (a, b) if a < b else (b, a)
    if ctx is NATIVE and abs(r) < SMALL_ORDER_THRESHOLD:
        la, lb = math.log(a), math.log(b)
        half = (la - lb) / 2
        return math.exp((la + lb) / 2 + r * half * half / 2)
    base = hi if r > 0 else lo
    z = -abs(r) * ctx.log(hi / lo)
    return base * ctx.exp(ctx.log1p(ctx.expm1(z) / 2) / r)


def lehmer_mean(r, a, b, dps=None):
    """Lehmer mean (a^(r+1) + b^(r+1)) / (a^r + b^r)."""
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    r = ctx.convert(r)
    if a == b:
        return a
    lo, hi = (a, b) if a < b else (b, a)
    x = lo / hi
    if r >= 0:
        xr = ctx.power(x, r)
        return hi * (1 + xr * x) / (1 + xr)
    # multiply through by x^(-r) <= 1
    xr = ctx.power(x, -r)
    return hi * (x + xr) / (1 + xr)


def seiffert_t(a, b, dps=None):
    """Second Seiffert mean (a - b) / (2 atan((a - b)/(a + b)))."""
    return kernel_mean("atan", a, b, dps)


def seiffert_p(a, b, dps=None):
    """First Seiffert mean (a - b) / (2 asin((a - b)/(a + b)))."""
    return kernel_mean("asin", a, b, dps)


def neuman_sandor(a, b, dps=None):
    """Neuman-Sandor mean (a - b) / (2 asinh((a - b)/(a + b)))."""
    return kernel_mean("asinh", a, b, dps)


def logarithmic_mean(a, b, dps=None):
    """(a - b) / (ln a - ln b)."""
    return kernel_mean("atanh", a, b, dps)


def identric_mean(a, b, dps=None):
    """(1/e) (a^a / b^b)^(1/(a - b)), evaluated in log form."""
    return kernel_mean("identric", a, b, dps)


def contraharmonic(a, b, dps=None):
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    if a == b:
        return a
    lo, hi = (a, b) if a < b else (b, a)
    x = lo / hi
    return hi * (1 + x * x) / (1 + x)


def q2_over_lehmer(p, a, b, dps=None):
    """(a^2 + b^2)(a^(p-1) + b^(p-1)) / (2 (a^p + b^p)), i.e. Q^2 / L_(p-1)."""
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    p = ctx.convert(p)
    if a == b:
        return a
    lo, hi = (a, b) if a < b else (b, a)
    x = lo / hi
    return hi * ((1 + x * x) / 2) / lehmer_mean(p - 1, 1, x, dps)


def sandor_transform(a, b, dps=None) -> PositivePair:
    """Map (a, b) to (x, y) with A(x, y) = Q(a, b), G(x, y) = A(a, b)."""
    ctx = get_context(dps)
    a, b = _check_pair(ctx, a, b)
    lo, hi = (a, b) if a < b else (b, a)
    u = lo / hi
    root = hi * ctx.sqrt(2 * (1 + u * u))
    d = a - b
    return PositivePair((root + d) / 2, (root - d) / 2)
