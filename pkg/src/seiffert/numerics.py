"""Root bracketing, extremum search and limit extrapolation.

All routines are backend-agnostic: they only use arithmetic and comparisons
on whatever number type the callable returns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

__all__ = [
    "Bracket",
    "ConvergenceError",
    "bisect",
    "sign_scan",
    "golden_section",
    "richardson",
]


class ConvergenceError(ArithmeticError):
    """A numerical procedure failed to reach its stated tolerance."""


@dataclass(frozen=True)
class Bracket:
    """A root certified by a sign change on ``[lo, hi]``."""

    x: object
    lo: object
    hi: object
    residual: object
    iterations: int
    sign_lo: int
    sign_hi: int

    @property
    def half_width(self):
        return (self.hi - self.lo) / 2


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_scan(f: Callable, points: Sequence) -> list[tuple]:
    """Consecutive pairs of ``points`` over which ``f`` changes sign.

    Exact zeros at a scan point are returned as degenerate intervals
    ``(x, x)``.
    """
    values = [f(x) for x in points]
    out = []
    for i, v in enumerate(values):
        if v == 0:
            out.append((points[i], points[i]))
        elif i + 1 < len(values) and _sign(v) * _sign(values[i + 1]) < 0:
            out.append((points[i], points[i + 1]))
    return out


def bisect(f: Callable, lo, hi, tol, max_iter: int = 10_000) -> Bracket:
    """Bisect a sign change of ``f`` on ``[lo, hi]`` down to width ``2*tol``."""
    flo, fhi = f(lo), f(hi)
    slo, shi = _sign(flo), _sign(fhi)
    if slo == 0:
        return Bracket(lo, lo, lo, abs(flo), 0, 0, 0)
    if shi == 0:
        return Bracket(hi, hi, hi, abs(fhi), 0, 0, 0)
    if slo == shi:
        raise ValueError("bisect needs a sign change on the initial bracket")
    it = 0
    while (hi - lo) > 2 * tol:
        if it >= max_iter:
            raise ConvergenceError(f"bisection stalled after {it} steps, width {hi - lo}")
        mid = (lo + hi) / 2
        if not lo < mid < hi:
            break  # bracket is at the resolution of the number type
        fm = f(mid)
        sm = _sign(fm)
        it += 1
        if sm == 0:
            # zero at working precision: keep the enclosing certified bracket
            return Bracket(mid, lo, hi, abs(fm), it, slo, shi)
        if sm == slo:
            lo = mid
        else:
            hi = mid
    x = (lo + hi) / 2
    return Bracket(x, lo, hi, abs(f(x)), it, slo, shi)


def golden_section(f: Callable, lo, hi, tol, maximize: bool = False, max_iter: int = 10_000):
    """Locate the extremum of a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x), lo, hi)`` with the final bracket.
    """
    sign = -1 if maximize else 1
    g = lambda x: sign * f(x)  # noqa: E731
    # 1/phi in the number type of the bracket
    invphi = ((lo * 0 + 5) ** 0.5 - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    gc, gd = g(c), g(d)
    it = 0
    while (hi - lo) > tol:
        if it >= max_iter:
            raise ConvergenceError("golden-section search did not converge")
        it += 1
        if gc < gd:
            hi, d, gd = d, c, gc
            c = hi - invphi * (hi - lo)
            gc = g(c)
        else:
            lo, c, gc = c, d, gd
            d = lo + invphi * (hi - lo)
            gd = g(d)
    x = (lo + hi) / 2
    return x, f(x), lo, hi


def richardson(values: Sequence, ratio, exponents: Sequence):
    """Extrapolate ``values[i] ~ V + sum_j c_j h_i**exponents[j]`` to h -> 0.

    Step sizes shrink by ``ratio`` (> 1) between successive entries.  Returns
    ``(estimate, error)`` where ``error`` is the difference between the two
    most extrapolated diagonal entries.
    """
    n = len(values)
    if n < 2:
        raise ValueError("richardson needs at least two values")
    if len(exponents) < n - 1:
        raise ValueError("need one exponent per elimination level")
    table = [list(values)]
    for j in range(1, n):
        prev = table[-1]
        factor = ratio ** exponents[j - 1]
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1)
                      for i in range(len(prev) - 1)])
    diag = [row[-1] for row in table]
    return diag[-1], abs(diag[-1] - diag[-2])
