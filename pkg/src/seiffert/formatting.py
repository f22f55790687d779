"""Decimal rendering of extended-precision numbers with certified digits."""

from __future__ import annotations

import json
import math
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext

import mpmath

__all__ = [
    "certified_digits",
    "format_bracket",
    "format_certified",
    "format_number",
    "render_json",
]


def certified_digits(value, error, dps: int) -> int:
    """Significant digits of ``value`` justified by an absolute ``error``."""
    cap = max(1, dps - 5)
    value = mpmath.mpf(value)
    error = abs(mpmath.mpf(error)) if error is not None else mpmath.mpf(0)
    if value == 0:
        return 1
    if error == 0:
        return cap
    lead = int(mpmath.floor(mpmath.log10(abs(value))))
    decimals = int(mpmath.floor(-mpmath.log10(error)))
    return max(1, min(cap, lead + 1 + decimals))


def format_number(value, digits: int, strip_zeros: bool = False) -> str:
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    with mpmath.workdps(digits + 10):
        value = mpmath.mpf(value)
        if mpmath.isinf(value):
            return "inf" if value > 0 else "-inf"
        return mpmath.nstr(value, digits, strip_zeros=strip_zeros,
                           min_fixed=-6, max_fixed=8)


def format_certified(value, error, dps: int) -> tuple[str, int]:
    """``(text, digits)``: ``value`` rounded to its certified significant digits."""
    d = certified_digits(value, error, dps)
    return format_number(value, d), d


def render_json(obj) -> str:
    """Canonical JSON text; parsing and re-rendering reproduces it exactly."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"



def format_bracket(lo, hi, digits: int) -> tuple[str, str]:
    """Render ``[lo, hi]`` rounded outward to ``digits`` significant digits."""
    with mpmath.workdps(digits + 20):
        dlo = Decimal(mpmath.nstr(mpmath.mpf(lo), digits + 15, min_fixed=-30, max_fixed=30))
        dhi = Decimal(mpmath.nstr(mpmath.mpf(hi), digits + 15, min_fixed=-30, max_fixed=30))
    ref = max(abs(dlo), abs(dhi))
    lead = ref.adjusted() if ref else 0
    quantum = Decimal(1).scaleb(lead - digits + 1)
    with localcontext() as dc:
        dc.prec = digits + 30
        return (str(dlo.quantize(quantum, rounding=ROUND_FLOOR)),
                str(dhi.quantize(quantum, rounding=ROUND_CEILING)))
