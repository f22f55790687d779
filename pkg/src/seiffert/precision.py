"""Native and extended-precision arithmetic backends.

Every numeric routine in the package takes a *context* object exposing the
subset of the mpmath context API it needs (``mpf``, ``log``, ``atan``, ...).
``NATIVE`` wraps the :mod:`math` module; :func:`get_context` hands out
mpmath contexts at a fixed number of decimal digits.

mpmath contexts bump their working precision internally while evaluating
some functions, so a context must never be shared between threads.  The
cache below is thread-local for that reason.
"""

from __future__ import annotations

import math
import sys
import threading

import mpmath

__all__ = ["NATIVE", "NativeContext", "get_context", "to_context", "DEFAULT_DPS"]

DEFAULT_DPS = 50


class NativeContext:
    """Binary64 backend with the same attribute names as an mpmath context."""

    dps = None
    mpf = float
    pi = math.pi
    e = math.e
    inf = math.inf
    eps = sys.float_info.epsilon

    sqrt = staticmethod(math.sqrt)
    exp = staticmethod(math.exp)
    expm1 = staticmethod(math.expm1)
    log = staticmethod(math.log)
    ln = staticmethod(math.log)
    log1p = staticmethod(math.log1p)
    atan = staticmethod(math.atan)
    asin = staticmethod(math.asin)
    asinh = staticmethod(math.asinh)
    atanh = staticmethod(math.atanh)
    @staticmethod
    def cbrt(x):
        if hasattr(math, "cbrt"):  # 3.11+
            return math.cbrt(x)
        return math.copysign(abs(x) ** (1 / 3), x)

    @staticmethod
    def convert(x):
        return float(x)

    @staticmethod
    def power(x, y):
        return math.pow(x, y)

    @staticmethod
    def isfinite(x):
        return math.isfinite(x)

    def __repr__(self):
        return "NativeContext()"


NATIVE = NativeContext()

_local = threading.local()


def get_context(dps: int | None):
    """Return the backend for ``dps`` decimal digits (``None`` = native floats)."""
    if dps is None:
        return NATIVE
    dps = int(dps)
    if dps < 1:
        raise ValueError(f"precision must be a positive number of digits, got {dps}")
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(dps)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.dps = dps
        cache[dps] = ctx
    return ctx


def to_context(ctx, value):
    """Convert ``value`` (int, float, str, mpf) into a number of ``ctx``."""
    if ctx is NATIVE:
        return float(value)
    return ctx.convert(value)
