"""Ratio grids on (0, 1) clustered toward both endpoints."""

from __future__ import annotations

import numpy as np

__all__ = ["ratio_grid", "MIN_OFFSET"]

#: closest approach of any grid point to either end of the domain
MIN_OFFSET = 1e-8


def ratio_grid(n: int, lo: float = 0.0, hi: float = 1.0) -> list[float]:
    """``n`` distinct ratios in (lo, hi), log-spaced toward both ends.

    Half the points sit at ``lo + w * 10^s`` and half at ``hi - w * 10^s``
    with ``s`` evenly spaced in [-8, log10(1/2)] (w = hi - lo), so the
    binding regions x -> 0 and x -> 1 are resolved down to 1e-8.
    """
    if n < 2:
        raise ValueError("a ratio grid needs at least two points")
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"domain must satisfy 0 <= lo < hi <= 1, got ({lo}, {hi})")
    w = hi - lo
    n_left = n // 2
    n_right = n - n_left
    top = np.log10(0.5)
    left = lo + w * np.logspace(np.log10(MIN_OFFSET), top, n_left, endpoint=False)
    right = hi - w * np.logspace(np.log10(MIN_OFFSET), top, n_right)
    pts = np.concatenate([left, right[::-1]])
    pts = np.unique(pts)
    if len(pts) != n:  # pragma: no cover - only for pathological n
        raise ValueError(f"grid of {n} points collapsed to {len(pts)} distinct values")
    return [float(x) for x in pts]
