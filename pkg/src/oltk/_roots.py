"""Threshold search for monotone predicates."""

from __future__ import annotations

import math
from typing import Callable

#: default relative bracket width; loops stop earlier only at float resolution
BISECT_RTOL = 1e-10


def threshold(
    pred: Callable[[float], bool],
    start: float = 1.0,
    rtol: float = 0.0,
    max_iter: int = 400,
) -> tuple[float, float]:
    """Bracket ``t* = inf{t > 0 : pred(t)}`` for a predicate monotone in ``t``.

    Returns ``(lo, hi)`` with ``pred(lo)`` false and ``pred(hi)`` true, shrunk
    until ``hi - lo <= rtol * hi`` or until the midpoint is no longer
    representable. ``lo = 0`` means the predicate holds for every tested
    ``t > 0``; ``hi = inf`` means it never holds.
    """
    t = start
    if pred(t):
        hi = t
        lo = t / 2
        while pred(lo):
            hi = lo
            lo /= 2
            if lo < 1e-300:
                return 0.0, hi
    else:
        lo = t
        hi = t * 2
        while not pred(hi):
            lo = hi
            hi *= 2
            if hi > 1e300:
                return lo, math.inf
    for _ in range(max_iter):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi
