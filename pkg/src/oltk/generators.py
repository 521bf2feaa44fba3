"""Seeded random instances: step functions, weights and catalog Orlicz functions."""

from __future__ import annotations

import numpy as np

from .orlicz import Final, OrliczFunction, Segment
from .step import StepFunction, Weight

PHI_KINDS = ("power", "piecewise", "bounded", "exp", "log")


def random_step(rng: np.random.Generator, max_pieces: int = 32, signed: bool = True, zeros: bool = True) -> StepFunction:
    """Step function with finite support, random lengths and (possibly signed, zero) values."""
    n = int(rng.integers(1, max_pieces + 1))
    bp = np.concatenate(([0.0], np.cumsum(rng.uniform(0.05, 1.0, n))))
    # draw from a small value pool so ties occur
    pool = rng.uniform(0.1, 3.0, size=max(1, n // 2 + 1))
    vals = rng.choice(pool, n)
    if signed:
        vals = vals * rng.choice([-1.0, 1.0], n)
    if zeros:
        vals = np.where(rng.random(n) < 0.15, 0.0, vals)
    if not np.any(vals):
        vals[0] = pool[0]
    return StepFunction(bp, vals)


def random_decreasing(rng: np.random.Generator, max_pieces: int = 16) -> StepFunction:
    n = int(rng.integers(1, max_pieces + 1))
    bp = np.concatenate(([0.0], np.cumsum(rng.uniform(0.05, 1.0, n))))
    vals = np.sort(rng.uniform(0.1, 3.0, n))[::-1]
    return StepFunction(bp, vals)


def random_weight(rng: np.random.Generator, max_pieces: int = 5) -> Weight:
    m = int(rng.integers(0, max_pieces + 1))
    tail = float(rng.uniform(0.2, 1.5))
    bp = np.concatenate(([0.0], np.cumsum(rng.uniform(0.1, 1.5, m))))
    vals = np.sort(tail * rng.uniform(1.0, 5.0, m))[::-1]
    return Weight(bp, vals, tail)


def _random_segments(rng: np.random.Generator, n: int, flats: bool = True, jumps: bool = True) -> list[Segment]:
    segs = []
    u, p = 0.0, 0.0
    for j in range(n):
        L = float(rng.uniform(0.3, 1.5))
        p0 = p + (float(rng.uniform(0.1, 1.0)) if jumps and rng.random() < 0.3 else 0.0)
        slope = 0.0 if flats and j > 0 and rng.random() < 0.4 else float(rng.uniform(0.3, 3.0))
        segs.append(Segment(u, u + L, p0, slope))
        u, p = u + L, p0 + slope * L
    return segs


def random_phi(rng: np.random.Generator, kind: str | None = None) -> OrliczFunction:
    """A catalog Orlicz function of the given kind (random kind if omitted)."""
    kind = kind or str(rng.choice(PHI_KINDS))
    if kind == "power":
        return OrliczFunction.power(float(rng.uniform(1.2, 4.0)))
    if kind == "piecewise":
        segs = _random_segments(rng, int(rng.integers(1, 4)))
        pe = segs[-1].p_end
        b = float(rng.uniform(0.3, 3.0))
        a = pe - b * segs[-1].u1 + (float(rng.uniform(0.1, 1.0)) if rng.random() < 0.3 else 0.0)
        return OrliczFunction(segs, Final("affine", a, b))
    if kind == "bounded":
        segs = _random_segments(rng, int(rng.integers(1, 4)), flats=False)
        B = segs[-1].p_end + float(rng.uniform(0.0, 1.0))
        return OrliczFunction(segs, Final("affine", B, 0.0))
    if kind == "exp":
        b = float(rng.uniform(0.3, 1.5))
        if rng.random() < 0.5:
            return OrliczFunction([], Final("exp", float(rng.uniform(0.5, 2.0)), b))
        s = float(rng.uniform(0.5, 2.0))
        # continuous hand-over at u = 1: a e^b = s
        return OrliczFunction([Segment(0.0, 1.0, 0.0, s)], Final("exp", s * np.exp(-b), b))
    if kind == "log":
        s = float(rng.uniform(0.5, 2.0))
        b = float(rng.uniform(0.5, 2.0))
        # continuous at u = 1: log(1/a)/b = s
        return OrliczFunction([Segment(0.0, 1.0, 0.0, s)], Final("log", float(np.exp(-s * b)), b))
    raise ValueError(f"unknown kind {kind!r}")


def log_fixture() -> OrliczFunction:
    """``p(u) = u`` on ``[0, 1)`` and ``p(u) = 1 + ln u`` beyond: conjugate of exponential growth."""
    return OrliczFunction([Segment(0.0, 1.0, 0.0, 1.0)], Final("log", float(np.exp(-1.0)), 1.0))


def affine_interval_fixture() -> OrliczFunction:
    """``p = 2u`` on ``[0,1)``, ``2`` on ``[1,2)``, ``2u - 2`` beyond: one affine interval ``(1, 2)``."""
    return OrliczFunction([Segment(0.0, 1.0, 0.0, 2.0), Segment(1.0, 2.0, 2.0, 0.0)], Final("affine", -2.0, 2.0))
