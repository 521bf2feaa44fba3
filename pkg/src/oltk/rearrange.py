"""Distribution functions, decreasing rearrangements and measure-preserving maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .step import EQ_TOL, StepFunction, Weight, merged_grid


def _require_finite_support(f: StepFunction, name: str = "f") -> None:
    if f.tail != 0.0:
        raise PreconditionError(f"{name} must have tail 0 (finite support)", field=name)


def _sorted_pieces(f: StepFunction):
    """Nonzero pieces of |f| ordered by value descending, ties by position."""
    a = np.abs(f.values)
    nz = np.flatnonzero(a > 0)
    order = nz[np.argsort(-a[nz], kind="stable")]
    return order, a[order], f.lengths[order]


def _exact_measure(f: StepFunction, mask: np.ndarray) -> float:
    # correctly rounded sum of the exact piece lengths, so results are order independent
    b = f.breakpoints
    return math.fsum(np.concatenate((b[1:][mask], -b[:-1][mask])))


def distribution(f: StepFunction, lam: float) -> float:
    """``mu{t : |f(t)| > lam}``."""
    if lam <= 0:
        raise PreconditionError("lambda must be > 0", field="lambda")
    if abs(f.tail) > lam:
        return math.inf
    return _exact_measure(f, np.abs(f.values) > lam)


def rearrangement(f: StepFunction) -> StepFunction:
    """Nonincreasing right-continuous ``f*`` equimeasurable with ``|f|``."""
    _require_finite_support(f)
    order, vals, _ = _sorted_pieces(f)
    return StepFunction(_target_ends(f, order), vals, 0.0)


def _target_ends(f: StepFunction, order: np.ndarray) -> np.ndarray:
    # correctly rounded prefix sums of the exact lengths, matching distribution()
    b = f.breakpoints
    acc, ends = Fraction(0), [0.0]
    for i in order:
        acc += Fraction(float(b[i + 1])) - Fraction(float(b[i]))
        ends.append(float(acc))
    return np.array(ends)


def is_nonincreasing(f: StepFunction) -> bool:
    seq = np.append(f.values, f.tail)
    return bool(np.all(np.diff(seq) <= 0))


@dataclass(frozen=True)
class MeasurePreservingMap:
    """Piecewise translation from ``supp f`` onto ``[0, mu(supp f))``.

    Each piece is ``(src_a, src_b, tgt_a, tgt_b)`` with equal lengths; every
    piece is orientation preserving.
    """

    pieces: tuple[tuple[float, float, float, float], ...]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, np.nan)
        for sa, sb, ta, _ in self.pieces:
            m = (t >= sa) & (t < sb)
            out = np.where(m, ta + (t - sa), out)
        return out if out.ndim else float(out)

    def inverse(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, np.nan)
        for sa, _, ta, tb in self.pieces:
            m = (s >= ta) & (s < tb)
            out = np.where(m, sa + (s - ta), out)
        return out if out.ndim else float(out)

    def pull_back(self, g: StepFunction) -> StepFunction:
        """``g o sigma`` on the source support, zero elsewhere."""
        out = []
        for sa, sb, ta, tb in self.pieces:
            grid = merged_grid(g, upto=tb)
            grid = grid[(grid >= ta) & (grid <= tb)]
            grid = np.unique(np.concatenate(([ta], grid, [tb])))
            src = source_points(sa, sb, ta, tb, grid)
            for a, s0, s1 in zip(grid[:-1], src[:-1], src[1:]):
                out.append((s0, s1, float(g(a))))
        return StepFunction.from_pieces(out)

    def to_list(self) -> list[list[float]]:
        return [list(p) for p in self.pieces]


def source_points(sa: float, sb: float, ta: float, tb: float, grid: np.ndarray) -> np.ndarray:
    """Translate target points in ``[ta, tb]`` back into ``[sa, sb]``, keeping the ends exact."""
    src = np.clip(sa + (np.asarray(grid, dtype=float) - ta), sa, sb)
    src[0], src[-1] = sa, sb
    return np.maximum.accumulate(src)


def mpt(f: StepFunction) -> MeasurePreservingMap:
    """A map ``sigma`` with ``|f(t)| = f*(sigma(t))`` on ``supp f``.

    Equal-valued pieces keep their left-to-right order (stable sort).
    """
    _require_finite_support(f)
    order, _, _ = _sorted_pieces(f)
    tgt = _target_ends(f, order)
    b = f.breakpoints
    pieces = tuple(
        (float(b[i]), float(b[i + 1]), float(ta), float(tb))
        for i, ta, tb in zip(order, tgt[:-1], tgt[1:])
    )
    return MeasurePreservingMap(pieces)


def _decreasing_version(g: StepFunction) -> StepFunction:
    if isinstance(g, Weight) or (g.tail > 0 and is_nonincreasing(g)):
        return g
    return rearrangement(g)


def submajorizes(g: StepFunction, f: StepFunction) -> bool:
    """True iff ``f`` is submajorized by ``g``: ``int_0^t f* <= int_0^t g*`` for all t."""
    fs = rearrangement(f)
    gs = _decreasing_version(g)
    grid = merged_grid(fs, gs)
    F = fs.cumulative(grid)
    G = gs.cumulative(grid)
    return bool(np.all(F <= G + EQ_TOL * np.maximum(1.0, np.abs(G))))


def piece_masses(fstar: StepFunction, omega: Weight) -> tuple[np.ndarray, np.ndarray]:
    """Values of ``f*`` and the omega-mass ``W(t_i) - W(t_{i-1})`` of each piece."""
    t = fstar.breakpoints
    return fstar.values, omega.mass(t[:-1], t[1:])


def lorentz_norm(f: StepFunction, omega: Weight) -> float:
    """``int f* omega``."""
    ys, dW = piece_masses(rearrangement(f), omega)
    return float(np.dot(ys, dW))


def marcinkiewicz_norm(f: StepFunction, omega: Weight) -> float:
    """``sup_t int_0^t f* / W(t)``.

    Both cumulatives are piecewise linear on the merged grid, so the ratio is
    linear-fractional (monotone) on each cell: the sup sits at a grid point or
    at ``t -> 0+`` where it equals ``f*(0)/omega(0)``.
    """
    fs = rearrangement(f)
    if fs.n_pieces == 0:
        return 0.0
    grid = merged_grid(fs, omega)[1:]
    ratios = fs.cumulative(grid) / omega.W(grid)
    return float(max(fs.values[0] / omega.head, ratios.max()))
