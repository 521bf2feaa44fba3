"""Step functions on [0, inf) under Lebesgue measure, and decreasing weights.

A step function is stored as breakpoints ``0 = t0 < t1 < ... < tK``, piece
values ``v1..vK`` (``v_i`` taken on ``[t_{i-1}, t_i)``) and a ``tail`` value
taken on ``[tK, inf)``.  Instances are immutable and always canonical: no two
adjacent pieces share a value and the last piece differs from the tail.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import PreconditionError

EQ_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class StepFunction:
    """Finitely many pieces, right-continuous, constant tail."""

    __slots__ = ("breakpoints", "values", "tail")

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float], tail: float = 0.0):
        t = np.asarray(breakpoints, dtype=float).ravel()
        v = np.asarray(values, dtype=float).ravel()
        if t.size == 0:
            t = np.zeros(1)
        if t.size != v.size + 1:
            raise PreconditionError("need len(breakpoints) == len(values) + 1", field="breakpoints")
        if t[0] != 0.0:
            raise PreconditionError("first breakpoint must be 0", field="breakpoints")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v)) and math.isfinite(tail)):
            raise PreconditionError("breakpoints, values and tail must be finite", field="values")
        if np.any(np.diff(t) <= 0):
            raise PreconditionError("breakpoints must be strictly increasing", field="breakpoints")
        t, v = _canonical(t, v, float(tail))
        self.breakpoints = _frozen(t)
        self.values = _frozen(v)
        self.tail = float(tail)

    # construction helpers -------------------------------------------------

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple[float, float, float]], tail: float = 0.0) -> "StepFunction":
        """Build from ``(a, b, value)`` triples; uncovered gaps are zero."""
        pieces = sorted((float(a), float(b), float(c)) for a, b, c in pieces if b > a)
        t, v = [0.0], []
        for a, b, c in pieces:
            if a < t[-1]:
                raise PreconditionError("pieces overlap", field="pieces")
            if a > t[-1]:
                v.append(0.0)
                t.append(a)
            v.append(c)
            t.append(b)
        return cls(t, v, tail)

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunction":
        return cls.from_pieces([(a, b, height)])

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls([0.0], [], 0.0)

    # basic queries --------------------------------------------------------

    @property
    def n_pieces(self) -> int:
        return self.values.size

    @property
    def end(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def is_zero(self) -> bool:
        return self.tail == 0.0 and not np.any(self.values)

    def support_measure(self) -> float:
        if self.tail != 0.0:
            return math.inf
        return float(self.lengths[self.values != 0].sum())

    def __call__(self, t):
        return evaluate(self, t)

    def integral(self, a: float = 0.0, b: float = math.inf) -> float:
        return integrate(self, a, b)

    def cumulative(self, t):
        """Vectorised ``int_0^t f``."""
        t = np.asarray(t, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.values * self.lengths)))
        vals = np.append(self.values, self.tail)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        with np.errstate(invalid="ignore"):
            out = cum[idx] + vals[idx] * (t - self.breakpoints[idx])
        out = np.where(np.isnan(out), cum[idx], out)
        return out if out.ndim else float(out)

    # arithmetic -----------------------------------------------------------

    def map_values(self, fn: Callable[[np.ndarray], np.ndarray]) -> "StepFunction":
        return StepFunction(self.breakpoints, fn(self.values), float(fn(np.array([self.tail]))[0]))

    def __abs__(self) -> "StepFunction":
        return self.map_values(np.abs)

    def __neg__(self) -> "StepFunction":
        return self.map_values(np.negative)

    def __mul__(self, c: float) -> "StepFunction":
        if isinstance(c, StepFunction):
            return combine(self, c, np.multiply)
        return StepFunction(self.breakpoints, self.values * float(c), self.tail * float(c))

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "StepFunction":
        return self * (1.0 / float(c))

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return combine(self, other, np.add)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return combine(self, other, np.subtract)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            self.tail == other.tail
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:
        return hash((self.breakpoints.tobytes(), self.values.tobytes(), self.tail))

    def allclose(self, other: "StepFunction", atol: float = 1e-12) -> bool:
        d = combine(self, other, np.subtract)
        return bool(np.all(np.abs(d.values) <= atol) and abs(d.tail) <= atol)

    def __repr__(self) -> str:
        pieces = ", ".join(
            f"[{a:g},{b:g}):{c:g}" for a, b, c in zip(self.breakpoints[:-1], self.breakpoints[1:], self.values)
        )
        return f"{type(self).__name__}({pieces}; tail={self.tail:g})"

    # serialisation --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(x) for x in self.breakpoints],
            "values": [float(x) for x in self.values],
            "tail": self.tail,
        }

    @staticmethod
    def from_dict(d: dict) -> "StepFunction":
        if d.get("kind") == "weight":
            return Weight.from_dict(d)
        try:
            return StepFunction(d["breakpoints"], d["values"], d.get("tail", 0.0))
        except KeyError as e:
            raise PreconditionError(f"missing key {e.args[0]!r}", field=e.args[0]) from None


def _canonical(t: np.ndarray, v: np.ndarray, tail: float) -> tuple[np.ndarray, np.ndarray]:
    if v.size == 0:
        return t[:1], v
    keep = np.ones(v.size, dtype=bool)
    keep[1:] = v[1:] != v[:-1]
    # a piece survives iff it starts a new run; its end is the next survivor's start
    starts = t[:-1][keep]
    vals = v[keep]
    ends = np.append(starts[1:], t[-1])
    while vals.size and vals[-1] == tail:
        vals = vals[:-1]
        ends = ends[:-1]
        starts = starts[:-1]
    if vals.size == 0:
        return np.zeros(1), vals
    return np.concatenate(([0.0], ends)), vals


class Weight(StepFunction):
    """Nonincreasing step weight with strictly positive tail, so ``W(inf) = inf``."""

    __slots__ = ()

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float], tail: float):
        super().__init__(breakpoints, values, tail)
        seq = np.append(self.values, self.tail)
        if self.tail <= 0:
            raise PreconditionError("weight tail must be > 0", field="tail")
        if np.any(np.diff(seq) > 0):
            raise PreconditionError("weight values must be nonincreasing", field="values")

    @classmethod
    def constant(cls, c: float = 1.0) -> "Weight":
        return cls([0.0], [], c)

    @classmethod
    def from_pieces(cls, pieces, tail: float = 1.0) -> "Weight":  # type: ignore[override]
        s = StepFunction.from_pieces(pieces, tail)
        return cls(s.breakpoints, s.values, s.tail)

    @property
    def head(self) -> float:
        return float(self.values[0]) if self.n_pieces else self.tail

    def W(self, t):
        return self.cumulative(t)

    def mass(self, a, b):
        """``W(b) - W(a)`` elementwise."""
        return self.cumulative(b) - self.cumulative(a)

    def inverse_W(self, w):
        """The unique ``t`` with ``W(t) = w`` (W is strictly increasing)."""
        w = np.asarray(w, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.values * self.lengths)))
        vals = np.append(self.values, self.tail)
        idx = np.searchsorted(cum, w, side="right") - 1
        out = self.breakpoints[idx] + (w - cum[idx]) / vals[idx]
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["kind"] = "weight"
        return d

    @staticmethod
    def from_dict(d: dict) -> "Weight":
        try:
            return Weight(d["breakpoints"], d["values"], d["tail"])
        except KeyError as e:
            raise PreconditionError(f"missing key {e.args[0]!r}", field=e.args[0]) from None


# ---------------------------------------------------------------------------
# module-level operations


def evaluate(f: StepFunction, t):
    """Piece value at ``t`` (right-continuous); vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise PreconditionError("t must be >= 0", field="t")
    idx = np.searchsorted(f.breakpoints, t, side="right") - 1
    vals = np.append(f.values, f.tail)
    out = vals[np.minimum(idx, f.n_pieces)]
    return out if out.ndim else float(out)


def integrate(f: StepFunction, a: float = 0.0, b: float = math.inf) -> float:
    """Exact Lebesgue integral of ``f`` over ``[a, b]``."""
    if not 0 <= a <= b:
        raise PreconditionError("need 0 <= a <= b", field="a")
    if a == b:
        return 0.0
    if math.isinf(b) and f.tail != 0.0:
        return math.copysign(math.inf, f.tail)
    return float(f.cumulative(b) - f.cumulative(a))


def merged_grid(*fs: StepFunction, upto: float | None = None) -> np.ndarray:
    grid = np.unique(np.concatenate([f.breakpoints for f in fs]))
    if upto is not None:
        grid = np.unique(np.append(grid[grid < upto], upto))
    return grid


def combine(f: StepFunction, g: StepFunction, op: Callable) -> StepFunction:
    """Apply a pointwise binary ``op`` on the common refinement of both grids."""
    grid = merged_grid(f, g)
    left = grid[:-1]
    fv = evaluate(f, left) if left.size else np.zeros(0)
    gv = evaluate(g, left) if left.size else np.zeros(0)
    vals = np.asarray(op(fv, gv), dtype=float)
    tail = float(op(np.array([f.tail]), np.array([g.tail]))[0])
    return StepFunction(grid, vals, tail)


def cumulative_W(omega: Weight, t):
    """``W(t) = int_0^t omega``."""
    return omega.W(t)


def maximal_constant_intervals(omega: Weight) -> list[tuple[float, float]]:
    """Maximal intervals of constancy: the canonical pieces plus the tail ray."""
    t = omega.breakpoints
    out = [(float(a), float(b)) for a, b in zip(t[:-1], t[1:])]
    out.append((float(t[-1]), math.inf))
    return out


def is_regular(omega: Weight, t_probe_count: int = 0) -> tuple[bool, float]:
    """Decide ``inf_t W(2t)/W(t) > 1`` and return the infimum.

    ``W`` is piecewise linear, so the ratio is linear-fractional (hence
    monotone) between consecutive points of ``{t_i} U {t_i / 2}``; the infimum
    is the smallest value at those points or at the limits ``t -> 0`` and
    ``t -> inf``, both of which equal 2.  ``t_probe_count`` adds log-spaced
    probes as a cross-check.
    """
    t = omega.breakpoints[1:]
    cand = np.concatenate((t, t / 2))
    if t_probe_count > 0:
        hi = max(omega.end, 1.0) * 4
        cand = np.concatenate((cand, np.geomspace(hi * 1e-6, hi, t_probe_count)))
    cand = cand[cand > 0]
    K = 2.0
    if cand.size:
        K = min(K, float(np.min(omega.W(2 * cand) / omega.W(cand))))
    return K > 1 + EQ_TOL, K
