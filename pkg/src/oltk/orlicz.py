"""Piecewise Orlicz functions given by their right derivative.

The right derivative ``p`` is affine on finitely many segments
``[u_{j-1}, u_j)`` (upward jumps allowed between them) and follows one of a
small catalog of analytic laws on ``[u_J, inf)``:

========  =====================  ===========================
kind      p(u)                   conjugate kind
========  =====================  ===========================
affine    a + b*u   (b >= 0)     affine (b > 0) / wall (b = 0)
power     a * u**b               power
exp       a * exp(b*u)           log
log       log(u/a) / b           exp
wall      +inf                   affine with b = 0
========  =====================  ===========================

``wall`` only arises as the conjugate of a function with bounded slope: the
conjugate is finite up to the wall and ``+inf`` beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PreconditionError

FINAL_KINDS = ("affine", "power", "exp", "log", "wall")
_REL = 1e-12

# JSON parameter names per kind, mapped onto the internal (a, b) pair
_PARAM_NAMES = {
    "affine": ("c", "s"),
    "power": ("c", "alpha"),
    "exp": ("a", "b"),
    "log": ("a", "b"),
    "wall": (),
}


@dataclass(frozen=True)
class Segment:
    u0: float
    u1: float
    p0: float
    slope: float

    @property
    def p_end(self) -> float:
        return self.p0 + self.slope * (self.u1 - self.u0)


@dataclass(frozen=True)
class Final:
    kind: str
    a: float = 0.0
    b: float = 0.0

    def p(self, u):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if self.kind == "affine":
                return self.a + self.b * u
            if self.kind == "power":
                return self.a * np.power(u, self.b)
            if self.kind == "exp":
                return self.a * np.exp(self.b * u)
            if self.kind == "log":
                return np.log(u / self.a) / self.b
            return np.full(np.shape(u), np.inf)

    def antiderivative(self, u):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if self.kind == "affine":
                return self.a * u + 0.5 * self.b * u * u
            if self.kind == "power":
                return self.a * np.power(u, self.b + 1) / (self.b + 1)
            if self.kind == "exp":
                return self.a / self.b * np.exp(self.b * u)
            if self.kind == "log":
                return (u * np.log(u / self.a) - u) / self.b
            return np.full(np.shape(u), np.inf)

    @property
    def bounded(self) -> bool:
        return self.kind == "affine" and self.b == 0.0


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= _REL * max(1.0, abs(x), abs(y))


def _canonical_segments(segments: list[Segment], final: Final) -> tuple[list[Segment], Final]:
    segs: list[Segment] = []
    for s in segments:
        if s.u1 <= s.u0:
            continue
        if segs:
            prev = segs[-1]
            if _close(prev.slope, s.slope) and _close(prev.p_end, s.p0):
                segs[-1] = Segment(prev.u0, s.u1, prev.p0, prev.slope)
                continue
        segs.append(s)
    # fold trailing segments lying on the final affine line into the final piece
    while segs and final.kind == "affine":
        last = segs[-1]
        if _close(last.slope, final.b) and _close(last.p0, final.a + final.b * last.u0) and _close(
            last.p_end, final.a + final.b * last.u1
        ):
            segs.pop()
        else:
            break
    return segs, final


class OrliczFunction:
    """Convex ``phi(u) = int_0^u p`` with piecewise right derivative ``p``."""

    def __init__(self, segments, final: Final):
        segs = [s if isinstance(s, Segment) else Segment(*map(float, s)) for s in segments]
        if final.kind not in FINAL_KINDS:
            raise PreconditionError(f"unknown final kind {final.kind!r}", field="final.kind")
        segs, final = _canonical_segments(segs, final)
        self.segments: tuple[Segment, ...] = tuple(segs)
        self.final = final
        self._validate()
        J = len(segs)
        self._starts = np.array([s.u0 for s in segs] + [self.final_start], dtype=float)
        self._p0 = np.array([s.p0 for s in segs], dtype=float)
        self._slope = np.array([s.slope for s in segs], dtype=float)
        phi = [0.0]
        for s in segs:
            L = s.u1 - s.u0
            phi.append(phi[-1] + s.p0 * L + 0.5 * s.slope * L * L)
        self._phi_start = np.array(phi)
        self._J = J

    # construction --------------------------------------------------------

    @classmethod
    def power(cls, exponent: float) -> "OrliczFunction":
        """``phi(u) = u**exponent`` for ``exponent > 1``."""
        if exponent <= 1:
            raise PreconditionError("power exponent must exceed 1", field="exponent")
        return cls([], Final("power", exponent, exponent - 1.0))

    @classmethod
    def linear(cls, slope: float) -> "OrliczFunction":
        """``phi(u) = slope * u``."""
        return cls([], Final("affine", slope, 0.0))

    def _validate(self) -> None:
        u = 0.0
        p_prev = 0.0
        for s in self.segments:
            if not _close(s.u0, u) or s.u1 <= s.u0:
                raise PreconditionError("segments must tile [0, u_J) contiguously", field="segments")
            if s.slope < 0 or s.p0 < 0:
                raise PreconditionError("p must be nonnegative and nondecreasing", field="segments")
            if s.p0 < p_prev * (1 - _REL) - _REL:
                raise PreconditionError("p may only jump upwards", field="segments")
            u, p_prev = s.u1, s.p_end
        f = self.final
        uJ = self.final_start
        if f.kind == "wall":
            if not self.segments:
                raise PreconditionError("a wall needs at least one segment before it", field="final")
            return
        if f.kind in ("power", "exp", "log") and not (f.a > 0 and f.b > 0):
            raise PreconditionError(f"{f.kind} parameters must be positive", field="final")
        if f.kind == "affine" and f.b < 0:
            raise PreconditionError("affine final slope must be >= 0", field="final")
        if f.kind == "log" and uJ < f.a * (1 - _REL):
            raise PreconditionError("log final piece must start at u >= a", field="final")
        if f.kind == "power" and uJ == 0 and f.b <= 0:
            raise PreconditionError("power exponent must be positive", field="final")
        pJ = float(f.p(uJ))
        if pJ < p_prev * (1 - _REL) - _REL:
            raise PreconditionError("p may only jump upwards at the final piece", field="final")
        if self.limit_slope == 0.0:
            raise PreconditionError("phi must not vanish identically", field="final")

    # structural queries --------------------------------------------------

    @property
    def final_start(self) -> float:
        return self.segments[-1].u1 if self.segments else 0.0

    @property
    def breakpoints(self) -> np.ndarray:
        """Segment starts and the final start: every point where ``p`` may jump or kink."""
        return self._starts.copy()

    @property
    def limit_slope(self) -> float:
        """``B = lim phi(u)/u = sup p``."""
        if self.final.bounded:
            return self.final.a
        return math.inf

    @property
    def domain_bound(self) -> float:
        """Largest ``u`` with ``phi(u) < inf``."""
        return self.final_start if self.final.kind == "wall" else math.inf

    @property
    def vanishes_near_zero(self) -> bool:
        s = self.segments
        if s:
            return s[0].p0 == 0.0 and s[0].slope == 0.0
        return self.final.kind == "affine" and self.final.a == 0.0 and self.final.b == 0.0

    @property
    def is_n_function(self) -> bool:
        return (
            float(self.p(0.0)) == 0.0
            and not self.vanishes_near_zero
            and self.limit_slope == math.inf
            and self.final.kind != "wall"
        )

    # evaluation ----------------------------------------------------------

    def p(self, u):
        """Right derivative, vectorised."""
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._starts, u, side="right") - 1
        idx = np.clip(idx, 0, self._J)
        out = self._final_values(u, idx, self.final.p)
        if self._J:
            seg = idx < self._J
            j = np.minimum(idx, self._J - 1)
            val = self._p0[j] + self._slope[j] * (np.where(seg, u, 0.0) - self._starts[j])
            out = np.where(seg, val, out)
        return out if out.ndim else float(out)

    def p_left(self, u):
        """``p_-(u) = sup{p(s) : s < u}`` with ``p_-(0) = 0``."""
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._starts, u, side="left") - 1
        idx = np.clip(idx, 0, self._J)
        if self.final.kind == "wall":
            out = np.where(idx >= self._J, np.inf, 0.0)
        else:
            out = self._final_values(u, idx, self.final.p)
        if self._J:
            seg = idx < self._J
            j = np.minimum(idx, self._J - 1)
            val = self._p0[j] + self._slope[j] * (np.where(seg, u, 0.0) - self._starts[j])
            out = np.where(seg, val, out)
        out = np.where(u <= 0, 0.0, out)
        return out if out.ndim else float(out)

    def phi(self, u):
        """``phi(u)``, vectorised; ``+inf`` beyond a wall or on overflow."""
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._starts, u, side="right") - 1
        idx = np.clip(idx, 0, self._J)
        uJ = self.final_start
        phiJ = self._phi_start[-1]
        if self.final.kind == "wall":
            out = np.where(u > uJ, np.inf, phiJ)
        else:
            G = self.final.antiderivative
            with np.errstate(invalid="ignore", over="ignore"):
                tail = phiJ + (G(np.where(idx >= self._J, u, uJ)) - G(uJ))
            out = np.where(np.isnan(tail), np.inf, tail)
        if self._J:
            seg = idx < self._J
            j = np.minimum(idx, self._J - 1)
            d = np.where(seg, u, 0.0) - self._starts[j]
            val = self._phi_start[j] + self._p0[j] * d + 0.5 * self._slope[j] * d * d
            out = np.where(seg, val, out)
        out = np.where(np.isinf(u), np.inf, out)
        return out if out.ndim else float(out)

    __call__ = phi

    def _final_values(self, u, idx, fn):
        on_final = idx >= self._J
        if self.final.kind == "wall":
            return np.where(on_final, np.inf, 0.0)
        uu = np.where(on_final, u, max(self.final_start, 1e-300))
        with np.errstate(invalid="ignore"):
            v = fn(uu)
        v = np.where(np.isinf(u), self.limit_slope, v)
        return np.where(on_final, v, 0.0)

    def inverse(self, y: float) -> float:
        """Smallest ``u`` with ``phi(u) >= y``."""
        if y <= 0:
            return 0.0
        lo, hi = 0.0, 1.0
        while self.phi(hi) < y:
            lo, hi = hi, hi * 2
            if hi > 1e300:
                return math.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.phi(mid) >= y:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-15 * hi:
                break
        return hi

    # conjugation ---------------------------------------------------------

    @cached_property
    def conjugate(self) -> "OrliczFunction":
        return conjugate(self)

    # serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        names = _PARAM_NAMES[self.final.kind]
        final = {"kind": self.final.kind}
        final.update(dict(zip(names, (self.final.a, self.final.b))))
        return {
            "segments": [
                {"u0": s.u0, "u1": s.u1, "p0": s.p0, "slope": s.slope} for s in self.segments
            ],
            "final": final,
        }

    @staticmethod
    def from_dict(d: dict) -> "OrliczFunction":
        try:
            segs = [Segment(float(s["u0"]), float(s["u1"]), float(s["p0"]), float(s["slope"])) for s in d.get("segments", [])]
            fd = d["final"]
            kind = fd["kind"]
            if kind not in _PARAM_NAMES:
                raise PreconditionError(f"unknown final kind {kind!r}", field="final.kind")
            params = [float(fd[n]) for n in _PARAM_NAMES[kind]]
        except KeyError as e:
            raise PreconditionError(f"missing key {e.args[0]!r}", field=str(e.args[0])) from None
        return OrliczFunction(segs, Final(kind, *params))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrliczFunction):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(self.to_dict()))

    def __repr__(self) -> str:
        segs = ", ".join(f"[{s.u0:g},{s.u1:g}):{s.p0:g}+{s.slope:g}du" for s in self.segments)
        f = self.final
        return f"OrliczFunction({segs}; {f.kind}(a={f.a:g}, b={f.b:g}) from {self.final_start:g})"


def conjugate(F: OrliczFunction) -> OrliczFunction:
    """Young conjugate ``psi(v) = sup_u (uv - phi(u))``, built structurally.

    ``q`` is the right-continuous generalised inverse of ``p``: sloped
    segments invert, jumps of ``p`` become flats of ``q`` and flats of ``p``
    become jumps of ``q``.
    """
    out: list[Segment] = []
    prev_end = 0.0
    for s in F.segments:
        if s.p0 > prev_end and not _close(s.p0, prev_end):
            out.append(Segment(prev_end, s.p0, s.u0, 0.0))
        if s.slope > 0:
            out.append(Segment(s.p0, s.p_end, s.u0, 1.0 / s.slope))
        prev_end = max(prev_end, s.p_end)
    f = F.final
    uJ = F.final_start
    if f.kind == "wall":
        return OrliczFunction(out, Final("affine", uJ, 0.0))
    pJ = float(f.p(uJ))
    if pJ > prev_end and not _close(pJ, prev_end):
        out.append(Segment(prev_end, pJ, uJ, 0.0))
    if f.kind == "affine":
        final = Final("wall") if f.b == 0 else Final("affine", -f.a / f.b, 1.0 / f.b)
    elif f.kind == "power":
        final = Final("power", f.a ** (-1.0 / f.b), 1.0 / f.b)
    elif f.kind == "exp":
        final = Final("log", f.a, f.b)
    else:
        final = Final("exp", f.a, f.b)
    if final.kind == "wall" and not out:
        # phi(u) = B*u: psi = 0 on [0, B], +inf beyond
        out.append(Segment(0.0, pJ, 0.0, 0.0))
    return OrliczFunction(out, final)


def phi(F: OrliczFunction, u):
    return F.phi(u)


def p(F: OrliczFunction, u):
    return F.p(u)


def p_left(F: OrliczFunction, u):
    return F.p_left(u)


def young_gap(F: OrliczFunction, u, v):
    """``phi(u) + psi(v) - u v``; zero exactly when ``p_-(u) <= v <= p(u)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    with np.errstate(invalid="ignore"):
        out = F.phi(u) + F.conjugate.phi(v) - u * v
    return out if np.ndim(out) else float(out)


def limit_slope(F: OrliczFunction) -> float:
    return F.limit_slope


def delta2(F: OrliczFunction) -> bool:
    """Global Delta_2, read off the catalog tag and the behaviour at zero."""
    if F.vanishes_near_zero:
        return False
    return F.final.kind in ("affine", "power", "log")


def nabla2(F: OrliczFunction) -> bool:
    return delta2(F.conjugate)


@dataclass(frozen=True)
class AffineStructure:
    """Maximal affine intervals of phi and the endpoint classes A, B, A', B'."""

    intervals: tuple[tuple[float, float], ...]
    A: tuple[float, ...]
    B: tuple[float, ...]
    A_prime: tuple[float, ...]
    B_prime: tuple[float, ...]

    def in_open_interval(self, u, tol: float = 0.0):
        """True where ``u`` lies strictly inside some affine interval (i.e. outside S)."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=bool)
        for a, b in self.intervals:
            pad_a = tol * max(1.0, abs(a))
            pad_b = tol * max(1.0, abs(b)) if math.isfinite(b) else 0.0
            out |= (u > a + pad_a) & (u < b - pad_b)
        return out

    def member(self, u, points, tol: float = 0.0):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=bool)
        for c in points:
            out |= np.abs(u - c) <= tol * max(1.0, abs(c))
        return out

    def interval_of(self, u: float) -> tuple[float, float] | None:
        for a, b in self.intervals:
            if a <= u <= b:
                return a, b
        return None


def affine_structure(F: OrliczFunction) -> AffineStructure:
    """Read the affine intervals off the zero-slope pieces of ``p``.

    An endpoint pair ``(a, b)`` goes to ``A'``/``B'`` when ``p_-(a) = p(a)``
    and to ``A``/``B`` otherwise; both classes are keyed on the left endpoint.
    """
    intervals = [(s.u0, s.u1) for s in F.segments if s.slope == 0.0]
    if F.final.bounded:
        intervals.append((F.final_start, math.inf))
    merged: list[tuple[float, float]] = []
    for a, b in intervals:
        if merged and merged[-1][1] == a and float(F.p_left(a)) == float(F.p(a)):
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    A, B, Ap, Bp = [], [], [], []
    for a, b in merged:
        cont = float(F.p_left(a)) == float(F.p(a))
        (Ap if cont else A).append(a)
        if math.isfinite(b):
            (Bp if cont else B).append(b)
    return AffineStructure(tuple(merged), tuple(A), tuple(B), tuple(Ap), tuple(Bp))


def is_strictly_convex(F: OrliczFunction) -> bool:
    return not affine_structure(F).intervals
