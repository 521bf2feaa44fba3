"""Modular, Luxemburg and Orlicz (Amemiya) norms, and the minimiser set K(x)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from ._roots import threshold
from .errors import InternalConsistencyError, PreconditionError
from .orlicz import OrliczFunction, delta2
from .rearrange import lorentz_norm, piece_masses, rearrangement
from .step import StepFunction, Weight

CASE_TAGS = ("N-function", "bounded-slope-strict", "bounded-slope-boundary", "bounded-slope-empty")
SINGLETON_TOL = 1e-10


def _masses(omega: Weight, f: StepFunction) -> tuple[np.ndarray, np.ndarray]:
    return piece_masses(rearrangement(f), omega)


def _sum(vals: np.ndarray, dW: np.ndarray) -> float:
    if np.any(np.isinf(vals) & (dW > 0)):
        return math.inf
    with np.errstate(invalid="ignore"):
        return float(np.dot(np.where(dW > 0, vals, 0.0), dW))


def modular_rho(F: OrliczFunction, omega: Weight, f: StepFunction) -> float:
    """``int phi(f*) omega``, summed in closed form piece by piece."""
    ys, dW = _masses(omega, f)
    return _sum(F.phi(ys), dW)


def luxemburg_norm(F: OrliczFunction, omega: Weight, f: StepFunction, rtol: float = 0.0) -> float:
    """``inf{lam > 0 : rho(f/lam) <= 1}`` by bisection."""
    ys, dW = _masses(omega, f)
    if ys.size == 0:
        return 0.0
    scale = float(ys[0])
    _, hi = threshold(lambda lam: _sum(F.phi(ys / (lam * scale)), dW) <= 1.0, rtol=rtol)
    lam = hi * scale
    if delta2(F):
        r = _sum(F.phi(ys / lam), dW)
        if abs(r - 1.0) > 1e-8:
            raise InternalConsistencyError(f"Luxemburg unit-modular check failed: rho = {r!r}")
    return lam


@dataclass(frozen=True)
class KInterval:
    """``K(x) = [k_star, k_star_star]`` with its case tag and the Orlicz norm it yields."""

    k_star: float
    k_star_star: float
    case_tag: str
    attained_norm: float
    empty: bool = False

    @property
    def singleton(self) -> bool:
        return not self.empty and self.k_star_star - self.k_star <= SINGLETON_TOL * max(1.0, self.k_star)

    @property
    def k_mid(self) -> float:
        return 0.5 * (self.k_star + self.k_star_star)

    def to_dict(self) -> dict:
        return {
            "k_star": self.k_star,
            "k_star_star": self.k_star_star,
            "case": self.case_tag,
            "orlicz": self.attained_norm,
            "empty": self.empty,
        }


def amemiya(F: OrliczFunction, omega: Weight, f: StepFunction, k):
    """``h(k) = (1 + rho(k f)) / k``, vectorised over ``k``."""
    ys, dW = _masses(omega, f)
    k = np.asarray(k, dtype=float)
    out = np.array([(1.0 + _sum(F.phi(kk * ys), dW)) / kk for kk in k.ravel()]).reshape(k.shape)
    return out if out.ndim else float(out)


def _crossing(F: OrliczFunction, ys: np.ndarray, dW: np.ndarray, rtol: float) -> tuple[float, float]:
    """Locate ``k*`` and ``k**`` from the crossings of ``c`` and ``c_-`` with 1."""
    G = F.conjugate

    def c(k):
        return _sum(G.phi(F.p(k * ys)), dW)

    def c_left(k):
        return _sum(G.phi(F.p_left(k * ys)), dW)

    scale = 1.0 / float(ys[0])
    lo1, k1 = threshold(lambda k: c(k * scale) >= 1.0, rtol=rtol)
    k2, hi2 = threshold(lambda k: c_left(k * scale) > 1.0, rtol=rtol)
    k1, k2 = k1 * scale, k2 * scale
    lo1, hi2 = lo1 * scale, hi2 * scale
    # snap onto kinks of p: k = u_j / y_i where c or c_- may jump
    crit = np.unique(np.outer(F.breakpoints[1:], 1.0 / ys).ravel()) if F.breakpoints.size > 1 else np.array([])
    for kc in crit[(crit > lo1) & (crit <= k1)]:
        if c(kc) >= 1.0:
            k1 = float(kc)
            break
    for kc in crit[(crit >= k2) & (crit < hi2)][::-1]:
        if c_left(kc) <= 1.0:
            k2 = float(kc)
            break
    return k1, max(k1, k2)


def k_interval(F: OrliczFunction, omega: Weight, x: StepFunction, rtol: float = 0.0) -> KInterval:
    """``K(x)`` via the crossings of ``rho_psi(p(k x*))`` and ``rho_psi(p_-(k x*))`` with 1."""
    if x.tail != 0.0:
        raise PreconditionError("x must have finite support", field="x")
    ys, dW = _masses(omega, x)
    if ys.size == 0:
        raise PreconditionError("K(x) is undefined for x = 0", field="x")
    B = F.limit_slope
    if math.isfinite(B):
        level = float(F.conjugate.phi(B)) * float(omega.W(x.support_measure()))
        if level <= 1.0:
            norm = B * float(np.dot(ys, dW))
            return KInterval(math.inf, math.inf, "bounded-slope-empty", norm, empty=True)
        tag = "bounded-slope-strict"
    else:
        tag = "N-function"
    k1, k2 = _crossing(F, ys, dW, rtol)
    if not math.isfinite(k1):
        raise InternalConsistencyError("no crossing found although K(x) should be nonempty")
    norm = (1.0 + _sum(F.phi(k1 * ys), dW)) / k1
    return KInterval(k1, k2, tag, norm)


class OrliczNorm(NamedTuple):
    norm: float
    k: float


def orlicz_norm(F: OrliczFunction, omega: Weight, f: StepFunction, rtol: float = 0.0) -> OrliczNorm:
    """Amemiya norm ``inf_k (1 + rho(k f))/k`` evaluated at ``k*`` (or ``B * lorentz`` if K is empty)."""
    if f.is_zero:
        return OrliczNorm(0.0, math.nan)
    K = k_interval(F, omega, f, rtol=rtol)
    return OrliczNorm(K.attained_norm, K.k_star)


def theta(F: OrliczFunction, omega: Weight, f: StepFunction) -> float:
    """``inf{lam > 0 : rho(f/lam) < inf}``.

    Zero for every finite ``phi`` on bounded step functions; a wall at ``u_J``
    gives ``max|f| / u_J``.
    """
    if f.is_zero:
        return 0.0
    bound = F.domain_bound
    if math.isinf(bound):
        return 0.0
    return float(np.max(np.abs(f.values))) / bound


def _dual_oracle_solve(G: OrliczFunction, y: np.ndarray, m: np.ndarray, g_start: np.ndarray) -> np.ndarray:
    """SLSQP for ``max sum y g m`` over nonincreasing ``g = sum_{j >= c} d_j``, ``d >= 0``."""
    n = len(y)
    U = np.triu(np.ones((n, n)))
    c_obj = -(y * m) @ U
    B = G.domain_bound

    def con(d):
        r = _sum(G.phi(U @ d), m)
        return 1.0 - r if math.isfinite(r) else -1e300

    def con_jac(d):
        q = np.asarray(G.p(U @ d), dtype=float)
        return -(np.where(np.isfinite(q), q, 0.0) * m) @ U

    cons = [{"type": "ineq", "fun": con, "jac": con_jac}]
    if math.isfinite(B):
        cons.append({"type": "ineq", "fun": lambda d: B - d.sum(), "jac": lambda d: -np.ones(n)})
    d0 = -np.diff(np.append(g_start, 0.0))
    res = minimize(lambda d: float(c_obj @ d), d0, jac=lambda d: c_obj, bounds=[(0.0, None)] * n,
                   constraints=cons, method="SLSQP", options={"maxiter": 500, "ftol": 1e-14})
    return U @ np.maximum(res.x, 0.0)


def orlicz_norm_dual_oracle(F: OrliczFunction, omega: Weight, f: StepFunction, grid: int = 64) -> float:
    """Lower bound for the Orlicz norm from its dual description.

    Maximises ``int f* g omega`` over nonincreasing step ``g`` on a grid of
    at least ``grid`` cells subject to ``int psi(g) omega <= 1`` with SLSQP,
    warm-started from the same problem on the pieces of ``f*``; the result is
    shrunk onto the feasible set, so the value returned is attained.
    """
    fs = rearrangement(f)
    if fs.n_pieces == 0:
        return 0.0
    G = F.conjugate
    coarse = fs.breakpoints
    t = _refine(coarse, grid)
    y = fs(t[:-1])
    m = omega.mass(t[:-1], t[1:])

    def rho_g(g):
        return _sum(G.phi(g), m)

    def value(g):
        return float(np.dot(y * m, g))

    yc = fs.values
    mc = omega.mass(coarse[:-1], coarse[1:])
    B = G.domain_bound
    gc0 = np.minimum(np.asarray(F.p(yc / yc[0]), dtype=float), B)
    gc0 = _shrink(np.where(np.isfinite(gc0), gc0, B), lambda g: _sum(G.phi(g), mc))
    gc = _dual_oracle_solve(G, yc, mc, gc0)
    gc = _shrink(np.minimum.accumulate(np.minimum(gc, B)), lambda g: _sum(G.phi(g), mc))
    g_warm = gc[np.searchsorted(coarse, t[:-1], side="right") - 1]
    best = value(_shrink(g_warm, rho_g))
    g = _dual_oracle_solve(G, y, m, g_warm)
    g = _shrink(np.minimum.accumulate(np.clip(g, 0.0, B)), rho_g)
    return max(best, value(g))


def _shrink(g: np.ndarray, rho) -> np.ndarray:
    if rho(g) <= 1.0:
        return g
    _, hi = threshold(lambda s: rho(g / s) <= 1.0)
    return g / hi


def _refine(t: np.ndarray, grid: int) -> np.ndarray:
    """Subdivide the cells of ``t`` evenly until there are at least ``grid`` of them."""
    n = len(t) - 1
    per = max(1, math.ceil(grid / n))
    pts = [np.linspace(a, b, per + 1)[:-1] for a, b in zip(t[:-1], t[1:])]
    return np.append(np.concatenate(pts), t[-1])
