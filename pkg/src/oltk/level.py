"""Level functions, the dual modular ``P`` and the dual (Marcinkiewicz-type) norm."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from ._roots import threshold
from .errors import InternalConsistencyError, PreconditionError
from .modular import KInterval, _refine, _sum
from .orlicz import OrliczFunction
from .rearrange import is_nonincreasing, rearrangement
from .step import StepFunction, Weight, merged_grid

AGREE_TOL = 1e-10
_COALESCE = 1e-13


@dataclass(frozen=True)
class LevelDecomposition:
    """Maximal level intervals of ``f*`` against ``omega`` on ``[0, mu(supp f))``.

    ``blocks`` holds ``(a, b, F(a,b), W(a,b))``; ``cells`` is the merged grid
    of ``f*`` and ``omega`` on the support, ``block_of`` maps each cell to its
    block.
    """

    fstar: StepFunction
    omega: Weight
    cells: np.ndarray
    block_of: np.ndarray
    blocks: tuple[tuple[float, float, float, float], ...]

    @property
    def ratios(self) -> np.ndarray:
        return np.array([F / W for _, _, F, W in self.blocks])

    @property
    def mli(self) -> list[tuple[float, float, float]]:
        return [(a, b, F / W) for a, b, F, W in self.blocks]

    @property
    def ratio_fn(self) -> StepFunction:
        """``f0 / omega``: the block ratio on each block, 0 beyond the support."""
        edges = [self.blocks[0][0]] + [b for _, b, _, _ in self.blocks] if self.blocks else [0.0]
        return StepFunction(edges, self.ratios)

    @property
    def level_fn(self) -> StepFunction:
        c = self.cells
        R = self.ratios[self.block_of] if self.blocks else np.array([])
        return StepFunction(c, R * self.omega(c[:-1]))

    @property
    def inverse_level_fn(self) -> StepFunction:
        """``f / R`` on the blocks, ``omega`` beyond the support."""
        if not self.blocks:
            return self.omega
        c = self.cells
        om = self.omega
        edges = np.concatenate((c, om.breakpoints[om.breakpoints > c[-1]]))
        vals = np.concatenate((self.fstar(c[:-1]) / self.ratios[self.block_of], om(edges[len(c) - 1 : -1])))
        return StepFunction(edges, vals, om.tail)

    def to_dict(self) -> dict:
        return {
            "mli": [list(m) for m in self.mli],
            "level_fn": self.level_fn.to_dict(),
            "inverse_level_fn": self.inverse_level_fn.to_dict(),
        }


def level_decompose(fstar: StepFunction, omega: Weight) -> LevelDecomposition:
    """Pool adjacent violators over the cells of ``f*`` and ``omega``.

    Adjacent blocks merge while the ratio ``F/W`` fails to decrease, which
    leaves block ratios strictly decreasing: each block is a maximal level
    interval.
    """
    if fstar.tail != 0.0:
        raise PreconditionError("f* must have finite support", field="fstar")
    if np.any(fstar.values < 0) or not is_nonincreasing(fstar):
        raise PreconditionError("input must be a nonnegative nonincreasing function", field="fstar")
    L = fstar.end
    if fstar.n_pieces == 0:
        return LevelDecomposition(fstar, omega, np.array([0.0]), np.array([], dtype=int), ())
    cells = merged_grid(fstar, omega, upto=L)
    a, b = cells[:-1], cells[1:]
    Fm = fstar(a) * (b - a)
    Wm = omega.mass(a, b)
    stack: list[list] = []  # [start_cell, end_cell, F, W]
    for i in range(len(a)):
        cur = [i, i + 1, float(Fm[i]), float(Wm[i])]
        while stack:
            prev = stack[-1]
            # prev ratio <= cur ratio (or equal up to rounding): merge
            if prev[2] * cur[3] <= cur[2] * prev[3] * (1 + _COALESCE):
                stack.pop()
                cur = [prev[0], cur[1], prev[2] + cur[2], prev[3] + cur[3]]
            else:
                break
        stack.append(cur)
    block_of = np.empty(len(a), dtype=int)
    blocks = []
    for j, (s, e, F, W) in enumerate(stack):
        block_of[s:e] = j
        blocks.append((float(cells[s]), float(cells[e]), F, W))
    return LevelDecomposition(fstar, omega, cells, block_of, tuple(blocks))


def dual_modular_formulas(Fpsi: OrliczFunction, omega: Weight, f: StepFunction) -> tuple[float, float]:
    """Both closed forms: ``int psi(f0/omega) omega`` and ``int psi(f*/omega^f) omega^f``."""
    fs = rearrangement(f)
    if fs.n_pieces == 0:
        return 0.0, 0.0
    dec = level_decompose(fs, omega)
    c = dec.cells
    a, b = c[:-1], c[1:]
    om = omega(a)
    f0 = dec.ratios[dec.block_of] * om
    P1 = _sum(Fpsi.phi(f0 / om), om * (b - a))
    fv = fs(a)
    wf = fv / dec.ratios[dec.block_of]
    P2 = _sum(Fpsi.phi(fv / wf), wf * (b - a))
    return P1, P2


def dual_modular_P(Fpsi: OrliczFunction, omega: Weight, f: StepFunction) -> float:
    """``P_psi(f)`` through the level decomposition, with both closed forms cross-checked."""
    P1, P2 = dual_modular_formulas(Fpsi, omega, f)
    if math.isinf(P1) or math.isinf(P2):
        if P1 != P2:
            raise InternalConsistencyError(f"dual modular formulas disagree: {P1!r} vs {P2!r}")
        return math.inf
    if abs(P1 - P2) > AGREE_TOL * max(1.0, abs(P1)):
        raise InternalConsistencyError(f"dual modular formulas disagree: {P1!r} vs {P2!r}")
    return P1


def dual_objective(Fpsi: OrliczFunction, fstar: StepFunction, g: StepFunction) -> float:
    """``int psi(f*/|g|) |g|`` over ``supp f*`` for a step ``g``."""
    if fstar.n_pieces == 0:
        return 0.0
    t = merged_grid(fstar, g, upto=fstar.end)
    a, b = t[:-1], t[1:]
    y = fstar(a)
    gv = np.abs(g(a))
    if np.any((gv == 0) & (y > 0)):
        return math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = Fpsi.phi(np.where(y > 0, y / gv, 0.0))
    return _sum(vals, gv * (b - a))


def _solve_dual_grid(Fpsi: OrliczFunction, y, ln, Wt, g_start, maxiter: int = 1000):
    """SLSQP over nonincreasing ``g`` written as ``g_c = sum_{j >= c} d_j`` with ``d >= 0``."""
    n = len(y)
    B = Fpsi.domain_bound
    U = np.triu(np.ones((n, n)))  # g = U @ d
    cum = np.tril(np.ones((n, n))) * ln @ U  # int_0^{t_c} g = cum @ d

    def obj(d):
        g = np.maximum(U @ d, 1e-300)
        return _sum(Fpsi.phi(y / g), g * ln)

    def obj_jac(d):
        g = np.maximum(U @ d, 1e-300)
        v = y / g
        with np.errstate(invalid="ignore"):
            return ((np.asarray(Fpsi.phi(v)) - v * np.asarray(Fpsi.p(v))) * ln) @ U

    cons = [{"type": "ineq", "fun": lambda d: Wt - cum @ d, "jac": lambda d: -cum}]
    if math.isfinite(B):
        cons.append({"type": "ineq", "fun": lambda d: U @ d - y / B, "jac": lambda d: U})
    d0 = -np.diff(np.append(g_start, 0.0))
    # steep psi leaves SLSQP stalled short of the optimum unless the gradient is O(1)
    scale = float(np.max(np.abs(obj_jac(d0))))
    if not (math.isfinite(scale) and scale > 0):
        scale = 1.0
    res = minimize(lambda d: obj(d) / scale, d0, jac=lambda d: obj_jac(d) / scale, bounds=[(0.0, None)] * n,
                   constraints=cons, method="SLSQP", options={"maxiter": maxiter, "ftol": 1e-15})
    return U @ np.maximum(res.x, 0.0)


def dual_modular_bruteforce(Fpsi: OrliczFunction, omega: Weight, f: StepFunction, grid: int = 64) -> float:
    """Upper bound for ``P_psi(f)``: direct minimisation over ``g`` submajorised by ``omega``.

    The variables are the values of a nonincreasing step ``g`` on a grid of
    at least ``grid`` cells covering ``supp f*``, minimised with SLSQP under
    the cumulative constraints ``int_0^t g <= W(t)`` at every grid point. The
    fine grid is warm-started from the same problem on the coarse cells of
    ``f*`` and ``omega``. The answer is projected back onto the feasible set
    exactly (running minimum, then uniform shrinking), so the value returned
    is attained by a feasible ``g``.
    """
    fs = rearrangement(f)
    if fs.n_pieces == 0:
        return 0.0
    coarse = merged_grid(fs, omega, upto=fs.end)
    t = _refine(coarse, grid)
    a, b = t[:-1], t[1:]
    ln = b - a
    y = fs(a)
    Wt = omega.W(b)

    def obj(g):
        return _sum(Fpsi.phi(y / g), g * ln)

    B = Fpsi.domain_bound
    if math.isfinite(B):
        # every admissible g dominates f*/B; scaled up to the tightest W constraint it is
        # strictly inside the domain, or no admissible g exists at all
        c = float(np.min(Wt / np.cumsum(y / B * ln)))
        if c < 1.0:
            return math.inf
        g_in = y / B * c
        c0 = float(np.min(omega.W(coarse[1:]) / np.cumsum(fs(coarse[:-1]) / B * np.diff(coarse))))

    def project(g):
        g = np.minimum.accumulate(np.maximum(g, 1e-300))
        s = min(1.0, float(np.min(Wt / np.cumsum(g * ln))))
        return g * s

    ca = coarse[:-1]
    start_c, start = omega(ca), omega(a)
    if math.isfinite(B):
        start_c, start = fs(ca) / B * c0, g_in
    best = obj(project(start))
    gc = _solve_dual_grid(Fpsi, fs(ca), np.diff(coarse), omega.W(coarse[1:]), start_c)
    g_warm = project(gc[np.searchsorted(coarse, a, side="right") - 1])
    best = min(best, obj(g_warm))
    g_fine = project(_solve_dual_grid(Fpsi, y, ln, Wt, g_warm, maxiter=150))
    return min(best, obj(g_fine))


def dual_norm(Fpsi: OrliczFunction, omega: Weight, f: StepFunction, rtol: float = 0.0) -> float:
    """``inf{lam > 0 : P_psi(f/lam) <= 1}``; the level structure is scale invariant."""
    fs = rearrangement(f)
    if fs.n_pieces == 0:
        return 0.0
    dual_modular_P(Fpsi, omega, fs)
    R, Wb = _block_data(fs, omega)
    scale = float(R[0])
    _, hi = threshold(lambda lam: _sum(Fpsi.phi(R / (lam * scale)), Wb) <= 1.0, rtol=rtol)
    return hi * scale


def _block_data(fs: StepFunction, omega: Weight) -> tuple[np.ndarray, np.ndarray]:
    dec = level_decompose(fs, omega)
    return dec.ratios, np.array([W for *_, W in dec.blocks])


def dual_amemiya(Fpsi: OrliczFunction, omega: Weight, f: StepFunction, k):
    """``(1 + P_psi(k f)) / k``, vectorised over ``k``."""
    R, Wb = _block_data(rearrangement(f), omega)
    k = np.asarray(k, dtype=float)
    out = np.array([(1.0 + _sum(Fpsi.phi(kk * R), Wb)) / kk for kk in k.ravel()]).reshape(k.shape)
    return out if out.ndim else float(out)


def dual_k_interval(Fphi: OrliczFunction, Fpsi: OrliczFunction, omega: Weight, f: StepFunction,
                    tol: float = 1e-8, rtol: float = 0.0) -> KInterval:
    """Minimiser set of ``(1 + P_psi(k f))/k`` from the crossing of
    ``int phi(q(k f*/omega^f)) omega^f`` with 1, where ``q`` is the right
    derivative of ``psi`` and ``phi`` its conjugate.

    When the crossing value equals 1 the Amemiya identity is cross-checked
    against a direct one-dimensional minimisation.
    """
    fs = rearrangement(f)
    if fs.n_pieces == 0:
        raise PreconditionError("dual K-interval is undefined for f = 0", field="f")
    R, Wb = _block_data(fs, omega)

    def C(k):
        return _sum(Fphi.phi(Fpsi.p(k * R)), Wb)

    scale = 1.0 / float(R[0])
    _, k1 = threshold(lambda k: C(k * scale) >= 1.0, rtol=rtol)
    k2, _ = threshold(lambda k: C(k * scale) > 1.0, rtol=rtol)
    k1, k2 = k1 * scale, k2 * scale
    if not math.isfinite(k1):
        return KInterval(math.inf, math.inf, "bounded-slope-empty", math.nan, empty=True)
    tag = "N-function" if math.isinf(Fpsi.limit_slope) else "bounded-slope-strict"
    norm = float(dual_amemiya(Fpsi, omega, fs, k1))
    if abs(C(k1) - 1.0) <= tol:
        lk = math.log(k1)
        res = minimize_scalar(lambda s: float(dual_amemiya(Fpsi, omega, fs, math.exp(s))),
                              bounds=(lk - 5, lk + 5), method="bounded", options={"xatol": 1e-12})
        if res.fun < norm - tol * max(1.0, norm):
            raise InternalConsistencyError(
                f"Amemiya identity for the dual norm fails: {norm!r} vs minimum {res.fun!r}"
            )
    return KInterval(k1, max(k1, k2), tag, norm)
