"""Supporting functionals, strongly exposed points and their counterexample sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._roots import threshold
from .errors import PreconditionError
from .level import dual_modular_P, dual_norm
from .modular import KInterval, _sum, k_interval, modular_rho, orlicz_norm, theta
from .orlicz import OrliczFunction, affine_structure, delta2, is_strictly_convex, nabla2
from .rearrange import MeasurePreservingMap, mpt, rearrangement, source_points
from .step import StepFunction, Weight, maximal_constant_intervals, merged_grid

UNIT_TOL = 1e-8
MEMBER_TOL = 1e-8
DELTA_PROBES = (1e-3, 1e-2, 1e-1)

CONDITIONS = (
    "Δ₂",
    "K-singleton",
    "strict-convexity-carrier",
    "supporting-functional-margin",
    "A′B′-null",
    "thm1-precheck",
    "thm2-precheck",
)


def _require_unit(F: OrliczFunction, omega: Weight, x: StepFunction, tol: float = UNIT_TOL) -> KInterval:
    if x.tail != 0.0 or x.is_zero:
        raise PreconditionError("x must be a nonzero function with finite support", field="x")
    K = k_interval(F, omega, x)
    if abs(K.attained_norm - 1.0) > tol:
        raise PreconditionError(
            f"x must lie on the unit sphere: Orlicz norm is {K.attained_norm!r}", field="x"
        )
    return K


def _require_nonempty(K: KInterval) -> None:
    if K.empty:
        raise PreconditionError("K(x) is empty", field="x", code="empty-K")


def _x_pieces(x: StepFunction):
    """Nonzero pieces of ``x`` in rearranged order: (|value|, sign, source, target)."""
    sigma = mpt(x)
    out = []
    for sa, sb, ta, tb in sigma.pieces:
        val = float(x(sa))
        out.append((abs(val), math.copysign(1.0, val), (sa, sb), (ta, tb)))
    return sigma, out


# supporting functionals ------------------------------------------------------


@dataclass(frozen=True)
class SupportingFunctional:
    v: StepFunction
    k_used: float
    sigma: MeasurePreservingMap
    normalization_certificate: float
    coefficients: np.ndarray
    selector: float = 0.5

    def to_dict(self) -> dict:
        return {
            "v": self.v.to_dict(),
            "k_used": self.k_used,
            "sigma": self.sigma.to_list(),
            "P": self.normalization_certificate,
            "selector": self.selector,
        }


def _functional_from_coefficients(x: StepFunction, omega: Weight, coeff: np.ndarray) -> StepFunction:
    """``v(t) = c(|x(t)|) omega(sigma(t)) sign x(t)`` with one coefficient per rearranged piece."""
    sigma, pieces = _x_pieces(x)
    out = []
    for c, (_, sgn, (sa, sb), (ta, tb)) in zip(coeff, pieces):
        grid = merged_grid(omega, upto=tb)
        grid = np.unique(np.concatenate(([ta], grid[(grid > ta) & (grid < tb)], [tb])))
        src = source_points(sa, sb, ta, tb, grid)
        for a, s0, s1 in zip(grid[:-1], src[:-1], src[1:]):
            out.append((s0, s1, sgn * c * float(omega(a))))
    return StepFunction.from_pieces(out)


def _piece_coefficients(F: OrliczFunction, k: float, ys: np.ndarray, selector: float, tau: float) -> np.ndarray:
    lo = np.asarray(F.p_left(k * ys), dtype=float)
    hi = np.asarray(F.p(k * ys), dtype=float)
    n = len(ys)
    # tilt in [-1, 1]: selector 0 fills the largest pieces first, 1 the smallest
    r = np.linspace(-1.0, 1.0, n) if n > 1 else np.zeros(1)
    s = np.clip(tau + (2.0 * selector - 1.0) * r, 0.0, 1.0)
    with np.errstate(invalid="ignore"):
        c = lo + s * (hi - lo)
    return np.where(s == 0.0, lo, np.where(s == 1.0, hi, c))


def supporting_functional(
    F: OrliczFunction, omega: Weight, x: StepFunction, selector: float = 0.5, tol: float = UNIT_TOL
) -> SupportingFunctional:
    """A norm-one functional attaining its norm at the unit vector ``x``.

    On each piece of ``x*`` the coefficient ``c = (1-s) p_-(k x*) + s p(k x*)``
    with ``k = k*``; ``s`` is found by bisection so that ``P_psi(v) = 1``.
    With ``selector = 0.5`` the same ``s`` is used on every piece; other values
    tilt the fill order across pieces, which only matters when several pieces
    sit on jumps of ``p``.
    """
    if not 0.0 <= selector <= 1.0:
        raise PreconditionError("selector must lie in [0, 1]", field="selector")
    K = _require_unit(F, omega, x, tol)
    _require_nonempty(K)
    k = K.k_star
    sigma, pieces = _x_pieces(x)
    ys = np.array([p[0] for p in pieces])
    tgt = np.array([p[3] for p in pieces])
    dW = omega.mass(tgt[:, 0], tgt[:, 1])
    G = F.conjugate

    def P_of(tau):
        return _sum(G.phi(_piece_coefficients(F, k, ys, selector, tau)), dW)

    if P_of(-1.0) > 1.0 + tol or P_of(2.0) < 1.0 - tol:
        raise PreconditionError("no normalising selector exists: the Grad(x) branch fails", field="x")
    _, tau = threshold(lambda t: P_of(t - 1.0) >= 1.0, start=1.5)
    tau = min(tau - 1.0, 2.0)
    if P_of(tau) > 1.0 + tol:
        # P jumps over 1 (only at a wall of psi); fall back to the left value
        tau = max(tau - 1e-12, -1.0)
    coeff = _piece_coefficients(F, k, ys, selector, tau)
    v = _functional_from_coefficients(x, omega, coeff)
    cert = dual_modular_P(G, omega, v)
    return SupportingFunctional(v, k, sigma, cert, coeff, selector)


@dataclass(frozen=True)
class AttainmentReport:
    ok: bool
    residuals: dict


def norm_attainment_check(
    F: OrliczFunction, omega: Weight, x: StepFunction, v: StepFunction, tol: float = UNIT_TOL
) -> AttainmentReport:
    """Residuals of the norm-attainment conditions for ``v`` at ``x``.

    * ``alignment``: ``v = v*(sigma) sign x`` on ``supp x`` for some ``sigma``
      with ``|x| = x*(sigma)``, and ``v = 0`` off ``supp x``
    * ``dual_norm``: ``|‖v‖ - 1|``
    * ``P_normalised``: ``|P_psi(v/‖v‖) - 1|``
    * ``pairing``: ``|<x, v> - ‖x‖° ‖v‖|``
    * ``young``: ``|int k v x - rho_phi(k x) - P_psi(v)|``
    """
    G = F.conjugate
    # a common sigma exists iff v has the sign of x, vanishes off supp x and
    # Hardy-Littlewood holds with equality
    sx = x.map_values(np.sign)
    off = (abs(v) * sx.map_values(lambda s: (s == 0).astype(float))).integral()
    wrong = (v * sx).map_values(lambda u: np.maximum(-u, 0.0)).integral()
    hl = (rearrangement(x) * rearrangement(v)).integral() - abs(x * v).integral()
    align = max(off, wrong, abs(hl))
    dn = dual_norm(G, omega, v)
    K = k_interval(F, omega, x)
    k = K.k_star
    xnorm = K.attained_norm
    pair = (x * v).integral()
    P_v = dual_modular_P(G, omega, v)
    res = {
        "alignment": align,
        "dual_norm": abs(dn - 1.0),
        "P_normalised": abs(dual_modular_P(G, omega, v / dn) - 1.0) if dn > 0 else math.inf,
        "pairing": abs(pair - xnorm * dn),
        "young": abs(k * pair - modular_rho(F, omega, x * k) - P_v),
    }
    ok = all(r <= tol * max(1.0, abs(pair)) for r in res.values())
    return AttainmentReport(ok, res)


def grad_in_koethe_dual(F: OrliczFunction, omega: Weight, x: StepFunction, tol: float = UNIT_TOL) -> tuple[bool, str]:
    """Whether every supporting functional of ``x`` is regular, and which branch certifies it.

    Branch ``theta`` when ``theta(k x) < 1``; branch ``equality`` when
    ``P_psi(p_-(k x*) omega) = rho_psi(p_-(k x)) = 1``; otherwise ``none``.
    """
    K = _require_unit(F, omega, x, tol)
    _require_nonempty(K)
    k = K.k_star
    if theta(F, omega, x * k) < 1.0:
        return True, "theta"
    fs = rearrangement(x)
    ys, dW = fs.values, omega.mass(fs.breakpoints[:-1], fs.breakpoints[1:])
    val = _sum(F.conjugate.phi(F.p_left(k * ys)), dW)
    if abs(val - 1.0) <= tol:
        return True, "equality"
    return False, "none"


# prechecks -----------------------------------------------------------------


def precheck_thm1(F: OrliczFunction, omega: Weight, x: StepFunction) -> dict | None:
    """Non-exposure when ``B < inf`` and ``psi(B) W(mu(supp x)) < 1`` (strict)."""
    B = F.limit_slope
    if math.isinf(B):
        return None
    level = float(F.conjugate.phi(B)) * float(omega.W(x.support_measure()))
    if level < 1.0:
        return {"B": B, "psi_B_W": level}
    return None


def precheck_thm2(F: OrliczFunction, omega: Weight, x: StepFunction, k: float) -> dict | None:
    """Non-exposure for ``x = alpha chi_A`` with ``k alpha`` inside an affine interval and
    ``sigma(A)`` meeting the maximal constant intervals of ``omega`` in a null set.

    For step weights the maximal constant intervals cover ``[0, inf)``, so the
    measure condition holds only when ``A`` is null; the check is still
    carried out literally.
    """
    vals = np.unique(x.values[x.values != 0])
    if len(vals) != 1:
        return None
    alpha = float(vals[0])
    st = affine_structure(F)
    if not bool(st.in_open_interval(k * abs(alpha))):
        return None
    mA = x.support_measure()
    overlap = sum(max(0.0, min(b, mA) - max(a, 0.0)) for a, b in maximal_constant_intervals(omega))
    if overlap == 0.0:
        return {"alpha": alpha, "k_alpha": k * abs(alpha)}
    return None


# classifier ----------------------------------------------------------------


@dataclass
class ExposureVerdict:
    verdict: str
    failed_conditions: list[str] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    counterexample_recipe: str | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "failed_conditions": list(self.failed_conditions),
            "diagnostics": self.diagnostics,
            "counterexample_recipe": self.counterexample_recipe,
            "warnings": list(self.warnings),
        }


_RECIPES = {
    "K-singleton": "ai-interior",
    "strict-convexity-carrier": "ai-interior",
    "A′B′-null": "ai-endpoint",
    "Δ₂": "delta2-truncation",
}


def strongly_exposed_classify(
    F: OrliczFunction, omega: Weight, x: StepFunction, tol: float = UNIT_TOL
) -> ExposureVerdict:
    """Decide whether the unit vector ``x`` is strongly exposed.

    Conditions: ``phi`` is Delta_2; ``K(x)`` is a singleton and no value of
    ``k x*`` lies inside an affine interval; a supporting functional has
    ``P_psi((1+delta) v) < inf`` for some ``delta > 0``; no value of ``k x*``
    lies in ``A' ∪ B'``. Measure-zero conditions reduce to membership of the
    finitely many piece values.
    """
    K = _require_unit(F, omega, x, tol)
    diag: dict = {"k_star": K.k_star, "k_star_star": K.k_star_star, "case": K.case_tag}
    t1 = precheck_thm1(F, omega, x)
    if t1 is not None:
        diag["thm1-precheck"] = t1
        return ExposureVerdict("NotStronglyExposed", ["thm1-precheck"], diag)
    if K.empty:
        return ExposureVerdict("OutOfScope", [], diag)
    k = K.k_star
    failed: list[str] = []
    warnings: list[str] = []
    t2 = precheck_thm2(F, omega, x, k)
    if t2 is not None:
        diag["thm2-precheck"] = t2
        failed.append("thm2-precheck")

    if not delta2(F):
        failed.append("Δ₂")
    diag["Δ₂"] = {"final_kind": F.final.kind, "vanishes_near_zero": F.vanishes_near_zero}

    st = affine_structure(F)
    kv = k * rearrangement(x).values
    gap = K.k_star_star - K.k_star
    mid_cert = None
    if not K.singleton:
        failed.append("K-singleton")
    elif gap > 0:
        G = F.conjugate
        ys = rearrangement(x).values
        dW = omega.mass(rearrangement(x).breakpoints[:-1], rearrangement(x).breakpoints[1:])
        km = K.k_mid
        mid_cert = (_sum(G.phi(F.p(km * ys)), dW), _sum(G.phi(F.p_left(km * ys)), dW))
    diag["K-singleton"] = {"gap": gap, "midpoint_modulars": mid_cert}
    inside = st.in_open_interval(kv, MEMBER_TOL)
    if np.any(inside):
        failed.append("strict-convexity-carrier")
    diag["strict-convexity-carrier"] = {"values": kv.tolist(), "in_open_ai": inside.tolist()}

    G = F.conjugate
    margin_ok = True
    probes = {}
    try:
        sf = supporting_functional(F, omega, x, tol=tol)
        cmax = float(np.max(sf.coefficients))
        if math.isfinite(G.domain_bound):
            margin_ok = cmax < G.domain_bound * (1 - MEMBER_TOL)
        for d in DELTA_PROBES:
            probes[str(d)] = dual_modular_P(G, omega, sf.v * (1 + d))
        diag["supporting-functional-margin"] = {"max_coefficient": cmax, "psi_domain_bound": G.domain_bound, "delta_probes": probes}
    except PreconditionError as e:
        margin_ok = False
        diag["supporting-functional-margin"] = {"error": str(e)}
    if not margin_ok:
        failed.append("supporting-functional-margin")

    on_ab = st.member(kv, st.A_prime + st.B_prime, MEMBER_TOL)
    if np.any(on_ab):
        failed.append("A′B′-null")
    diag["A′B′-null"] = {"A_prime": list(st.A_prime), "B_prime": list(st.B_prime), "hits": on_ab.tolist()}

    # boundary configurations surfaced from the necessity argument
    ys = rearrangement(x).values
    dW = omega.mass(rearrangement(x).breakpoints[:-1], rearrangement(x).breakpoints[1:])
    P_left = _sum(G.phi(F.p_left(k * ys)), dW)
    if abs(P_left - 1.0) <= tol and np.any(st.member(kv, st.B + st.B_prime, MEMBER_TOL)):
        warnings.append("case-1: P(p_-(k x*) omega) = 1 with k x* on a right AI endpoint")
    if theta(F, omega, x * k) < 1.0 and np.any(st.member(kv, st.A, MEMBER_TOL)):
        warnings.append("case-2: k x* on a left AI endpoint where p jumps")

    order = ["thm2-precheck", "Δ₂", "K-singleton", "strict-convexity-carrier", "supporting-functional-margin", "A′B′-null"]
    failed = [c for c in order if c in failed]
    if not failed:
        return ExposureVerdict("StronglyExposed", [], diag, None, warnings)
    recipe = next((_RECIPES[c] for c in failed if c in _RECIPES), None)
    return ExposureVerdict("NotStronglyExposed", failed, diag, recipe, warnings)


# counterexample sequences --------------------------------------------------


def _target_piece_map(x: StepFunction):
    _, pieces = _x_pieces(x)
    return pieces


def _pushforward(x: StepFunction, new_star_vals: dict[int, list[tuple[float, float, float]]]) -> StepFunction:
    """Rebuild ``x`` after replacing rearranged piece ``i`` by sub-pieces ``(ta, tb, |value|)``."""
    out = []
    for i, (val, sgn, (sa, sb), (ta, tb)) in enumerate(_target_piece_map(x)):
        subs = new_star_vals.get(i, [(ta, tb, val)])
        ends = source_points(sa, sb, ta, tb, np.array([subs[0][0]] + [b for _, b, _ in subs]))
        for (_, _, nv), s0, s1 in zip(subs, ends[:-1], ends[1:]):
            out.append((s0, s1, sgn * nv))
    return StepFunction.from_pieces(out)


def _allowed_room(kv: np.ndarray, i: int, lo: float, hi: float) -> tuple[float, float]:
    """Room to move value ``i`` down/up without leaving ``[lo, hi]`` or crossing neighbours."""
    below = kv[i + 1] if i + 1 < len(kv) else 0.0
    above = kv[i - 1] if i > 0 else math.inf
    return min(kv[i] - lo, kv[i] - below), min(hi - kv[i], above - kv[i])


def counterexample_sequence(
    F: OrliczFunction, omega: Weight, x: StepFunction, verdict: ExposureVerdict, n: int
) -> StepFunction:
    """The ``n``-th element of a sequence witnessing a failed condition.

    ``ai-interior``: a piece with ``k x*`` inside an affine interval (at
    ``k*``, or at the midpoint of ``K(x)`` when ``K`` is not a singleton) is
    raised on one half and lowered on the other, the halves carrying equal
    ``omega``-mass; the modular, the norm and the pairing with the supporting
    functional are all unchanged.

    ``ai-endpoint``: on the pieces where ``k x*`` equals a right (left)
    endpoint in ``B'`` (``A'``), ``k x_n`` is moved into the affine interval by
    ``eps0 + eta/n``.

    ``delta2-truncation``: ``x`` restricted to the first ``n/(n+1)`` of its
    rearranged support.
    """
    if verdict.verdict != "NotStronglyExposed" or verdict.counterexample_recipe is None:
        raise PreconditionError("verdict carries no counterexample recipe", field="verdict")
    if n < 1:
        raise PreconditionError("n must be positive", field="n")
    recipe = verdict.counterexample_recipe
    K = k_interval(F, omega, x)
    st = affine_structure(F)
    pieces = _target_piece_map(x)
    vals = np.array([p[0] for p in pieces])

    if recipe == "ai-interior":
        k = K.k_star if K.singleton else K.k_mid
        kv = k * vals
        idx = np.flatnonzero(st.in_open_interval(kv, MEMBER_TOL))
        if idx.size == 0:
            raise PreconditionError("no piece of k x* inside an affine interval", field="x")
        i = int(idx[0])
        a, b = st.interval_of(kv[i])
        down, up = _allowed_room(kv, i, a, b)
        delta = min(down, up) * n / (n + 1)
        ta, tb = pieces[i][3]
        # split the target piece into halves of equal omega-mass
        m = float(omega.inverse_W(0.5 * (omega.W(ta) + omega.W(tb))))
        new = {i: [(ta, m, (kv[i] + delta) / k), (m, tb, (kv[i] - delta) / k)]}
        return _pushforward(x, new)

    if recipe == "ai-endpoint":
        k = K.k_star
        kv = k * vals
        new = {}
        for i, val in enumerate(kv):
            hit_b = st.member(val, st.B_prime, MEMBER_TOL)
            hit_a = st.member(val, st.A_prime, MEMBER_TOL)
            if not (hit_b or hit_a):
                continue
            a, b = st.interval_of(val) if hit_a else st.interval_of(val - 1e-9 * max(1.0, val))
            down, up = _allowed_room(kv, i, a, b)
            room = down if hit_b else up
            if not math.isfinite(room):
                room = 1.0
            eps0, eta = 0.8 * room, 0.1 * room
            shift = eps0 + eta / n
            ta, tb = pieces[i][3]
            nv = (val - shift) if hit_b else (val + shift)
            new[i] = [(ta, tb, nv / k)]
            break
        if not new:
            raise PreconditionError("no piece of k x* on an A'/B' endpoint", field="x")
        return _pushforward(x, new)

    if recipe == "delta2-truncation":
        L = x.support_measure()
        cut = L * n / (n + 1)
        new = {}
        for i, (_, _, _, (ta, tb)) in enumerate(pieces):
            if tb <= cut:
                continue
            new[i] = [(ta, min(max(cut, ta), tb), vals[i]), (min(max(cut, ta), tb), tb, 0.0)]
        return _pushforward(x, new)

    raise PreconditionError(f"unknown recipe {recipe!r}", field="verdict")


# space-level property --------------------------------------------------------


def sep_space_check(F: OrliczFunction) -> tuple[bool, list[str]]:
    """Strongly exposed property of the whole space: Delta_2, nabla_2 and strict convexity."""
    reasons = []
    if not delta2(F):
        reasons.append("Δ₂")
    if not nabla2(F):
        reasons.append("∇₂")
    if not is_strictly_convex(F):
        reasons.append("strict-convexity")
    return not reasons, reasons


@dataclass(frozen=True)
class BlockConstruction:
    """Block function ``f = sum_k u_k omega chi_[t_k, t_{k-1})`` with ``W``-masses ``1/(2^k psi(u_k))``."""

    f: StepFunction
    u: np.ndarray
    masses: np.ndarray

    def to_dict(self) -> dict:
        return {"f": self.f.to_dict(), "u": self.u.tolist(), "masses": self.masses.tolist()}


def nabla2_failure_blocks(F: OrliczFunction, omega: Weight, n_blocks: int = 25) -> BlockConstruction:
    """Blocks witnessing ``psi`` outside Delta_2.

    ``u_k`` is (approximately) the smallest ``u >= u_{k-1}`` with
    ``psi((1 + 1/k) u) >= 2^k psi(u)``; block ``k`` carries ``W``-mass
    ``w_k = 1/(2^k psi(u_k))`` so that ``P_psi(f) = sum 2^-k <= 1`` while each
    block with ``1/k <= eps`` adds at least 1 to ``P_psi((1+eps) f)``.
    """
    if nabla2(F):
        raise PreconditionError("phi satisfies nabla_2: no block construction exists", field="phi")
    G = F.conjugate
    if not math.isinf(G.domain_bound):
        raise PreconditionError("the conjugate must be finite-valued", field="phi")

    def ok(u, kk):
        pu = float(G.phi(u))
        return pu > 0 and float(G.phi((1 + 1 / kk) * u)) >= 2.0**kk * pu

    us = []
    u_prev = 1e-6
    for kk in range(1, n_blocks + 1):
        u = u_prev
        while not ok(u, kk):
            u *= 1.01
            if not math.isfinite(float(G.phi((1 + 1 / kk) * u))):
                raise PreconditionError("block search overflowed", field="n_blocks")
        lo = max(u_prev, u / 1.01)
        if lo < u and not ok(lo, kk):
            for _ in range(60):
                mid = 0.5 * (lo + u)
                if ok(mid, kk):
                    u = mid
                else:
                    lo = mid
        us.append(u)
        u_prev = u
    u_arr = np.array(us)
    w = 1.0 / (2.0 ** np.arange(1, n_blocks + 1) * G.phi(u_arr))
    # block k occupies [t_k, t_{k-1}) with t_K = 0: largest u nearest the origin
    cumw = np.concatenate(([0.0], np.cumsum(w[::-1])))
    t = np.asarray(omega.inverse_W(cumw), dtype=float)
    t[0] = 0.0
    pieces = []
    for j in range(n_blocks):
        kk = n_blocks - j - 1
        a, b = t[j], t[j + 1]
        grid = merged_grid(omega, upto=b)
        grid = np.unique(np.concatenate(([a], grid[(grid > a) & (grid < b)], [b])))
        for s0, s1 in zip(grid[:-1], grid[1:]):
            if s1 > s0:
                pieces.append((s0, s1, u_arr[kk] * float(omega(s0))))
    return BlockConstruction(StepFunction.from_pieces(pieces), u_arr, w)


# perturbation probes -----------------------------------------------------------


def perturbation_family(
    F: OrliczFunction, omega: Weight, x: StepFunction, v: StepFunction, m: int, rng: np.random.Generator
) -> StepFunction:
    """A unit vector ``y`` with ``<y, v> >= 1 - 1/m`` pushed as far from ``x`` as possible
    along a random step direction supported on ``supp x``.
    """
    cuts = np.sort(rng.uniform(0, x.end, size=rng.integers(1, 6)))
    grid = np.unique(np.concatenate((merged_grid(x), cuts, [x.end])))
    h = StepFunction(grid, rng.normal(size=len(grid) - 1)) if len(grid) > 1 else StepFunction.zero()
    h = StepFunction.from_pieces(
        [(a, b, float(h(a)) if x(a) != 0 else 0.0) for a, b in zip(grid[:-1], grid[1:])]
    )

    def unit(t):
        y = x + h * t
        return y / orlicz_norm(F, omega, y).norm

    target = 1.0 - 1.0 / m

    def too_far(t):
        return (unit(t) * v).integral() < target

    # lo is the last step that still meets the target (hi = inf: every step does)
    lo, _ = threshold(too_far, start=1e-4, rtol=1e-3)
    return unit(lo)
