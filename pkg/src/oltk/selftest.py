"""A compact run of the library's invariants on seeded random instances."""

from __future__ import annotations
from dataclasses import dataclass

import numpy as np

from .exposure import (
    counterexample_sequence,
    nabla2_failure_blocks,
    norm_attainment_check,
    sep_space_check,
    strongly_exposed_classify,
    supporting_functional,
)
from .generators import affine_interval_fixture, log_fixture, random_decreasing, random_phi, random_step, random_weight
from .level import dual_modular_P, dual_modular_bruteforce, dual_modular_formulas, level_decompose
from .modular import amemiya, k_interval, luxemburg_norm, orlicz_norm
from .orlicz import OrliczFunction
from .rearrange import distribution, rearrangement
from .step import StepFunction, Weight, merged_grid


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _equimeasurable(rng, n):
    for _ in range(n):
        f = random_step(rng)
        fs = rearrangement(f)
        for lam in np.unique(np.abs(f.values[f.values != 0])):
            if distribution(f, lam) != distribution(fs, lam):
                return False, f"lambda={lam}"
    return True, ""


def _hardy_littlewood(rng, n):
    for _ in range(n):
        f, g = random_step(rng), random_step(rng)
        lhs = abs(f * g).integral()
        rhs = (rearrangement(f) * rearrangement(g)).integral()
        if lhs > rhs + 1e-12:
            return False, f"{lhs} > {rhs}"
    return True, ""


def _norms(rng, n, tol):
    for _ in range(n):
        F, w, f = random_phi(rng), random_weight(rng), random_step(rng, 8)
        lux = luxemburg_norm(F, w, f)
        orl = orlicz_norm(F, w, f).norm
        if not (lux <= orl * (1 + 1e-9) and orl <= 2 * lux * (1 + 1e-9)):
            return False, f"sandwich {lux} {orl}"
        K = k_interval(F, w, f)
        if not K.empty:
            ks = K.k_star * np.array([0.9, 1.0, 1.1])
            h = amemiya(F, w, f, ks)
            if h[1] > min(h) + tol:
                return False, f"h not minimal at k*: {h}"
    return True, ""


def _level_and_dual(rng, n):
    for _ in range(n):
        fs, w = random_decreasing(rng), random_weight(rng)
        dec = level_decompose(fs, w)
        r = dec.ratio_fn.values
        if np.any(np.diff(r) > 0):
            return False, "f0/omega increases"
        grid = merged_grid(fs, dec.level_fn)
        if np.any(dec.level_fn.cumulative(grid) < fs.cumulative(grid) - 1e-12 * (1 + fs.integral())):
            return False, "cumulative domination fails"
        G = random_phi(rng, "power").conjugate
        P1, P2 = dual_modular_formulas(G, w, fs)
        if abs(P1 - P2) > 1e-10 * max(1.0, P1):
            return False, f"P formulas {P1} {P2}"
    return True, ""


def _bruteforce(rng, n, grid):
    for _ in range(n):
        fs, w = random_decreasing(rng, 6), random_weight(rng)
        G = random_phi(rng, "power").conjugate
        P = dual_modular_P(G, w, fs)
        B = dual_modular_bruteforce(G, w, fs, grid)
        if not (P <= B + 1e-10 and B - P < 5e-3):
            return False, f"P={P} brute={B}"
    return True, ""


def _supporting(rng, n, tol):
    for _ in range(n):
        F, w = random_phi(rng, "power"), random_weight(rng)
        x = random_step(rng, 8)
        x = x / orlicz_norm(F, w, x).norm
        sf = supporting_functional(F, w, x)
        rep = norm_attainment_check(F, w, x, sf.v, tol)
        if not rep.ok:
            return False, str(rep.residuals)
    return True, ""


def _fixtures():
    F = affine_interval_fixture()
    w = Weight.constant(1.0)
    cases = {
        "a": StepFunction([0, 0.1, 0.5], [3.0, 1.5]) / 2.4,
        "b": StepFunction([0, 0.1, 0.5], [3.0, 2.0]) / 2.8,
        "c": StepFunction.indicator(0, 1, 0.5),
    }
    for name, x in cases.items():
        vd = strongly_exposed_classify(F, w, x)
        if vd.verdict != "NotStronglyExposed":
            return False, f"fixture {name}: {vd.verdict}"
        v = supporting_functional(F, w, x).v
        xn = counterexample_sequence(F, w, x, vd, 200)
        y = xn / orlicz_norm(F, w, xn).norm
        if (y * v).integral() < 0.999 or orlicz_norm(F, w, y - x).norm < 0.05:
            return False, f"fixture {name}: sequence does not separate"
    Q = OrliczFunction.power(2.0)
    if strongly_exposed_classify(Q, w, StepFunction.indicator(0, 1, 0.5)).verdict != "StronglyExposed":
        return False, "quadratic fixture"
    return True, ""


def _space():
    Lg = log_fixture()
    ok, reasons = sep_space_check(Lg)
    if ok or reasons != ["∇₂"]:
        return False, f"log fixture: {reasons}"
    w = Weight.constant(1.0)
    bc = nabla2_failure_blocks(Lg, w, 25)
    P, P11 = dual_modular_P(Lg.conjugate, w, bc.f), dual_modular_P(Lg.conjugate, w, bc.f * 1.1)
    if not (P <= 1.0 and P11 >= 1e6):
        return False, f"P={P} P(1.1f)={P11}"
    return True, ""


def run(seed: int = 0, n: int = 20, grid: int = 64, tol: float = 1e-8) -> list[Check]:
    rng = np.random.default_rng(seed)
    suite = [
        ("equimeasurability", lambda: _equimeasurable(rng, n)),
        ("hardy-littlewood", lambda: _hardy_littlewood(rng, n)),
        ("norm-sandwich-and-amemiya", lambda: _norms(rng, n, tol)),
        ("level-laws-and-dual-formulas", lambda: _level_and_dual(rng, n)),
        ("dual-bruteforce", lambda: _bruteforce(rng, max(1, n // 4), grid)),
        ("supporting-functionals", lambda: _supporting(rng, max(1, n // 2), tol)),
        ("classifier-fixtures", _fixtures),
        ("space-check", _space),
    ]
    out = []
    for name, fn in suite:
        try:
            ok, detail = fn()
        except Exception as e:  # report, never abort the suite
            ok, detail = False, f"{type(e).__name__}: {e}"
        out.append(Check(name, bool(ok), detail))
    return out


def summary(checks: list[Check]) -> dict:
    passed = sum(c.passed for c in checks)
    return {"passed": passed, "failed": len(checks) - passed, "checks": [c.to_dict() for c in checks]}


__all__ = ["Check", "run", "summary"]
