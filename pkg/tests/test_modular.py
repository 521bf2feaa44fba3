import numpy as np
import pytest
from hypothesis import given, strategies as st

from oltk.errors import PreconditionError
from oltk.generators import PHI_KINDS, random_phi, random_step, random_weight
from oltk.exposure import supporting_functional
from oltk.level import dual_norm
from oltk.modular import (
    amemiya,
    k_interval,
    luxemburg_norm,
    modular_rho,
    orlicz_norm,
    orlicz_norm_dual_oracle,
    theta,
)
from oltk.orlicz import Final, OrliczFunction, delta2
from oltk.rearrange import lorentz_norm, rearrangement
from oltk.step import StepFunction, Weight

from oracles import amemiya_grid_min, phi_quad, piece_masses_oracle

SQ = OrliczFunction.power(2.0)
ONE = Weight.constant(1.0)
CHI = StepFunction.indicator(0, 1)


def instances(seed, n, kinds=PHI_KINDS, max_pieces=8):
    rng = np.random.default_rng(seed)
    return [(random_phi(rng, kinds[i % len(kinds)]), random_weight(rng), random_step(rng, max_pieces)) for i in range(n)]


def test_modular_examples():
    assert modular_rho(SQ, ONE, CHI) == 1.0
    assert modular_rho(SQ, Weight([0, 1], [2.0], 1.0), StepFunction.indicator(0, 2)) == 3.0
    assert modular_rho(SQ, ONE, StepFunction.zero()) == 0.0


def test_luxemburg_examples():
    assert luxemburg_norm(SQ, ONE, CHI) == pytest.approx(1.0, rel=1e-10)
    assert luxemburg_norm(SQ, ONE, 2 * CHI) == pytest.approx(2.0, rel=1e-10)
    assert luxemburg_norm(SQ, ONE, StepFunction.zero()) == 0.0


def test_orlicz_examples():
    r = orlicz_norm(SQ, ONE, CHI)
    assert r.norm == pytest.approx(2.0, abs=1e-12) and r.k == pytest.approx(1.0, rel=1e-10)
    lin = OrliczFunction.linear(1.0)
    K = k_interval(lin, ONE, StepFunction.indicator(0, 0.5, 0.5))
    assert K.empty and K.case_tag == "bounded-slope-empty"
    assert orlicz_norm(lin, ONE, StepFunction.indicator(0, 0.5, 0.5)).norm == 0.25
    assert orlicz_norm(SQ, ONE, StepFunction.zero()).norm == 0.0


def test_k_interval_examples():
    K = k_interval(SQ, ONE, CHI)
    assert K.k_star == pytest.approx(1.0, rel=1e-10) and K.singleton and K.case_tag == "N-function"
    E = OrliczFunction([], Final("exp", 1.0, 1.0))
    for _, w, x in instances(3, 10):
        assert not k_interval(E, w, x).empty
    with pytest.raises(PreconditionError):
        k_interval(SQ, ONE, StepFunction.zero())


def test_dual_oracle_quadratic():
    assert orlicz_norm_dual_oracle(SQ, ONE, CHI, 64) == pytest.approx(2.0, abs=1e-3)
    assert orlicz_norm_dual_oracle(SQ, ONE, StepFunction.zero(), 64) == 0.0


def test_theta_examples():
    E = OrliczFunction([], Final("exp", 1.0, 1.0))
    for F in (SQ, E):
        assert theta(F, ONE, 3 * CHI) == 0.0
    assert theta(SQ, ONE, StepFunction.zero()) == 0.0


@pytest.mark.parametrize("F,w,f", instances(0, 15))
def test_modular_matches_quadrature(F, w, f):
    ys, dW = piece_masses_oracle(f, w)
    ref = sum(phi_quad(F, y) * m for y, m in zip(ys, dW))
    assert modular_rho(F, w, f) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("F,w,f", instances(1, 25))
def test_norm_sandwich_and_grid(F, w, f):
    lux = luxemburg_norm(F, w, f)
    orl = orlicz_norm(F, w, f).norm
    assert lux <= orl * (1 + 1e-9) and orl <= 2 * lux * (1 + 1e-9)
    ys, dW = piece_masses_oracle(f, w)
    hmin, _ = amemiya_grid_min(F, ys, dW)
    assert orl == pytest.approx(hmin, abs=1e-6 * max(1.0, orl))
    for k in (0.1, 1.0, 10.0):
        assert orl <= amemiya(F, w, f, k) + 1e-12


@pytest.mark.parametrize("F,w,f", instances(2, 25))
def test_k_crossing_characterisation(F, w, f):
    K = k_interval(F, w, f)
    if K.empty:
        B = F.limit_slope
        assert F.conjugate.phi(B) * w.W(f.support_measure()) <= 1.0
        assert K.attained_norm == pytest.approx(B * lorentz_norm(f, w), rel=1e-12)
        return
    fs = rearrangement(f)
    G = F.conjugate
    for k in (K.k_star, K.k_mid, K.k_star_star):
        c = modular_rho(G, w, fs.map_values(lambda v: np.where(v > 0, F.p(k * v), 0.0)))
        c_left = modular_rho(G, w, fs.map_values(lambda v: np.where(v > 0, F.p_left(k * v), 0.0)))
        assert c_left <= 1.0 + 1e-9 and c >= 1.0 - 1e-9


@pytest.mark.parametrize("F,w,f", instances(4, 15, ("power", "piecewise", "log")))
def test_delta2_unit_modular(F, w, f):
    assert delta2(F)
    lam = luxemburg_norm(F, w, f)
    assert modular_rho(F, w, f / lam) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("F,w,f", instances(5, 10, ("power", "piecewise")))
def test_delta2_modular_and_norm_vanish_together(F, w, f):
    seq = [f / 2**n for n in range(1, 30, 4)]
    rho = [modular_rho(F, w, g) for g in seq]
    lux = [luxemburg_norm(F, w, g) for g in seq]
    assert rho[-1] < 1e-6 * rho[0] and lux[-1] < 1e-6 * lux[0]


@given(st.integers(0, 10_000))
def test_symmetry_under_rearrangement(seed):
    (F, w, f), = instances(seed, 1)
    assert orlicz_norm(F, w, f).norm == orlicz_norm(F, w, rearrangement(f)).norm


@pytest.mark.parametrize("F,w,f", instances(6, 8, ("power", "piecewise", "exp")))
def test_second_associate(F, w, f):
    # the norming functional of f/||f|| reaches ||f||; random g stay below
    norm = orlicz_norm(F, w, f).norm
    g = supporting_functional(F, w, f / norm).v
    G = F.conjugate
    best = (f * g).integral() / dual_norm(G, w, g)
    rng = np.random.default_rng(0)
    for _ in range(10):
        h = random_step(rng, 6)
        assert (f * h).integral() / dual_norm(G, w, h) <= norm * (1 + 1e-9)
    assert best == pytest.approx(norm, rel=1e-3)


@pytest.mark.parametrize("F,w,f", instances(7, 6))
def test_dual_oracle_is_lower_bound(F, w, f):
    assert orlicz_norm_dual_oracle(F, w, f, 64) <= orlicz_norm(F, w, f).norm * (1 + 1e-9)
