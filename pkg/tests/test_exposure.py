import numpy as np
import pytest

from oltk.errors import PreconditionError
from oltk.exposure import (
    counterexample_sequence,
    grad_in_koethe_dual,
    nabla2_failure_blocks,
    norm_attainment_check,
    precheck_thm1,
    precheck_thm2,
    sep_space_check,
    strongly_exposed_classify,
    supporting_functional,
)
from oltk.generators import affine_interval_fixture, log_fixture, random_phi, random_step, random_weight
from oltk.level import dual_modular_P, dual_norm
from oltk.modular import k_interval, modular_rho, orlicz_norm
from oltk.orlicz import Final, OrliczFunction, Segment
from oltk.rearrange import rearrangement
from oltk.step import StepFunction, Weight

SQ = OrliczFunction.power(2.0)
ONE = Weight.constant(1.0)
AI = affine_interval_fixture()
X_A = StepFunction([0, 0.1, 0.5], [3.0, 1.5]) / 2.4
X_B = StepFunction([0, 0.1, 0.5], [3.0, 2.0]) / 2.8
X_C = StepFunction.indicator(0, 1, 0.5)
HALF = StepFunction.indicator(0, 1, 0.5)


def unit(F, w, x):
    return x / orlicz_norm(F, w, x).norm


def test_fixtures_are_unit():
    for x in (X_A, X_B, X_C):
        assert orlicz_norm(AI, ONE, x).norm == pytest.approx(1.0, abs=1e-12)


def test_grad_theta_branch():
    assert grad_in_koethe_dual(SQ, ONE, HALF) == (True, "theta")


def test_grad_equality_branch():
    # p(u) = u below a wall at 1: with k x = 1 on a set of measure 2, psi(1) * 2 = 1
    F = OrliczFunction([Segment(0.0, 1.0, 0.0, 1.0)], Final("wall"))
    x = StepFunction.indicator(0, 2, 0.5)
    assert orlicz_norm(F, ONE, x).norm == pytest.approx(1.0, abs=1e-12)
    assert grad_in_koethe_dual(F, ONE, x) == (True, "equality")


def test_grad_rejects_empty_K():
    F = OrliczFunction.linear(1.0)
    x = StepFunction.indicator(0, 1, 1.0)
    with pytest.raises(PreconditionError):
        grad_in_koethe_dual(F, ONE, x)


def test_supporting_functional_quadratic():
    sf = supporting_functional(SQ, ONE, HALF)
    # k = 2, p(k x) = 2 on [0, 1)
    assert sf.v.allclose(StepFunction.indicator(0, 1, 2.0))
    assert dual_modular_P(SQ.conjugate, ONE, sf.v) == pytest.approx(1.0, abs=1e-12)


def test_selector_matters_at_a_jump():
    # p jumps from 1 to 2 at u = 1 and k x = 1 on both pieces
    F = OrliczFunction([Segment(0.0, 1.0, 0.0, 1.0)], Final("affine", 1.0, 1.0))
    x = StepFunction([0, 0.5, 1.0], [2 / 3, -2 / 3])
    assert orlicz_norm(F, ONE, x).norm == pytest.approx(1.0, abs=1e-12)
    v0 = supporting_functional(F, ONE, x, selector=0.0).v
    v1 = supporting_functional(F, ONE, x, selector=1.0).v
    assert not v0.allclose(v1, atol=1e-6)
    for v in (v0, v1):
        assert norm_attainment_check(F, ONE, x, v).ok
        assert (x * v).integral() == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("seed", range(12))
def test_attainment_closure(seed):
    rng = np.random.default_rng(seed)
    F, w = random_phi(rng, ("power", "piecewise", "log")[seed % 3]), random_weight(rng)
    x = unit(F, w, random_step(rng, 8))
    if k_interval(F, w, x).empty:
        pytest.skip("K(x) empty")
    sf = supporting_functional(F, w, x)
    rep = norm_attainment_check(F, w, x, sf.v)
    assert rep.ok, rep.residuals
    assert dual_norm(F.conjugate, w, sf.v) == pytest.approx(1.0, abs=1e-8)
    assert not norm_attainment_check(F, w, x, sf.v * 1.1).ok


def test_attainment_detects_sign_flip():
    x = StepFunction([0, 0.5, 1.0], [0.5, 0.25])
    x = unit(SQ, ONE, x)
    v = supporting_functional(SQ, ONE, x).v
    flipped = v * StepFunction([0, 0.5, 1.0], [1.0, -1.0])
    rep = norm_attainment_check(SQ, ONE, x, flipped)
    assert not rep.ok and rep.residuals["alignment"] > 0.1


def test_precheck_thm1():
    assert precheck_thm1(SQ, ONE, HALF) is None
    lin = OrliczFunction.linear(1.0)
    assert precheck_thm1(lin, ONE, StepFunction.indicator(0, 0.5, 0.5)) is not None
    # p = u on [0,1), then 1: B = 1, psi(1) = 1/2, W(2) = 2 gives exactly 1
    F = OrliczFunction([Segment(0.0, 1.0, 0.0, 1.0)], Final("affine", 1.0, 0.0))
    x = StepFunction.indicator(0, 2, 0.5)
    assert orlicz_norm(F, ONE, x).norm == pytest.approx(1.0, abs=1e-12)
    assert precheck_thm1(F, ONE, x) is None


def test_precheck_thm2_on_step_weights():
    k = k_interval(AI, ONE, X_C).k_star
    assert precheck_thm2(SQ, ONE, HALF, 2.0) is None
    assert precheck_thm2(AI, ONE, X_A, k) is None  # two values
    # indicator with k alpha inside (1, 2): omega is constant on pieces, so sigma(A) meets L(omega)
    w = Weight([0, 0.25, 0.5, 2.0], [3.0, 2.0, 1.5], 1.0)
    x = unit(AI, w, StepFunction.indicator(0, 0.5))
    k = k_interval(AI, w, x).k_star
    assert precheck_thm2(AI, w, x, k) is None


def test_classify_examples():
    assert strongly_exposed_classify(SQ, ONE, HALF).verdict == "StronglyExposed"
    vd = strongly_exposed_classify(AI, ONE, X_A)
    assert vd.verdict == "NotStronglyExposed" and vd.failed_conditions == ["strict-convexity-carrier"]
    vd = strongly_exposed_classify(AI, ONE, X_B)
    assert vd.failed_conditions == ["A′B′-null"] and vd.counterexample_recipe == "ai-endpoint"
    vd = strongly_exposed_classify(AI, ONE, X_C)
    assert "K-singleton" in vd.failed_conditions


def test_classify_scaling_contract():
    with pytest.raises(PreconditionError):
        strongly_exposed_classify(SQ, ONE, StepFunction.indicator(0, 1))


def test_classify_delta2_failure():
    E = OrliczFunction([], Final("exp", 1.0, 1.0))
    x = unit(E, ONE, StepFunction.indicator(0, 1))
    vd = strongly_exposed_classify(E, ONE, x)
    assert vd.failed_conditions[0] == "Δ₂" and vd.counterexample_recipe == "delta2-truncation"
    assert counterexample_sequence(E, ONE, x, vd, 3).support_measure() == pytest.approx(0.75)


def test_classify_empty_K_out_of_scope():
    F = OrliczFunction([Segment(0.0, 1.0, 0.0, 1.0)], Final("affine", 1.0, 0.0))
    x = StepFunction.indicator(0, 2, 0.5)
    assert strongly_exposed_classify(F, ONE, x).verdict == "OutOfScope"


@pytest.mark.parametrize("seed", range(8))
def test_verdict_invariant_under_piece_permutation(seed):
    rng = np.random.default_rng(100 + seed)
    F = AI if seed % 2 else random_phi(rng, "piecewise")
    x = random_step(rng, 5)
    perm = rng.permutation(x.n_pieces)
    lens = x.lengths[perm]
    y = StepFunction(np.concatenate(([0.0], np.cumsum(lens))), x.values[perm])
    x, y = unit(F, ONE, x), unit(F, ONE, y)
    if k_interval(F, ONE, x).empty:
        pytest.skip("K(x) empty")
    a, b = strongly_exposed_classify(F, ONE, x), strongly_exposed_classify(F, ONE, y)
    assert (a.verdict, a.failed_conditions) == (b.verdict, b.failed_conditions)


def test_endpoint_sequence_keeps_modular():
    vd = strongly_exposed_classify(AI, ONE, X_B)
    k = k_interval(AI, ONE, X_B).k_star
    G = AI.conjugate

    def c(x):
        fs = rearrangement(x)
        return modular_rho(G, ONE, fs.map_values(lambda u: np.where(u > 0, AI.p(k * u), 0.0)))

    base = c(X_B)
    v = supporting_functional(AI, ONE, X_B).v
    for n in (1, 10, 100, 1000):
        xn = counterexample_sequence(AI, ONE, X_B, vd, n)
        assert c(xn) == pytest.approx(base, abs=1e-12)
        y = unit(AI, ONE, xn)
        assert (y * v).integral() >= 1 - 1e-6


def test_counterexample_requires_recipe():
    vd = strongly_exposed_classify(SQ, ONE, HALF)
    with pytest.raises(PreconditionError):
        counterexample_sequence(SQ, ONE, HALF, vd, 5)


def test_sep_space_examples():
    assert sep_space_check(SQ) == (True, [])
    ok, reasons = sep_space_check(log_fixture())
    assert not ok and reasons == ["∇₂"]
    ok, reasons = sep_space_check(AI)
    assert not ok and reasons == ["strict-convexity"]


@pytest.mark.parametrize("w", [ONE, Weight([0, 0.5, 2.0], [3.0, 2.0], 0.5)])
def test_nabla2_blocks(w):
    L = log_fixture()
    bc = nabla2_failure_blocks(L, w, 25)
    G = L.conjugate
    assert dual_modular_P(G, w, bc.f) <= 1.0
    assert dual_modular_P(G, w, bc.f * 1.1) >= 1e6
