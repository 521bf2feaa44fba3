import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oltk.errors import PreconditionError
from oltk.step import (
    StepFunction,
    Weight,
    combine,
    cumulative_W,
    evaluate,
    integrate,
    is_regular,
    maximal_constant_intervals,
)

from conftest import step_functions, weights

F31 = StepFunction([0, 1, 2], [3.0, 1.0])


def test_evaluate_pieces_and_tail():
    f = StepFunction.indicator(0, 1, 2.0)
    assert evaluate(f, 0.5) == 2.0
    assert evaluate(f, 1.0) == 0.0
    assert evaluate(F31, 1.0) == 1.0


def test_evaluate_rejects_negative_t():
    with pytest.raises(PreconditionError):
        evaluate(F31, -0.1)


def test_integrate_examples():
    assert integrate(StepFunction.indicator(0, 1, 2.0), 0, math.inf) == 2.0
    assert integrate(F31, 0.7, 0.7) == 0.0
    assert integrate(F31, 0.5, 1.5) == 2.0
    assert integrate(Weight.constant(1.0), 0, math.inf) == math.inf


def test_combine_examples():
    assert combine(F31, F31, np.subtract).is_zero
    s = combine(StepFunction.indicator(0, 1), StepFunction.indicator(0, 2), np.add)
    assert s == StepFunction([0, 1, 2], [2.0, 1.0])
    f, g = StepFunction.indicator(0, 1, 2.0), StepFunction.indicator(3, 4, 1.0)
    assert combine(f, g, np.maximum) == f + g


def test_cumulative_W_examples():
    assert cumulative_W(Weight.constant(1.0), 3.0) == 3.0
    w = Weight([0, 1], [2.0], 1.0)
    assert cumulative_W(w, 2.0) == 3.0
    assert cumulative_W(w, 0.0) == 0.0


def test_maximal_constant_intervals():
    assert maximal_constant_intervals(Weight.constant(1.0)) == [(0.0, math.inf)]
    assert maximal_constant_intervals(Weight([0, 1], [2.0], 1.0)) == [(0.0, 1.0), (1.0, math.inf)]
    assert len(maximal_constant_intervals(Weight([0, 1, 2], [3.0, 2.0], 1.0))) == 3


def test_is_regular():
    ok, K = is_regular(Weight.constant(1.0), 10)
    assert ok and K == 2.0
    w = Weight([0, 1], [2.0], 1.0)
    ok, K = is_regular(w, 50)
    # W(2t)/W(t) at t = 0.5, 1 and the limits: 2, 1.5, 2
    assert ok and K == pytest.approx(1.5, abs=1e-12)


def test_canonical_form_merges_equal_neighbours():
    f = StepFunction([0, 1, 2, 3], [1.0, 1.0, 0.0])
    assert f.n_pieces == 1 and f.end == 2.0


def test_weight_invariants():
    with pytest.raises(PreconditionError):
        Weight([0, 1], [1.0], 2.0)
    with pytest.raises(PreconditionError):
        Weight([0, 1], [1.0], 0.0)


def test_json_roundtrip():
    w = Weight([0, 1], [2.0], 1.0)
    assert StepFunction.from_dict(w.to_dict()) == w
    assert isinstance(StepFunction.from_dict(w.to_dict()), Weight)
    assert StepFunction.from_dict(F31.to_dict()) == F31
    with pytest.raises(PreconditionError):
        StepFunction.from_dict({"values": [1.0]})


@given(step_functions(), st.floats(0, 5), st.floats(0, 5), st.floats(0, 5))
def test_integrate_additive(f, a, b, c):
    a, b, c = sorted((a, b, c))
    assert integrate(f, a, c) == pytest.approx(integrate(f, a, b) + integrate(f, b, c), abs=1e-12)


@given(step_functions(), step_functions())
def test_combine_add_linear(f, g):
    assert (f + g).integral() == pytest.approx(f.integral() + g.integral(), abs=1e-12)


@given(step_functions())
def test_canonicalisation_idempotent(f):
    g = StepFunction(f.breakpoints, f.values, f.tail)
    assert g == f


@given(weights(), st.floats(0, 10), st.floats(1e-6, 5))
def test_W_strictly_increasing(w, t, dt):
    assert cumulative_W(w, t + dt) > cumulative_W(w, t)
