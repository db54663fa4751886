import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frnn_emotion.owa import Bound, OwaScheme, default_k, make_weights, owa_aggregate, weight_table

import oracles

SCHEMES = [s.value for s in OwaScheme]
unit_floats = st.floats(0.0, 1.0, allow_nan=False)


def test_exp_upper_three():
    np.testing.assert_allclose(make_weights("exp", "upper", 3).weights, [4 / 7, 2 / 7, 1 / 7], atol=1e-15)


def test_invadd_uses_harmonic_number():
    np.testing.assert_allclose(make_weights("invadd", "upper", 2).weights, [2 / 3, 1 / 3], atol=1e-15)


def test_trivial_weights():
    assert make_weights("mean", "lower", 4).weights.tolist() == [0.25] * 4
    assert make_weights("strict", "lower", 5).weights.tolist() == [0, 0, 0, 0, 1]
    assert make_weights("strict", "upper", 1).weights.tolist() == [1.0]


def test_zero_length_rejected():
    with pytest.raises(ValueError):
        make_weights("add", "upper", 0)
    with pytest.raises(ValueError):
        make_weights("bogus", "upper", 3)


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("bound", ["lower", "upper"])
def test_matches_closed_forms(scheme, bound):
    for p in (1, 2, 3, 7, 20, 60):
        expected = [float(w) for w in oracles.owa_weights(scheme, bound, p)]
        np.testing.assert_allclose(make_weights(scheme, bound, p).weights, expected, rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_monotone_direction(scheme):
    for p in range(1, 40):
        up = make_weights(scheme, Bound.UPPER, p).weights
        lo = make_weights(scheme, Bound.LOWER, p).weights
        assert np.all(np.diff(up) <= 0)
        assert np.all(np.diff(lo) >= 0)


def test_exp_weights_do_not_overflow():
    w = make_weights("exp", "upper", 2000).weights
    assert np.all(np.isfinite(w))
    assert abs(w.sum() - 1) < 1e-9


def test_weight_table_rows():
    t = weight_table("add", "lower", 5)
    assert t.shape == (6, 5)
    assert not t[0].any()
    np.testing.assert_array_equal(t[3, :3], make_weights("add", "lower", 3).weights)
    assert not t[3, 3:].any()


def test_aggregate_examples():
    vals = [0.2, 0.8, 0.5]
    assert owa_aggregate(vals, make_weights("mean", "upper", 3)) == pytest.approx(0.5, abs=1e-15)
    assert owa_aggregate(vals, make_weights("strict", "upper", 3)) == 0.8
    assert owa_aggregate(vals, make_weights("strict", "lower", 3)) == 0.2
    assert owa_aggregate([1.0, 0.0], make_weights("exp", "upper", 2)) == pytest.approx(2 / 3, abs=1e-15)


def test_aggregate_length_mismatch():
    with pytest.raises(ValueError):
        owa_aggregate([1.0, 2.0], make_weights("mean", "upper", 3))


def test_default_k():
    assert default_k(2089) == 23
    assert default_k(4) == 1
    assert default_k(400) == 10
    assert default_k(1) == 1
    # sqrt(n)/2 = 22.5 exactly at n = 2025; half rounds away from zero
    assert default_k(2025) == 23
    with pytest.raises(ValueError):
        default_k(0)


@settings(max_examples=200, deadline=None)
@given(st.lists(unit_floats, min_size=1, max_size=30), st.sampled_from(SCHEMES),
       st.sampled_from(["lower", "upper"]), st.randoms(use_true_random=False))
def test_permutation_invariance(values, scheme, bound, rnd):
    w = make_weights(scheme, bound, len(values))
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert owa_aggregate(shuffled, w) == owa_aggregate(values, w)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(unit_floats, unit_floats), min_size=1, max_size=30),
       st.sampled_from(SCHEMES), st.sampled_from(["lower", "upper"]))
def test_monotonicity(pairs, scheme, bound):
    a = [max(x, y) for x, y in pairs]
    b = [min(x, y) for x, y in pairs]
    w = make_weights(scheme, bound, len(pairs))
    assert owa_aggregate(a, w) >= owa_aggregate(b, w) - 1e-15


@settings(max_examples=200, deadline=None)
@given(st.lists(unit_floats, min_size=1, max_size=30), st.sampled_from(SCHEMES),
       st.sampled_from(["lower", "upper"]))
def test_between_min_and_max(values, scheme, bound):
    v = owa_aggregate(values, make_weights(scheme, bound, len(values)))
    assert min(values) - 1e-12 <= v <= max(values) + 1e-12
    assert math.isclose(v, oracles.owa(values, scheme, bound), abs_tol=1e-12)
