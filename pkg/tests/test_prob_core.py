import math
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cogmac.prob_core import (AlphabetDims, ChannelSpec, InputDist, JointPmf, ResourceError,
                              TypeCount, conditional_divergence, conditional_entropy,
                              count_types, divergence, entropy, enumerate_types, h2,
                              log_type_class_size, matched_metric, metric_expectation,
                              mutual_info, quantize_to_type)

weights = arrays(np.float64, (2, 2, 3), elements=st.floats(0.0, 1.0)).filter(lambda a: a.sum() > 1e-3)


def _pmf(a):
    return JointPmf.renormalize(a)


def test_h2_values():
    assert h2(0.5) == pytest.approx(1.0)
    assert h2(0.0) == 0.0
    assert h2(0.1) == pytest.approx(-(0.1 * math.log2(0.1) + 0.9 * math.log2(0.9)), abs=1e-15)


def test_joint_pmf_validation():
    with pytest.raises(ValueError):
        JointPmf(np.full((2, 2, 2), 0.2))
    with pytest.raises(ValueError):
        JointPmf(np.array([[[1.1, -0.1]]]))
    P = JointPmf.from_parts(np.full((2, 2), 0.25), np.full((2, 2, 3), 1 / 3))
    assert P.dims == AlphabetDims(2, 2, 3)
    np.testing.assert_allclose(P.py, np.full(3, 1 / 3))
    np.testing.assert_allclose(P.conditional_y(), np.full((2, 2, 3), 1 / 3))


def test_channel_spec_checks_rows():
    with pytest.raises(ValueError):
        ChannelSpec(np.full((2, 2, 2), 0.6), np.zeros((2, 2, 2)))
    W = np.full((2, 2, 2), 0.5)
    with pytest.raises(ValueError):
        ChannelSpec(W, np.zeros((2, 2, 3)))


def test_matched_metric_floors_zero_transitions():
    W = np.array([[[1.0, 0.0]]])
    q = matched_metric(W, floor=-7.0)
    assert q[0, 0, 0] == 0.0 and q[0, 0, 1] == -7.0


@given(weights)
def test_chain_rule(a):
    f = _pmf(a)
    lhs = mutual_info(f, ("X1", "X2"), "Y")
    rhs = mutual_info(f, "X1", "Y") + mutual_info(f, "X2", "Y", "X1")
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(weights)
def test_information_bounds(a):
    f = _pmf(a)
    i = mutual_info(f, "X1", "Y")
    assert 0.0 <= i <= min(entropy(f.p1), entropy(f.py)) + 1e-12
    assert conditional_entropy(f, "Y", ("X1", "X2")) <= entropy(f.py) + 1e-12


@given(weights, weights)
def test_divergence_nonnegative_and_zero_on_self(a, b):
    f, g = _pmf(a), _pmf(b + 1e-3)
    assert divergence(f, g) >= 0.0
    assert divergence(f, f) == pytest.approx(0.0, abs=1e-12)


def test_divergence_infinite_without_support():
    f = _pmf(np.ones((1, 1, 2)))
    g = _pmf(np.array([[[1.0, 0.0]]]))
    assert divergence(f, g) == math.inf


def test_conditional_divergence_of_true_channel_is_zero():
    W = np.array([[[0.9, 0.1], [0.3, 0.7]]])
    f = JointPmf.from_parts(np.array([[0.4, 0.6]]), W)
    assert conditional_divergence(f, W, ("X1", "X2")) == pytest.approx(0.0, abs=1e-12)


def test_metric_expectation():
    f = _pmf(np.ones((1, 1, 2)))
    assert metric_expectation(f, np.array([[[1.0, 3.0]]])) == pytest.approx(2.0)


def test_count_types_matches_stars_and_bars():
    assert count_types(4, (2, 2, 2)) == comb(4 + 7, 7)
    assert len(enumerate_types(4, (2, 2, 2))) == comb(11, 7)


def test_enumerate_types_with_pin():
    pin = np.array([[1, 2], [0, 1]])
    ts = enumerate_types(4, (2, 2, 3), pin=pin, pin_axes=(0, 1))
    assert len(ts) == 3 * 6 * 1 * 3
    assert all(np.array_equal(t.marginal((0, 1)), pin) for t in ts)


def test_enumeration_cap():
    with pytest.raises(ResourceError):
        enumerate_types(30, (2,))


def test_type_class_size_by_brute_force():
    import itertools
    t = TypeCount(5, np.array([[2, 1], [0, 2]]))
    n_seq = sum(1 for s in itertools.product(range(4), repeat=5)
                if np.array_equal(np.bincount(s, minlength=4), t.counts.ravel()))
    assert 2 ** log_type_class_size(t) == pytest.approx(n_seq)
    # conditional on the first coordinate: 3!/(2!1!) * 2!/(0!2!)
    assert 2 ** log_type_class_size(t, given_axes=(0,)) == pytest.approx(3.0)


@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6).filter(lambda v: sum(v) > 1e-3),
       st.integers(1, 40))
def test_quantize_to_type(v, n):
    p = np.array(v) / sum(v)
    c = quantize_to_type(p, n)
    assert c.sum() == n and np.all(c >= 0)
    assert np.all(np.abs(c - n * p) < 1.0 + 1e-9)
    assert np.all(c[p == 0] == 0)


def test_input_dist_product():
    d = InputDist.product([0.5, 0.5], [0.25, 0.75])
    np.testing.assert_allclose(d.p12, [[0.125, 0.375], [0.125, 0.375]])
