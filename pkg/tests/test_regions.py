import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogmac.prob_core import InputDist, JointPmf, matched_metric, mutual_info
from cogmac.regions import (RatePrimitives, RegionCurve, induced_mac, lapidoth_su_bound,
                            parallel_channel, random_channel, random_input, rate_primitives,
                            rate_split_closure, region_bin, region_bin_star, region_bin_tilde,
                            region_lm, region_matched, region_sup, region_sup_tilde,
                            single_user_bound, upper_envelope)


def _h2(p):
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


UNIFORM = np.full((2, 2), 0.25)


@pytest.fixture(scope="module")
def parallel():
    ch = parallel_channel(0.1)
    P = ch.joint(InputDist(UNIFORM))
    return ch, P, RatePrimitives(P, ch.q)


def test_parallel_channel_structure():
    ch = parallel_channel(0.1)
    np.testing.assert_allclose(ch.W.sum(axis=2), 1.0)
    # the first component is noiseless, the second a BSC
    assert ch.W[1, 0, 2] == pytest.approx(0.9) and ch.W[1, 0, 3] == pytest.approx(0.1)


def test_lm_corner(parallel):
    ch, P, pr = parallel
    c = region_lm([0.5, 0.5], [0.5, 0.5], ch, [0.0, 0.5, 1.0], prims=pr)
    assert c.meta["R1_max"] == pytest.approx(1.0, abs=1e-6)
    assert c.meta["R2_max"] == pytest.approx(1 - _h2(0.1), abs=1e-6)
    assert c.max_r2(1.0) == pytest.approx(1 - _h2(0.1), abs=5e-3)


def test_superposition_falls_short_at_full_r1(parallel):
    ch, P, pr = parallel
    c = region_sup(P, ch.q, [1.0], prims=pr)
    assert c.max_r2(1.0) == pytest.approx(1 - 2 * _h2(0.05), abs=5e-3)
    assert c.max_r2(1.0) <= 1 - _h2(0.1) - 0.09


def test_binning_reaches_the_corner(parallel):
    ch, P, pr = parallel
    b = region_bin(P, ch.q, [0.0, 1.0], prims=pr)
    assert b.max_r2(1.0) == pytest.approx(1 - _h2(0.1), abs=5e-3)
    star = rate_split_closure(b)
    assert star.max_sum_rate() == pytest.approx(2 - _h2(0.1), abs=5e-3)


def test_tilde_forms_agree_on_parallel(parallel):
    ch, P, pr = parallel
    grid = [0.0, 0.5, 1.0]
    for a, b in ((region_sup, region_sup_tilde), (region_bin, region_bin_tilde)):
        ca, cb = a(P, ch.q, grid, prims=pr), b(P, ch.q, grid, prims=pr)
        np.testing.assert_allclose(ca.samples, cb.samples, atol=5e-3)


@pytest.mark.parametrize("seed", [0, 1])
def test_matched_metric_gives_matched_region(seed):
    ch = random_channel(np.random.default_rng(seed), 2, 2, 2, matched=True)
    P = ch.joint(random_input(np.random.default_rng(seed + 100), 2, 2))
    grid = np.linspace(0, 1, 6)
    ref = region_matched(P, grid)
    for fn in (region_sup, region_bin_star):
        c = fn(P, ch.q, grid)
        for r1, r2 in ref.samples:
            assert c.max_r2(r1) == pytest.approx(r2, abs=5e-3)


def test_rate_primitives_dict(parallel):
    ch, P, pr = parallel
    d = rate_primitives(P, ch.q, 1.0, 0.2)
    assert set(d) >= {"R1p", "R2p", "R1pp", "R2pp"}
    assert d["R2p"] == pytest.approx(1 - _h2(0.1), abs=1e-6)


def test_curve_rejects_unsorted_samples():
    with pytest.raises(ValueError):
        RegionCurve("sup", [[0.5, 0.1], [0.2, 0.3]])


def test_curve_queries():
    c = RegionCurve("sup", [[0.0, 1.0], [1.0, 0.5]])
    assert c.max_r2(0.5) == pytest.approx(0.75)
    assert c.contains(0.5, 0.7) and not c.contains(0.5, 0.8)
    assert not c.contains(1.2, 0.0)
    assert c.max_r2(2.0) == -math.inf
    assert c.max_sum_rate() == pytest.approx(1.5)


points = st.lists(st.tuples(st.floats(0, 2), st.floats(0, 2)), min_size=1, max_size=30)


@given(points)
def test_upper_envelope_is_concave_and_dominates(pts):
    verts, src = upper_envelope(pts)
    assert len(verts) == len(src)
    assert np.all(np.diff(verts[:, 0]) > 0)
    assert np.all(np.diff(verts[:, 1]) <= 1e-12)
    slopes = np.diff(verts[:, 1]) / np.diff(verts[:, 0])
    assert np.all(np.diff(slopes) <= 1e-9)
    for x, y in pts:
        assert y <= np.interp(x, verts[:, 0], verts[:, 1]) + 1e-9


@given(st.lists(st.floats(0, 1), min_size=2, max_size=8))
def test_rate_split_closure_keeps_the_region_and_sum_rate(r2):
    r2 = sorted(r2, reverse=True)
    c = RegionCurve("bin", np.c_[np.linspace(0, 1, len(r2)), r2])
    star = rate_split_closure(c)
    assert star.max_sum_rate() == pytest.approx(c.max_sum_rate(), abs=1e-12)
    for a, b in c.samples:
        assert star.contains(a, b, tol=1e-12)


def test_induced_mac_matches_parallel_channel():
    ch = parallel_channel(0.1)
    W_su, q_su = ch.W.reshape(4, 4), ch.q.reshape(4, 4)
    ind = induced_mac(W_su, q_su, np.array([[0, 1], [2, 3]]))
    np.testing.assert_array_equal(ind.W, ch.W)
    np.testing.assert_array_equal(ind.q, ch.q)


def test_single_user_bounds_on_parallel_channel():
    ch = parallel_channel(0.1)
    W_su, q_su = ch.W.reshape(4, 4), ch.q.reshape(4, 4)
    phi = np.array([[0, 1], [2, 3]])
    b = single_user_bound(W_su, q_su, phi, UNIFORM)
    lap, _ = lapidoth_su_bound(W_su, q_su, phi, [0.5, 0.5], [0.5, 0.5])
    assert b.value == pytest.approx(2 - _h2(0.1), abs=5e-3)
    assert b.bin_star_sum <= b.value + 5e-3
    assert b.value >= lap - 1e-6


def test_single_user_bounds_coincide_without_second_input():
    W = np.array([[0.9, 0.1], [0.2, 0.8]])
    q = np.array([[0.0, -1.0], [-2.0, 0.0]])
    phi = np.array([[0], [1]])
    b = single_user_bound(W, q, phi, np.array([[0.4], [0.6]]))
    lap, _ = lapidoth_su_bound(W, q, phi, [0.4, 0.6], [1.0])
    assert b.value == pytest.approx(lap, abs=1e-6)


def test_region_rejects_negative_rates(parallel):
    ch, P, pr = parallel
    with pytest.raises(ValueError):
        region_sup(P, ch.q, [-0.1], prims=pr)


def test_matched_region_closed_form():
    W = np.array([[[0.9, 0.1], [0.1, 0.9]]])
    P = JointPmf.from_parts(np.array([[0.5, 0.5]]), W)
    c = region_matched(P, [0.0])
    assert c.max_r2(0.0) == pytest.approx(1 - _h2(0.1), abs=1e-12)
    assert mutual_info(P, (0,), (2,)) == 0.0


@given(st.integers(0, 10_000))
def test_matched_metric_pins_R2_prime_to_conditional_information(seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, 2, 2, 2, matched=True)
    P = ch.joint(random_input(rng, 2, 2))
    r2p = RatePrimitives(P, ch.q).R2p()
    cond = mutual_info(P, (1,), (2,), (0,))
    assert r2p >= cond - 1e-6
    assert r2p <= cond + 1e-9   # P itself is feasible


def test_R2_prime_can_sit_below_joint_information_with_correlated_inputs():
    ch = random_channel(np.random.default_rng(1), 2, 2, 2, matched=True)
    P = ch.joint(InputDist(np.array([[0.4, 0.1], [0.1, 0.4]])))
    r2p = RatePrimitives(P, ch.q).R2p()
    assert r2p < mutual_info(P, (1,), (2, 0)) - 1e-3
