import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brute_force import brute_force_sup
from cogmac.ensemble_sim import (EnsembleConfig, SimReport, codebook_size, draw_conditional,
                                 draw_from_type, exact_bin_fail, exact_pe1_sup, exact_pe2_sup,
                                 simulate)
from cogmac.prob_core import ChannelSpec, ResourceError, TypeCount, matched_metric
from cogmac.regions import random_channel


def test_constant_composition_is_constant():
    rng = np.random.default_rng(0)
    np.testing.assert_array_equal(draw_from_type(TypeCount(5, [5, 0]), rng), np.zeros(5))


def test_type_draw_is_uniform_over_arrangements():
    # per-cell 3-sigma bands fail by chance for about 1.6% of seeds; this seed is fixed
    rng = np.random.default_rng(2026)
    draws = draw_from_type([2, 2], rng, size=60_000)
    freq = Counter(map(tuple, draws))
    assert len(freq) == 6
    sigma = math.sqrt((1 / 6) * (5 / 6) / 60_000)
    for c in freq.values():
        assert abs(c / 60_000 - 1 / 6) <= 3 * sigma


def test_type_draw_passes_chi_square():
    from scipy.stats import chisquare
    draws = draw_from_type([2, 1, 2], np.random.default_rng(7), size=300_000)
    freq = Counter(map(tuple, draws))
    assert len(freq) == 30
    assert chisquare(list(freq.values())).pvalue > 1e-3


@given(st.integers(0, 10_000))
def test_conditional_draw_preserves_the_joint_type(seed):
    rng = np.random.default_rng(seed)
    joint = np.array([[2, 1, 0], [1, 0, 3]])
    x = rng.permutation(np.repeat([0, 1], joint.sum(axis=1)))
    z = draw_conditional(x, joint, rng, size=5)
    for row in z:
        t = np.zeros_like(joint)
        np.add.at(t, (x, row), 1)
        np.testing.assert_array_equal(t, joint)


def test_conditional_draw_rejects_wrong_marginal():
    with pytest.raises(ValueError):
        draw_conditional(np.array([0, 0, 1]), np.array([[1, 0], [1, 1]]), np.random.default_rng(0))


def test_codebook_sizes_use_the_ceiling():
    assert codebook_size(4, 0.25) == 2
    assert codebook_size(4, 0.3) == 3
    assert codebook_size(10, 0.0) == 1
    with pytest.raises(ResourceError):
        codebook_size(100, 1.0)


def test_config_quantizes_and_defaults_gamma():
    cfg = EnsembleConfig("binning", 8, 0.25, 0.25, np.array([[0.3, 0.2], [0.1, 0.4]]))
    assert cfg.counts.sum() == 8
    p = cfg.counts / 8
    i12 = sum(p[a, b] * math.log2(p[a, b] / p[a].sum() / p[:, b].sum())
              for a in range(2) for b in range(2) if p[a, b] > 0)
    assert cfg.gamma == pytest.approx(i12 + 8 ** -0.5)
    with pytest.raises(ValueError):
        EnsembleConfig("ldpc", 8, 0.1, 0.1, np.full((2, 2), 0.25))


def _tiny(seed):
    return random_channel(np.random.default_rng(seed), 2, 2, 2, matched=bool(seed % 2))


@pytest.mark.parametrize("seed,counts,M1,M2", [
    (0, [[1, 1], [1, 1]], 2, 2),
    (1, [[2, 0], [1, 1]], 2, 2),
    (2, [[1, 1], [0, 1]], 2, 1),
    (3, [[0, 2], [1, 0]], 1, 2),
])
def test_exact_oracles_equal_full_enumeration(seed, counts, M1, M2):
    ch = _tiny(seed)
    counts = np.array(counts)
    n = int(counts.sum())
    b1, b2 = brute_force_sup(counts, ch.W, ch.q, M1, M2)
    R1, R2 = math.log2(M1) / n, math.log2(M2) / n
    assert abs(exact_pe1_sup(counts, ch, R1, R2, n) - b1) <= 1e-12
    assert abs(exact_pe2_sup(counts, ch, R2, n) - b2) <= 1e-12


def test_no_competitor_no_error():
    ch = _tiny(0)
    P = np.full((2, 2), 0.25)
    assert exact_pe2_sup(P, ch, 0.0, 8) == 0.0
    assert exact_pe1_sup(P, ch, 0.0, 0.5, 8) == 0.0


def test_exact_cap():
    with pytest.raises(ResourceError):
        exact_pe2_sup(np.full((2, 2), 0.25), _tiny(0), 0.5, 16)


def test_bin_fail_examples():
    P = np.full((2, 2), 0.25)
    # |T(P12|x1)| = 2 * 2, |T(P2)| = 4! / (2! 2!) = 6, one codeword per bin
    assert exact_bin_fail(P, 0.0, 4) == pytest.approx(1 - 4 / 6, abs=1e-15)
    assert exact_bin_fail(P, 3.0, 4) < 1e-300
    assert exact_bin_fail(np.array([[0.5, 0.5]]), 0.0, 4) == 0.0


def test_simulation_is_deterministic_across_workers():
    ch = _tiny(1)
    cfg = EnsembleConfig("superposition", 6, 0.3, 0.3, np.full((2, 2), 0.25), seed=9)
    a = simulate(cfg, ch, 300, workers=1)
    b = simulate(cfg, ch, 300, workers=3)
    assert a == b


def test_binning_is_deterministic_across_workers():
    ch = _tiny(2)
    cfg = EnsembleConfig("binning", 6, 0.3, 0.3, np.full((2, 2), 0.25), seed=9)
    assert simulate(cfg, ch, 200, workers=1) == simulate(cfg, ch, 200, workers=2)


def test_superposition_frequencies_match_exact():
    ch = _tiny(5)
    P = np.full((2, 2), 0.25)
    cfg = EnsembleConfig("superposition", 6, 0.3, 0.2, P, seed=3)
    rep = simulate(cfg, ch, 3000)
    for name, p in (("pe1_event", exact_pe1_sup(P, ch, 0.3, 0.2, 6)),
                    ("pe2_event", exact_pe2_sup(P, ch, 0.2, 6))):
        sigma = math.sqrt(p * (1 - p) / rep.trials)
        assert abs(rep.rate(name) - p) <= 4 * sigma


def test_encode_failures_match_exact():
    ch = _tiny(6)
    P = np.array([[0.4, 0.1], [0.1, 0.4]])
    cfg = EnsembleConfig("binning", 8, 0.25, 0.25, P, gamma=0.1, seed=4)
    rep = simulate(cfg, ch, 3000)
    p = exact_bin_fail(cfg.counts, 0.1, 8)
    assert abs(rep.rate("encode_fail") - p) <= 3 * math.sqrt(p * (1 - p) / 3000)


def test_noiseless_matched_error_decreases_with_blocklength():
    W = np.zeros((2, 2, 4))
    for a, b in itertools.product(range(2), range(2)):
        W[a, b, 2 * a + b] = 1.0
    ch = ChannelSpec(W, matched_metric(W))
    P = np.full((2, 2), 0.25)
    rates = []
    for n in (8, 16, 24):
        cfg = EnsembleConfig("superposition", n, 0.25, 0.25, P, seed=n)
        rates.append(simulate(cfg, ch, 400).rate("errors"))
    assert rates[0] >= rates[1] >= rates[2]
    assert rates[2] < 0.05


def test_all_equal_metric_gives_all_ties():
    ch = ChannelSpec(np.full((2, 2, 2), 0.5), np.zeros((2, 2, 2)))
    cfg = EnsembleConfig("superposition", 4, 0.25, 0.25, np.full((2, 2), 0.25))
    rep = simulate(cfg, ch, 50)
    assert rep.err1 == 50 and rep.pe2_event == 50


def test_budget_is_enforced():
    cfg = EnsembleConfig("superposition", 16, 0.5, 0.5, np.full((2, 2), 0.25))
    with pytest.raises(ResourceError):
        simulate(cfg, _tiny(0), 10_000, budget=1e6)


def test_report_statistics():
    rep = SimReport({"n": 10}, 100, err1=25, err2=5, pe1_event=25, pe2_event=10)
    assert rep.errors == 30
    lo, hi = rep.interval("err1")
    assert lo < 0.25 < hi
    assert rep.exponent("err1") == pytest.approx(-math.log2(0.25) / 10)
    assert rep.exponent("err2") is None
    with pytest.raises(ValueError):
        SimReport({"n": 10}, 5, err1=6)
