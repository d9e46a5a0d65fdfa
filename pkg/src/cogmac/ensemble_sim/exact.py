"""Exact small-n ensemble error probabilities by conditional-type enumeration.

All probabilities are averages over the random codebook and the channel.
The transmitted pair is fixed to a representative (x1, x2) of T(P), which
is exact because every quantity depends on the sequences only through
their joint type.  Scores within ``TIE_TOL`` of the transmitted score count
as errors.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import gammaln

from ..prob_core import ChannelSpec, ResourceError
from .config import codebook_size, type_counts

TIE_TOL = 1e-9
DEFAULT_EXACT_CAP = 14
_MAX_TABLES = 2_000_000


def _compositions(m: int, r: int) -> np.ndarray:
    """All length-r nonnegative integer vectors summing to m."""
    out = [c for c in itertools.product(range(m + 1), repeat=r - 1) if sum(c) <= m]
    return np.array([c + (m - sum(c),) for c in out], dtype=np.int64).reshape(-1, r)


def _splits(pin: np.ndarray, r: int) -> np.ndarray:
    """Every table (N, *pin.shape, r) whose last-axis sums equal ``pin``."""
    flat = pin.ravel()
    comps = [_compositions(int(c), r) for c in flat]
    total = math.prod(len(c) for c in comps)
    if total > _MAX_TABLES:
        raise ResourceError(f"{total} conditional types exceed the enumeration cap")
    idx = np.indices([len(c) for c in comps]).reshape(len(comps), -1)
    tabs = np.stack([comps[k][idx[k]] for k in range(len(comps))], axis=1)
    return tabs.reshape((-1,) + pin.shape + (r,))


def _ln_multinomial(rows: np.ndarray, axis: int = -1) -> np.ndarray:
    return gammaln(rows.sum(axis=axis) + 1.0) - gammaln(rows + 1.0).sum(axis=axis)


def _check(n: int, max_n: int):
    if n > max_n:
        raise ResourceError(f"blocklength {n} exceeds the exact-enumeration cap {max_n}; "
                            "use simulate() or raise max_n")


def _one_minus_pow(a: np.ndarray | float, m: int):
    """1 - (1 - a)^m without cancellation."""
    a = np.clip(a, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return -np.expm1(m * np.log1p(-a))


class _Transmitted:
    """Joint types t of (x1, x2, y) for a fixed (x1, x2) in T(P), with probabilities."""

    def __init__(self, counts: np.ndarray, channel: ChannelSpec):
        self.counts = counts
        k1, k2, ky = channel.W.shape
        if counts.shape != (k1, k2):
            raise ValueError("input type does not match the channel alphabets")
        self.q = np.asarray(channel.q, dtype=float)
        T = _splits(counts, ky)
        with np.errstate(divide="ignore"):
            lw = np.log(channel.W)
        loglik = np.where(T > 0, T * np.where(T > 0, lw, 0.0), 0.0)
        impossible = np.any((T > 0) & (channel.W <= 0), axis=(1, 2, 3))
        ln_pr = _ln_multinomial(T).sum(axis=(1, 2)) + loglik.sum(axis=(1, 2, 3))
        keep = ~impossible
        self.T = T[keep]
        self.prob = np.exp(ln_pr[keep])
        self.score = (self.T * self.q).sum(axis=(1, 2, 3))


class _Competitors:
    """x2' uniform over T(P | x1): law of its joint type with (x1, y), per (x1, y) type."""

    def __init__(self, counts: np.ndarray, q: np.ndarray):
        self.counts = counts
        self.q = q
        self.k2 = counts.shape[1]
        self.ln_class = float(_ln_multinomial(counts, axis=1).sum())
        self._cache: dict = {}

    def table(self, v: np.ndarray):
        """Scores sorted descending and cumulative probabilities for pin v = (x1, y) counts."""
        key = v.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        U = np.swapaxes(_splits(v, self.k2), 2, 3)  # (N, k1, k2, ky)
        ok = np.all(U.sum(axis=3) == self.counts, axis=(1, 2))
        U = U[ok]
        ln_size = _ln_multinomial(np.swapaxes(U, 2, 3)).sum(axis=(1, 2))
        prob = np.exp(ln_size - self.ln_class)
        score = (U * self.q).sum(axis=(1, 2, 3))
        order = np.argsort(-score, kind="stable")
        hit = (score[order], np.cumsum(prob[order]))
        self._cache[key] = hit
        return hit

    def beat_prob(self, v: np.ndarray, s: float) -> float:
        """Pr{score of (x1, x2', y) >= s - TIE_TOL} given the (x1, y) type v."""
        score, cum = self.table(v)
        k = int(np.searchsorted(-score, -(s - TIE_TOL), side="right"))
        return float(cum[k - 1]) if k else 0.0


def exact_pe2_sup(P, channel: ChannelSpec, R2: float, n: int, *,
                  max_n: int = DEFAULT_EXACT_CAP) -> float:
    """Ensemble-average probability that a same-cloud codeword x2(1, j), j != 1, scores at least the transmitted one."""
    _check(n, max_n)
    counts = type_counts(P, n)
    M2 = codebook_size(n, R2)
    if M2 <= 1:
        return 0.0
    tx = _Transmitted(counts, channel)
    comp = _Competitors(counts, tx.q)
    a = np.array([comp.beat_prob(t.sum(axis=1), s) for t, s in zip(tx.T, tx.score)])
    return float(np.sum(tx.prob * _one_minus_pow(a, M2 - 1)))


def exact_pe1_sup(P, channel: ChannelSpec, R1: float, R2: float, n: int, *,
                  max_n: int = DEFAULT_EXACT_CAP) -> float:
    """Ensemble-average probability that some (x1(i), x2(i, j)), i != 1, scores at least the transmitted pair.

    Given y, the M1 - 1 competing clouds are independent; within a cloud the
    cloud center's joint type with y is enumerated and the M2 satellites are
    conditionally independent.
    """
    _check(n, max_n)
    counts = type_counts(P, n)
    M1, M2 = codebook_size(n, R1), codebook_size(n, R2)
    if M1 <= 1:
        return 0.0
    tx = _Transmitted(counts, channel)
    comp = _Competitors(counts, tx.q)
    p1 = counts.sum(axis=1)
    k1 = len(p1)
    ln_T1 = float(_ln_multinomial(p1))
    centers: dict = {}
    total = 0.0
    for t, s, pr in zip(tx.T, tx.score, tx.prob):
        ty = t.sum(axis=(0, 1))
        key = ty.tobytes()
        if key not in centers:
            V = np.swapaxes(_splits(ty, k1), 1, 2)  # (N, k1, ky)
            V = V[np.all(V.sum(axis=2) == p1, axis=1)]
            pv = np.exp(_ln_multinomial(np.swapaxes(V, 1, 2)).sum(axis=1) - ln_T1)
            centers[key] = (V, pv)
        V, pv = centers[key]
        b = np.array([comp.beat_prob(v, s) for v in V])
        p_cloud = float(np.sum(pv * _one_minus_pow(b, M2)))
        total += pr * float(_one_minus_pow(p_cloud, M1 - 1))
    return float(total)


def exact_bin_fail(P, gamma: float, n: int) -> float:
    """Probability that no member of a bin of ceil(2^(n gamma)) codewords is jointly typical with x1."""
    counts = type_counts(P, n)
    ln_ratio = float(_ln_multinomial(counts, axis=1).sum() - _ln_multinomial(counts.sum(axis=0)))
    ratio = min(math.exp(ln_ratio), 1.0)
    with np.errstate(divide="ignore"):
        return float(np.exp(codebook_size(n, gamma) * np.log1p(-ratio)))
