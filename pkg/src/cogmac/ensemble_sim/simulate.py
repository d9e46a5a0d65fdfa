"""Monte Carlo simulation of the superposition and binning ensembles."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from ..prob_core import ChannelSpec, ResourceError
from .config import EnsembleConfig
from .draws import draw_conditional, draw_from_type
from .exact import TIE_TOL

DEFAULT_BUDGET = 5e9
MAX_TRIAL_CELLS = 5e7
MIN_COUNT_FOR_EXPONENT = 20
COUNTS = ("err1", "err2", "encode_fail", "pe1_event", "pe2_event")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("COGMAC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimReport:
    """Exact tallies over ``trials`` independent codebook draws.

    ``err1``: a pair with a wrong user-1 message scores at least the
    transmitted pair.  ``err2``: not err1, but a wrong user-2 message with the
    right user-1 message does.  ``encode_fail``: the binning encoder found no
    jointly typical bin member (decoding is skipped).  The two ``*_event``
    tallies count the competitor events separately, without the err1
    precedence, for comparison with the exact oracles.
    """
    config: dict
    trials: int
    err1: int = 0
    err2: int = 0
    encode_fail: int = 0
    pe1_event: int = 0
    pe2_event: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for k in COUNTS:
            if not 0 <= getattr(self, k) <= self.trials:
                raise ValueError(f"{k} count outside [0, trials]")

    @property
    def errors(self) -> int:
        return self.err1 + self.err2 + self.encode_fail

    def rate(self, name: str) -> float:
        k = self.errors if name == "errors" else getattr(self, name)
        return k / self.trials if self.trials else float("nan")

    def interval(self, name: str, level: float = 0.95) -> tuple[float, float]:
        """Wilson score interval of the event frequency."""
        k = self.errors if name == "errors" else getattr(self, name)
        ci = binomtest(k, self.trials).proportion_ci(level, method="wilson")
        return float(ci.low), float(ci.high)

    def exponent(self, name: str) -> float | None:
        """-(1/n) log2 of the frequency; None below 20 observed events."""
        k = self.errors if name == "errors" else getattr(self, name)
        if k < MIN_COUNT_FOR_EXPONENT:
            return None
        return float(-np.log2(k / self.trials) / self.config["n"])

    def as_dict(self) -> dict:
        out = {"config": self.config, "trials": self.trials}
        for k in COUNTS + ("errors",):
            lo, hi = self.interval(k) if self.trials else (0.0, 1.0)
            out[k] = {"count": self.errors if k == "errors" else getattr(self, k),
                      "rate": self.rate(k), "wilson95": [lo, hi], "exponent": self.exponent(k)}
        return out


def _transmit(x1: np.ndarray, x2: np.ndarray, W: np.ndarray, rng) -> np.ndarray:
    cdf = np.cumsum(W[x1, x2], axis=-1)
    u = rng.random(len(x1))
    return np.minimum((u[:, None] >= cdf).sum(axis=1), W.shape[2] - 1)


def _events(S: np.ndarray) -> tuple[bool, bool]:
    """Competitor events for a score table S[i, j] with the transmitted pair at (0, 0)."""
    thr = S[0, 0] - TIE_TOL
    pe1 = bool(np.any(S[1:] >= thr))
    pe2 = bool(np.any(S[0, 1:] >= thr))
    return pe1, pe2


def _scores(q, x1, x2, y) -> np.ndarray:
    return q[x1[:, None, :], x2, y[None, None, :]].sum(axis=-1)


def _trial_sup(cfg: EnsembleConfig, ch: ChannelSpec, t: int):
    rng = np.random.default_rng([cfg.seed, t])
    counts = cfg.counts
    x1 = draw_from_type(counts.sum(axis=1), rng, size=cfg.M1)
    x2 = draw_conditional(x1, counts, rng, size=cfg.M2)
    y = _transmit(x1[0], x2[0, 0], ch.W, rng)
    return (False,) + _events(_scores(ch.q, x1, x2, y))


def _trial_bin(cfg: EnsembleConfig, ch: ChannelSpec, t: int):
    rng = np.random.default_rng([cfg.seed, t])
    counts = cfg.counts
    k1, k2 = counts.shape
    M1, M2, K = cfg.M1, cfg.M2, cfg.K
    x1 = draw_from_type(counts.sum(axis=1), rng, size=M1)
    bins = draw_from_type(counts.sum(axis=0), rng, size=M2 * K)
    # joint-type counts of every (x1(i), bin member) pair as indicator products
    typical = np.ones((M1, M2 * K), dtype=bool)
    for a in range(k1):
        A = (x1 == a).astype(np.float64)
        for b in range(k2):
            typical &= A @ (bins == b).T.astype(np.float64) == counts[a, b]
    typical = typical.reshape(M1, M2, K)
    found = typical.any(axis=2)
    if not found[0, 0]:
        return True, False, False
    first = np.argmax(typical, axis=2)  # lowest jointly typical index per (i, j)
    x2 = bins.reshape(M2, K, -1)[np.arange(M2)[None, :], first]
    y = _transmit(x1[0], x2[0, 0], ch.W, rng)
    S = np.where(found, _scores(ch.q, x1, x2, y), -np.inf)
    return (False,) + _events(S)


def _run_chunk(cfg, ch, ts):
    step = _trial_sup if cfg.scheme == "superposition" else _trial_bin
    tally = dict.fromkeys(COUNTS, 0)
    for t in ts:
        fail, pe1, pe2 = step(cfg, ch, t)
        tally["encode_fail"] += fail
        tally["pe1_event"] += pe1
        tally["pe2_event"] += pe2
        tally["err1"] += pe1
        tally["err2"] += pe2 and not pe1
    return tally


def simulate(cfg: EnsembleConfig, channel: ChannelSpec, trials: int, *,
             budget: float = DEFAULT_BUDGET, workers: int | None = None) -> SimReport:
    """Draw ``trials`` codebooks, send messages (1, 1) and decode by maximum total metric.

    Trial t uses the generator seeded by (cfg.seed, t), so the report does not
    depend on ``workers``.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if channel.W.shape[:2] != cfg.counts.shape:
        raise ValueError("input type does not match the channel alphabets")
    cells = cfg.M1 * cfg.M2 * cfg.n
    if cells > MAX_TRIAL_CELLS or cfg.M1 * cfg.M2 * cfg.K > MAX_TRIAL_CELLS:
        raise ResourceError(f"one trial needs more than {MAX_TRIAL_CELLS:.0e} codeword cells; "
                            "lower n, the rates or gamma")
    if trials * cells > budget:
        raise ResourceError(f"{trials} trials need {trials * cells:.3g} symbol comparisons "
                            f"(budget {budget:.3g}); lower trials, n or the rates")
    workers = workers or default_workers()
    chunks = [range(i, trials, workers) for i in range(workers)]
    if workers == 1:
        parts = [_run_chunk(cfg, channel, chunks[0])]
    else:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda ts: _run_chunk(cfg, channel, ts), chunks))
    total = {k: sum(p[k] for p in parts) for k in COUNTS}
    return SimReport(cfg.as_dict(), trials, **total)
