"""Channel constructors: the binary parallel channel, induced MACs and random instances."""
from __future__ import annotations

import numpy as np

from ..prob_core import ChannelSpec, InputDist, matched_metric


def parallel_channel(p: float) -> ChannelSpec:
    """Y = (X1, X2 xor Z) with Z ~ Bern(p); output index is 2*y1 + y2.

    The metric counts mismatches on both components with weight -1/2.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("crossover probability must lie in [0, 1]")
    W = np.zeros((2, 2, 4))
    q = np.zeros((2, 2, 4))
    for x1 in range(2):
        for x2 in range(2):
            for y1 in range(2):
                for y2 in range(2):
                    y = 2 * y1 + y2
                    W[x1, x2, y] = float(y1 == x1) * (1 - p if y2 == x2 else p)
                    q[x1, x2, y] = -0.5 * ((x1 ^ y1) + (x2 ^ y2))
    return ChannelSpec(W, q)


def induced_mac(W_su, q_su, phi) -> ChannelSpec:
    """Cognitive MAC induced by a single-user channel through ``phi[x1, x2] -> x``."""
    W_su = np.asarray(W_su, dtype=float)
    q_su = np.asarray(q_su, dtype=float)
    phi = np.asarray(phi, dtype=int)
    if phi.ndim != 2:
        raise ValueError("phi must be a 2-d table [x1, x2] -> x")
    if phi.min() < 0 or phi.max() >= W_su.shape[0]:
        raise ValueError("phi maps outside the single-user input alphabet")
    return ChannelSpec(W_su[phi], q_su[phi])


def random_channel(rng: np.random.Generator, k1: int = 2, k2: int = 2, ky: int = 2,
                   matched: bool = False, alpha: float = 1.0) -> ChannelSpec:
    """Dirichlet channel rows; metric is log2 W when ``matched``, else Gaussian."""
    W = rng.dirichlet(alpha * np.ones(ky), size=(k1, k2))
    q = matched_metric(W) if matched else rng.normal(size=(k1, k2, ky))
    return ChannelSpec(W, q)


def random_input(rng: np.random.Generator, k1: int = 2, k2: int = 2,
                 product: bool = False, alpha: float = 1.0) -> InputDist:
    if product:
        return InputDist.product(rng.dirichlet(alpha * np.ones(k1)),
                                 rng.dirichlet(alpha * np.ones(k2)))
    return InputDist(rng.dirichlet(alpha * np.ones(k1 * k2)).reshape(k1, k2))
