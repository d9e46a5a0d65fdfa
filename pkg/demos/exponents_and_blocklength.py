"""
Error exponents and what they mean at small blocklengths
=========================================================

One user (|X1| = 1) sends over a BSC(0.05) at rate 1/2 with a matched
decoder.  The exact ensemble error probability is computed by enumerating
joint types, and -(1/n) log2 of it is compared with the exponent E2.  The
polynomial prefactors are large at these n, so the slope comes down slowly.
"""
import math

import numpy as np

from cogmac.ensemble_sim import EnsembleConfig, exact_pe2_sup, simulate
from cogmac.exponents import exponent_E2
from cogmac.prob_core import ChannelSpec, InputDist, matched_metric

W = np.array([[[0.95, 0.05], [0.05, 0.95]]])
ch = ChannelSpec(W, matched_metric(W))
p12 = np.array([[0.5, 0.5]])
P = ch.joint(InputDist(p12))

E2 = exponent_E2(P, ch.q, 0.5).value
print(f"E2(P, 1/2) = {E2:.4f} bits")

for n in (6, 8, 10, 12, 14):
    pe = exact_pe2_sup(p12, ch, 0.5, n)
    print(f"n = {n:2d}  pe2 = {pe:.3e}  -(1/n) log2 pe2 = {-math.log2(pe) / n:.4f}")

# Monte Carlo on the same ensemble agrees with the exact number
cfg = EnsembleConfig("superposition", 10, 0.0, 0.5, p12, seed=1)
rep = simulate(cfg, ch, 4000)
lo, hi = rep.interval("pe2_event")
print(f"\nn = 10 simulated: {rep.rate('pe2_event'):.4f}  (95% interval {lo:.4f} .. {hi:.4f})")
print(f"n = 10 exact:     {exact_pe2_sup(p12, ch, 0.5, 10):.4f}")
