"""
Superposition vs binning on two parallel binary channels
=========================================================

User 1 sends over a noiseless bit pipe, user 2 over a BSC(0.1).  The decoder
scores a codeword pair by its total Hamming distance to the output, so a
wrong user-1 codeword can be compensated by a good user-2 match.  Binning
reaches the corner (1, 1 - h2(0.1)); superposition falls visibly short of it.
"""
import numpy as np

from cogmac.prob_core import InputDist
from cogmac.regions import (RatePrimitives, parallel_channel, rate_split_closure, region_bin,
                            region_lm, region_sup)

ch = parallel_channel(0.1)
P = ch.joint(InputDist(np.full((2, 2), 0.25)))
prims = RatePrimitives(P, ch.q)   # shared cache: every curve below reuses these solves

print("R1'  =", round(prims.R1p(), 5))
print("R2'  =", round(prims.R2p(), 5))

grid = np.linspace(0.0, 1.0, 11)
sup = region_sup(P, ch.q, grid, prims=prims)
binning = region_bin(P, ch.q, grid, prims=prims)
lm = region_lm([0.5, 0.5], [0.5, 0.5], ch, grid, prims=prims)

print("\n  R1    LM     sup    bin")
for r1 in grid:
    print(f"{r1:5.2f}  {lm.max_r2(r1):.4f} {sup.max_r2(r1):.4f} {binning.max_r2(r1):.4f}")

# rate splitting turns the binning corner into a whole sum-rate face
star = rate_split_closure(binning)
print("\nmax sum-rate: sup", round(sup.max_sum_rate(), 5), " bin*", round(star.max_sum_rate(), 5))
