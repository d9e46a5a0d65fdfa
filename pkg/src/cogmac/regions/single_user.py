"""Lower bounds on the single-user mismatch capacity via induced two-user channels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..prob_core import InputDist
from .channels import induced_mac
from .curves import region_bin, region_lm
from .primitives import RatePrimitives, RegionOptions


@dataclass(frozen=True)
class SingleUserBound:
    value: float
    sup_sum: float        # R2' + R1''(R2'), user 2 cognitive
    reversed_sum: float   # r1 + r2(r1), user 1 cognitive
    bin_star_sum: float   # sum rate of the binning region; never above ``value``
    issues: list = field(default_factory=list)


def single_user_bound(W_su, q_su, phi, p12, opts: RegionOptions | None = None,
                      n_grid: int = 21) -> SingleUserBound:
    """Superposition sum-rate of the induced cognitive MAC at input ``p12``."""
    opts = opts or RegionOptions()
    ch = induced_mac(W_su, q_su, phi)
    inp = p12 if isinstance(p12, InputDist) else InputDist(p12)
    pr = RatePrimitives(ch.joint(inp), ch.q, opts)
    r2p = pr.R2p()
    sup_sum = r2p + pr.R1pp(r2p)
    r1 = pr.r1()
    rev_sum = r1 + pr.r2(r1)
    b = region_bin(pr.P, ch.q, np.linspace(0.0, pr.R1p(), n_grid), opts, prims=pr)
    return SingleUserBound(max(sup_sum, rev_sum), sup_sum, rev_sum, b.max_sum_rate(),
                           list(pr.issues))


def lapidoth_su_bound(W_su, q_su, phi, P1, P2, opts: RegionOptions | None = None,
                      n_grid: int = 21) -> tuple[float, dict]:
    """Max sum-rate of the non-cognitive region with product-coupled minimizations.

    The sum-rate is maximized on an R1 grid, then once more on a finer grid
    between the neighbours of the best grid point.
    """
    opts = opts or RegionOptions()
    ch = induced_mac(W_su, q_su, phi)
    P = ch.joint(InputDist.product(P1, P2))
    pr = RatePrimitives(P, ch.q, opts)
    top = pr.lm1(True)
    grid = np.linspace(0.0, top, n_grid)
    c = region_lm(P1, P2, ch, grid, opts, product_coupling=True, prims=pr)
    if not len(c.R1):
        return 0.0, {"curve": c, "issues": list(pr.issues)}
    i = int(np.argmax(c.R1 + c.R2))
    lo, hi = c.R1[max(i - 1, 0)], c.R1[min(i + 1, len(c.R1) - 1)]
    fine = region_lm(P1, P2, ch, np.linspace(lo, hi, 11), opts, product_coupling=True, prims=pr)
    best = max(c.max_sum_rate(), fine.max_sum_rate())
    return float(best), {"curve": c, "issues": list(pr.issues)}
