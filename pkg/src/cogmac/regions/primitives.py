"""Rate functions of a fixed joint pmf, each a minimization over a constraint set.

Every value is memoized per (function, rates) so region sweeps and bisections
never repeat a solve.  Solver statuses other than ``converged`` are collected
in ``issues`` rather than raised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dist_opt import FeasibleSet, MinimizeOptions, Objective, minimize
from ..dist_opt.solver import CONVERGED, INFEASIBLE
from ..prob_core import JointPmf, mutual_info


@dataclass(frozen=True)
class RegionOptions:
    """Solver settings for region computations.

    Every inner problem is convex, so two starts (reference and
    max-entropy member) are the default rather than the general 16.
    """
    starts: int = 2
    max_iter: int = 10000
    tol: float = 1e-9
    seed: int = 0
    bisect_tol: float = 1e-4

    @property
    def minimize_options(self) -> MinimizeOptions:
        return MinimizeOptions(self.starts, self.max_iter, self.tol, self.seed)


class RatePrimitives:
    """R1', R2', R1''(R2), R2''(R1), r1, r2(R1) and the sum-rate bounds at one P."""

    def __init__(self, P: JointPmf, q, opts: RegionOptions | None = None):
        self.P = P
        self.q = np.asarray(q, dtype=float)
        self.opts = opts or RegionOptions()
        self._cache: dict = {}
        self.issues: list = []
        self.solves = 0

    def _solve(self, obj_kind: str, set_kind: str, rates=(0.0, 0.0), set_rates=(0.0, 0.0),
               product: bool = False) -> float:
        key = (obj_kind, set_kind, float(rates[0]), float(rates[1]),
               float(set_rates[0]), float(set_rates[1]), product)
        if key in self._cache:
            return self._cache[key]
        S = FeasibleSet(set_kind, self.P, self.q, rates=set_rates, product_coupling=product)
        r = minimize(Objective(obj_kind, rates), S, self.opts.minimize_options)
        self.solves += 1
        if r.status == INFEASIBLE:
            val = math.inf
        else:
            val = r.value
            if r.status != CONVERGED:
                self.issues.append({"objective": obj_kind, "set": set_kind,
                                    "rates": list(key[2:6]), "status": r.status})
        self._cache[key] = val
        return val

    # single-rate constraints
    def R1p(self) -> float:
        return self._solve("MI_X1_YX2", "L1")

    def R2p(self) -> float:
        return self._solve("CMI_X2_Y_given_X1", "L2")

    def R1pp(self, R2: float) -> float:
        return self._solve("R1pp", "L0", rates=(0.0, R2))

    def R2pp(self, R1: float) -> float:
        return self._solve("R2pp", "L0", rates=(R1, 0.0))

    def r1(self) -> float:
        return self._solve("CMI_X1_Y_given_X2", "L1")

    def r2(self, R1: float) -> float:
        return self._solve("r2", "L0", rates=(R1, 0.0))

    # sum-rate bounds with rate-dependent sets (+inf when the set is empty)
    def psi(self, R1: float) -> float:
        return self._solve("MI_X12_Y", "L0sup", set_rates=(R1, 0.0))

    def phi(self, R1: float, R2: float) -> float:
        return self._solve("MI_X12_Y", "L0bin", set_rates=(R1, R2))

    # non-cognitive MAC constraints; ``product`` restricts to f12 = f1 f2
    def lm1(self, product: bool = False) -> float:
        return self._solve("MI_X1_given_X2_and_X12", "D1", product=product)

    def lm2(self, product: bool = False) -> float:
        return self._solve("MI_X2_given_X1_and_X12", "D2", product=product)

    def lm0(self, R1: float, R2: float, product: bool = False) -> float:
        return self._solve("MI_X12_Y_plus_X12", "D0", set_rates=(R1, R2), product=product)

    # plain information quantities of P
    def info(self, a, b, c=()) -> float:
        return mutual_info(self.P, a, b, c)


def rate_primitives(P: JointPmf, q, R1: float = 0.0, R2: float = 0.0,
                    opts: RegionOptions | None = None) -> dict:
    """All single-point rate functions at ``P`` as a dict of floats."""
    pr = RatePrimitives(P, q, opts)
    return {"R1p": pr.R1p(), "R2p": pr.R2p(), "R1pp": pr.R1pp(R2), "R2pp": pr.R2pp(R1),
            "r1": pr.r1(), "r2": pr.r2(R1), "issues": list(pr.issues)}
