"""Ensemble error exponents of superposition coding and random binning.

Every component is a nested minimization over an outer pmf P' with the
input marginal of P and an inner pmf anchored at P'.  Exponents are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist_opt import MinimizeOptions, NestedSet, Objective, OptResult, minimize_nested
from .prob_core import JointPmf, mutual_info

ZERO_TOL = 1e-7

_COMPONENTS = {
    "E2": ("E2_inner", "L2"),
    "E1_R1R2": ("E1sup_inner", "L0"),
    "E1_R1": ("E1bin_inner", "L1"),
    "E0b": ("E0b_inner", "L0"),
}


def _nested(name: str, P: JointPmf, q, R1: float, R2: float,
            opts: MinimizeOptions | None, warm=None) -> OptResult:
    if R1 < 0 or R2 < 0:
        raise ValueError("rates must be nonnegative")
    kind, inner = _COMPONENTS[name]
    return minimize_nested(Objective(kind, (R1, R2)), NestedSet(P, q, inner), opts, warm=warm)


def exponent_E2(P: JointPmf, q, R2: float, opts: MinimizeOptions | None = None,
                warm=None) -> OptResult:
    """Exponent of the probability that user 2's message alone is decoded wrongly."""
    return _nested("E2", P, q, 0.0, R2, opts, warm)


def exponent_E1_sup(P: JointPmf, q, R1: float, R2: float, opts: MinimizeOptions | None = None,
                    warm=None) -> OptResult:
    """Superposition exponent of the event that user 1's message is decoded wrongly."""
    return _nested("E1_R1R2", P, q, R1, R2, opts, warm)


def exponent_E1_bin(P: JointPmf, q, R1: float, opts: MinimizeOptions | None = None,
                    warm=None) -> OptResult:
    return _nested("E1_R1", P, q, R1, 0.0, opts, warm)


def exponent_E0b(P: JointPmf, q, R1: float, R2: float, opts: MinimizeOptions | None = None,
                 warm=None) -> OptResult:
    return _nested("E0b", P, q, R1, R2, opts, warm)


@dataclass(frozen=True)
class PsiTerms:
    psi1: float
    psi2: float


def psi_terms(Pt: JointPmf, R1: float, R2: float) -> PsiTerms:
    """Limit forms of the two binning error terms at a tilde pmf."""
    def pos(x):
        return max(0.0, x)
    i1y = mutual_info(Pt, (0,), (2,))
    i2y_1 = mutual_info(Pt, (1,), (2,), (0,))
    i2y = mutual_info(Pt, (1,), (2,))
    i12 = mutual_info(Pt, (0,), (1,))
    i1_y2 = mutual_info(Pt, (0,), (2, 1))
    return PsiTerms(pos(i1y + pos(i2y_1 - R2) - R1), pos(i2y - i12 + pos(i1_y2 - R1) - R2))


@dataclass(frozen=True, eq=False)
class ExponentResult:
    E2: float
    E1_R1R2: float
    E1_R1: float
    E0b: float
    E0: float
    E_sup: float
    E_bin: float
    rates: tuple
    anchor: JointPmf
    argmins: dict = field(default_factory=dict, repr=False)
    statuses: dict = field(default_factory=dict)

    @property
    def inside_sup(self) -> bool:
        return self.E_sup > ZERO_TOL

    @property
    def inside_bin(self) -> bool:
        return self.E_bin > ZERO_TOL

    @property
    def degraded(self) -> bool:
        return any(s != "converged" for s in self.statuses.values())

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("E2", "E1_R1R2", "E1_R1", "E0b", "E0", "E_sup", "E_bin")}


def scheme_exponents(P: JointPmf, q, R1: float, R2: float,
                     opts: MinimizeOptions | None = None, warm: dict | None = None) -> ExponentResult:
    """All component exponents and the two scheme exponents at (R1, R2).

    ``warm`` maps component names to argmin pairs from a nearby rate point.
    """
    warm = warm or {}
    res = {name: _nested(name, P, q, R1, R2, opts, warm.get(name)) for name in _COMPONENTS}
    v = {k: max(0.0, r.value) for k, r in res.items()}
    E0 = max(v["E1_R1R2"], v["E0b"])
    return ExponentResult(
        E2=v["E2"], E1_R1R2=v["E1_R1R2"], E1_R1=v["E1_R1"], E0b=v["E0b"], E0=E0,
        E_sup=min(v["E2"], v["E1_R1R2"]), E_bin=min(v["E2"], E0, v["E1_R1"]),
        rates=(float(R1), float(R2)), anchor=P,
        argmins={k: r.argmin for k, r in res.items()},
        statuses={k: r.status for k, r in res.items()})


def exponent_sweep(P: JointPmf, q, rate_points, opts: MinimizeOptions | None = None) -> list:
    """Scheme exponents along a path of rate pairs, warm-starting each point."""
    out, warm = [], None
    for R1, R2 in rate_points:
        r = scheme_exponents(P, q, R1, R2, opts, warm)
        warm = {k: tuple(np.asarray(x.p) for x in v) for k, v in r.argmins.items() if v is not None}
        out.append(r)
    return out
