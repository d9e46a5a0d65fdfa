"""Constraint sets of joint pmfs and their linear structure.

A set is described by pinned marginals (equalities), one metric-expectation
inequality ``E_f q >= threshold`` and, for a few kinds, nonlinear rate
constraints ``expr(f) <= bound``.  ``NestedSet`` couples an outer pmf
``P' in K(P)`` with an inner pmf taken from a set anchored at ``P'``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space

from ..prob_core import InputDist, JointPmf, mutual_info
from .objectives import Info, Node, evaluate_one

X1, X2, Y = 0, 1, 2

_PINS = {
    "K": ((X1, X2),),
    "Gq": ((X1, X2),),
    "L0": ((X1, X2), (Y,)),
    "L1": ((X1, X2), (X2, Y)),
    "L2": ((X1, X2), (X1, Y)),
    "L0sup": ((X1, X2), (Y,)),
    "L0bin": ((X1, X2), (Y,)),
    "D1": ((X1,), (X2, Y)),
    "D2": ((X2,), (X1, Y)),
    "D0": ((X1,), (X2,), (Y,)),
}
KINDS = tuple(_PINS)
INNER_KINDS = ("K", "Gq", "L0", "L1", "L2")

EQ_TOL = 1e-12
INEQ_TOL = 1e-9


def marginal(f: np.ndarray, group) -> np.ndarray:
    drop = tuple(a for a in range(3) if a not in group)
    return f.sum(axis=drop, keepdims=True) if drop else f


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """Set of pmfs anchored at ``reference``.

    ``threshold`` overrides the metric bound (default: the reference's
    expected metric).  ``product_coupling`` additionally pins the input
    marginal to ``P1 x P2`` (used by the single-user variant of the
    mismatched-MAC region; requires a product reference).
    """
    kind: str
    reference: JointPmf
    metric: np.ndarray
    rates: tuple = (0.0, 0.0)
    threshold: float | None = None
    product_coupling: bool = False

    def __post_init__(self):
        if self.kind not in _PINS:
            raise ValueError(f"unknown set kind {self.kind!r}")
        q = np.array(self.metric, dtype=float)
        if q.shape != self.reference.p.shape:
            raise ValueError("metric shape must match the reference table")
        if not np.all(np.isfinite(q)):
            raise ValueError("metric must be finite")
        q.setflags(write=False)
        object.__setattr__(self, "metric", q)
        r = tuple(float(x) for x in self.rates)
        if len(r) != 2 or min(r) < 0:
            raise ValueError("rates must be a nonnegative pair")
        object.__setattr__(self, "rates", r)
        if self.product_coupling:
            p12 = self.reference.p12
            if np.max(np.abs(p12 - np.outer(self.reference.p1, self.reference.p2))) > 1e-12:
                raise ValueError("product coupling needs a product-form reference")

    @property
    def input_dist(self) -> InputDist:
        return InputDist(self.reference.p12)

    @property
    def pins(self) -> tuple:
        p = _PINS[self.kind]
        if self.product_coupling and (X1, X2) not in p:
            p = ((X1, X2),) + p
        return p

    @property
    def has_metric(self) -> bool:
        return self.kind != "K"

    @property
    def bound(self) -> float:
        if self.threshold is not None:
            return float(self.threshold)
        return float(np.sum(self.reference.p * self.metric))

    def targets(self) -> list[np.ndarray]:
        return [marginal(self.reference.p, g) for g in self.pins]

    def nonlinear(self) -> list[tuple[Node, float]]:
        """Constraints ``expr(f) <= bound`` beyond the linear structure."""
        R1, R2 = self.rates
        if self.kind == "L0sup":
            return [(Info((X1,), (Y,)), R1)]
        if self.kind == "L0bin":
            i12 = mutual_info(self.reference.p, (X1,), (X2,))
            return [(Info((X1,), (Y,)), R1), (Info((X2,), (Y,)), R2 + i12)]
        if self.kind == "D0":
            return [(Info((X1,), (Y,)), R1), (Info((X2,), (Y,)), R2)]
        return []

    def allowed(self) -> np.ndarray:
        """Cells not forced to zero by a vanishing pinned marginal."""
        ok = np.ones(self.reference.p.shape, dtype=bool)
        for t in self.targets():
            ok &= np.broadcast_to(t > 0, ok.shape)
        return ok

    def contains(self, f, tol: float = INEQ_TOL) -> bool:
        f = f.p if isinstance(f, JointPmf) else np.asarray(f, dtype=float)
        if np.any(f < -tol) or abs(f.sum() - 1) > tol:
            return False
        for g, t in zip(self.pins, self.targets()):
            if np.max(np.abs(marginal(f, g) - t)) > tol:
                return False
        if self.has_metric and float(np.sum(f * self.metric)) < self.bound - tol:
            return False
        for expr, b in self.nonlinear():
            if _eval(expr, f) > b + tol:
                return False
        return True


def _eval(expr: Node, f: np.ndarray) -> float:
    return evaluate_one(expr, [f])


@dataclass(frozen=True, eq=False)
class NestedSet:
    """Pairs (P', P~) with P' in K(anchor), supp P' in supp anchor, P~ in S(P')."""
    anchor: JointPmf
    metric: np.ndarray
    inner_kind: str

    def __post_init__(self):
        if self.inner_kind not in INNER_KINDS:
            raise ValueError(f"inner set kind must be one of {INNER_KINDS}")
        q = np.array(self.metric, dtype=float)
        if q.shape != self.anchor.p.shape or not np.all(np.isfinite(q)):
            raise ValueError("metric must be finite and match the anchor shape")
        q.setflags(write=False)
        object.__setattr__(self, "metric", q)

    @property
    def tied(self) -> tuple | None:
        """Marginal of the inner pmf tied to the outer pmf (besides X1X2)."""
        return {"L0": (Y,), "L1": (X2, Y), "L2": (X1, Y)}.get(self.inner_kind)

    def inner_set(self, outer: JointPmf) -> FeasibleSet:
        return FeasibleSet(self.inner_kind, outer, self.metric)

    def contains(self, outer, inner, tol: float = INEQ_TOL) -> bool:
        po = outer.p if isinstance(outer, JointPmf) else np.asarray(outer)
        pi = inner.p if isinstance(inner, JointPmf) else np.asarray(inner)
        if np.any(po < -tol) or np.any((po > tol) & (self.anchor.p <= 0)):
            return False
        if np.max(np.abs(po.sum(axis=2) - self.anchor.p12)) > tol:
            return False
        return self.inner_set(JointPmf.renormalize(po)).contains(pi, tol)


# ----------------------------------------------------------------------------
# affine parameterization


class Affine(NamedTuple):
    """Feasible affine space ``v = v0 + basis @ z`` over stacked blocks.

    ``free`` marks cells that may be nonzero; ``G``, ``h`` hold linear
    inequality rows ``G v >= h``.
    """
    v0: np.ndarray
    basis: np.ndarray
    free: np.ndarray
    G: np.ndarray
    h: np.ndarray
    shape: tuple
    n_blocks: int
    A: np.ndarray
    b: np.ndarray

    def point(self, z: np.ndarray) -> np.ndarray:
        return self.v0 + self.basis @ z

    def coords(self, v: np.ndarray) -> np.ndarray:
        return self.basis.T @ (v - self.v0)

    def blocks(self, v: np.ndarray) -> list[np.ndarray]:
        m = int(np.prod(self.shape))
        return [v[i * m:(i + 1) * m].reshape(self.shape) for i in range(self.n_blocks)]


def _pin_rows(shape, group) -> np.ndarray:
    """Rows mapping a flattened table to its flattened marginal on ``group``."""
    m = int(np.prod(shape))
    eye = np.eye(m).reshape((m,) + tuple(shape))
    drop = tuple(1 + a for a in range(3) if a not in group)
    rows = eye.sum(axis=drop) if drop else eye
    return rows.reshape(m, -1).T


def _build(A_rows, b, free, G, h, v_ref, shape, n_blocks) -> Affine:
    A = np.vstack(A_rows) if A_rows else np.zeros((0, free.size))
    b = np.concatenate(b) if b else np.zeros(0)
    Af = A[:, free]
    basis = np.zeros((free.size, 0))
    if free.any():
        N = null_space(Af, rcond=1e-10) if Af.shape[0] else np.eye(int(free.sum()))
        basis = np.zeros((free.size, N.shape[1]))
        basis[free] = N
    v0 = np.where(free, v_ref, 0.0)
    return Affine(v0, basis, free, np.atleast_2d(G), np.atleast_1d(h), tuple(shape), n_blocks, A, b)


def affine_of(S) -> Affine:
    if isinstance(S, NestedSet):
        return _affine_nested(S)
    shape = S.reference.p.shape
    m = int(np.prod(shape))
    free = S.allowed().ravel()
    rows, rhs = [], []
    for g, t in zip(S.pins, S.targets()):
        rows.append(_pin_rows(shape, g))
        rhs.append(t.ravel())
    if S.has_metric:
        G, h = S.metric.ravel()[None, :], np.array([S.bound])
    else:
        G, h = np.zeros((0, m)), np.zeros(0)
    return _build(rows, rhs, free, G, h, S.reference.p.ravel(), shape, 1)


def _affine_nested(S: NestedSet) -> Affine:
    P = S.anchor.p
    shape = P.shape
    m = P.size
    sup = (P > 0).ravel()
    inner_ok = np.broadcast_to(P.sum(axis=2, keepdims=True) > 0, shape).ravel()
    free = np.concatenate([sup, inner_ok])
    R12 = _pin_rows(shape, (X1, X2))
    t12 = P.sum(axis=2).ravel()
    rows = [np.hstack([R12, np.zeros_like(R12)]), np.hstack([np.zeros_like(R12), R12])]
    rhs = [t12, t12]
    if S.tied is not None:
        Rt = _pin_rows(shape, S.tied)
        rows.append(np.hstack([-Rt, Rt]))
        rhs.append(np.zeros(Rt.shape[0]))
    if S.inner_kind == "K":
        G, h = np.zeros((0, 2 * m)), np.zeros(0)
    else:
        q = S.metric.ravel()
        G, h = np.concatenate([-q, q])[None, :], np.zeros(1)
    return _build(rows, rhs, free, G, h, np.concatenate([P.ravel(), P.ravel()]), shape, 2)


# ----------------------------------------------------------------------------
# projection


class Projection(NamedTuple):
    pmf: JointPmf
    feasible: bool


def _ipf(f: np.ndarray, pins, targets, iters: int = 2000, tol: float = 1e-15) -> tuple[np.ndarray, bool]:
    f = f.copy()
    for _ in range(iters):
        for g, t in zip(pins, targets):
            m = marginal(f, g)
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(m > 0, t / np.where(m > 0, m, 1.0), 0.0)
            f = f * r
        err = max(float(np.max(np.abs(marginal(f, g) - t))) for g, t in zip(pins, targets))
        if err <= tol:
            return f, True
    return f, err <= 1e-12


def match_marginals(f: np.ndarray, pins, targets, reference: np.ndarray) -> tuple[np.ndarray, bool]:
    """IPF onto the pinned marginals, mixing toward ``reference`` if stuck."""
    f = np.clip(np.asarray(f, dtype=float), 0.0, None)
    allowed = np.ones(f.shape, dtype=bool)
    for t in targets:
        allowed &= np.broadcast_to(t > 0, f.shape)
    f = np.where(allowed, f, 0.0)
    eps = 0.0
    while True:
        g = (1 - eps) * f + eps * reference
        if g.sum() > 0:
            out, ok = _ipf(g / g.sum(), pins, targets)
            if ok:
                return out, True
        if eps >= 1.0:
            return out, False
        eps = 1e-9 if eps == 0 else min(1.0, eps * 10)


def fix_metric(f: np.ndarray, q: np.ndarray, bound: float, toward: np.ndarray) -> tuple[np.ndarray, bool]:
    """Mix ``f`` toward ``toward`` just enough to reach ``E q >= bound``."""
    ef = float(np.sum(f * q))
    if ef >= bound - INEQ_TOL:
        return f, True
    et = float(np.sum(toward * q))
    if et < bound - INEQ_TOL:
        return f, False
    t = min(1.0, (bound - ef) / (et - ef) + 1e-12)
    return (1 - t) * f + t * toward, True


def project_to_set(f, S: FeasibleSet) -> Projection:
    """Restore membership: exact pinned marginals, then the metric inequality.

    Points already in ``S`` are returned unchanged.  Nonlinear rate
    constraints are only checked, not restored.
    """
    arr = f.p if isinstance(f, JointPmf) else np.asarray(f, dtype=float)
    if S.contains(arr, EQ_TOL):
        return Projection(f if isinstance(f, JointPmf) else JointPmf.renormalize(arr), True)
    ref = S.reference.p
    out, ok = match_marginals(arr, S.pins, S.targets(), ref)
    if ok and S.has_metric:
        out, ok = fix_metric(out, S.metric, S.bound, ref)
    pmf = JointPmf.renormalize(out)
    return Projection(pmf, ok and S.contains(pmf.p))


def project_nested(outer, inner, S: NestedSet) -> tuple[np.ndarray, np.ndarray, bool]:
    P = S.anchor.p
    o = np.where(P > 0, np.clip(np.asarray(outer, dtype=float), 0.0, None), 0.0)
    o, ok1 = match_marginals(o, ((X1, X2),), (marginal(P, (X1, X2)),), P)
    pins = [(X1, X2)] + ([S.tied] if S.tied else [])
    targets = [marginal(P, (X1, X2))] + ([marginal(o, S.tied)] if S.tied else [])
    i, ok2 = match_marginals(inner, pins, targets, o)
    ok3 = True
    if S.inner_kind != "K":
        i, ok3 = fix_metric(i, S.metric, float(np.sum(o * S.metric)), o)
    return o, i, ok1 and ok2 and ok3


def max_entropy_member(S: FeasibleSet) -> np.ndarray:
    """Maximum-entropy table with the pinned marginals, metric restored."""
    u = S.allowed().astype(float)
    out, ok = match_marginals(u / u.sum(), S.pins, S.targets(), S.reference.p)
    if S.has_metric:
        out, _ = fix_metric(out, S.metric, S.bound, S.reference.p)
    return out
