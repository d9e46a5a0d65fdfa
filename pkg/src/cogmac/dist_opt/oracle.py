"""Brute-force grid minimization over a constraint set, for validating the solver.

The equality system is solved for a set of basic cells; the remaining cells
are gridded over ``[0, upper bound]`` with step ``1/resolution`` and every
grid point is feasibility-filtered before evaluation.  Every reported value
is attained at a feasible point, so it never undercuts the true minimum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import pinv, qr

from ..prob_core import JointPmf, ResourceError
from .objectives import Div, Node, Objective, evaluate, lin
from .sets import FeasibleSet, NestedSet, affine_of, marginal

_FEAS_TOL = 1e-12
_CHUNK = 200_000


@dataclass(frozen=True, eq=False)
class GridResult:
    value: float
    argmin: object
    error_bound: float
    status: str
    n_points: int
    dim: int


class _Grid:
    def __init__(self, S, max_dim: int):
        self.S = S
        aff = affine_of(S)
        self.aff = aff
        free = np.flatnonzero(aff.free)
        A = aff.A[:, free]
        _, R, piv = qr(A, pivoting=True, mode="economic")
        diag = np.abs(np.diag(R)) if R.size else np.zeros(0)
        rank = int(np.sum(diag > 1e-10 * max(1.0, diag.max(initial=0.0))))
        self.basic = free[piv[:rank]]
        self.coord = np.sort(free[piv[rank:]])
        self.dim = self.coord.size
        if self.dim > max_dim:
            raise ResourceError(f"free dimension {self.dim} exceeds the oracle cap {max_dim}")
        Ab = aff.A[:, self.basic]
        self.M = pinv(Ab)
        self.An = aff.A[:, self.coord]
        self.b = aff.b
        self.ub = self._upper_bounds()
        if isinstance(S, NestedSet):
            self.node_prefix = Div(0)
            self.anchor = S.anchor.p
            self.nonlin = []
        else:
            self.node_prefix = None
            self.anchor = None
            self.nonlin = S.nonlinear()

    def _upper_bounds(self) -> np.ndarray:
        S = self.S
        if isinstance(S, NestedSet):
            p12 = np.broadcast_to(marginal(S.anchor.p, (0, 1)), S.anchor.p.shape).ravel()
            ub = np.concatenate([p12, p12])
        else:
            ub = np.ones(S.reference.p.size)
            for t in S.targets():
                ub = np.minimum(ub, np.broadcast_to(t, S.reference.p.shape).ravel())
        return ub[self.coord]

    def points(self, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Full stacked tables for a batch of coordinates, and feasibility."""
        n = coords.shape[0]
        v = np.zeros((n, self.aff.v0.size))
        v[:, self.coord] = coords
        v[:, self.basic] = (self.b[None, :] - coords @ self.An.T) @ self.M.T
        ok = np.all(v >= -_FEAS_TOL, axis=1)
        ok &= np.all(coords <= self.ub + _FEAS_TOL, axis=1)
        v = np.clip(v, 0.0, None)
        if self.aff.G.shape[0]:
            ok &= np.all(v @ self.aff.G.T >= self.aff.h - _FEAS_TOL, axis=1)
        if self.nonlin and ok.any():
            blocks = self.blocks(v)
            for expr, bound in self.nonlin:
                ok &= evaluate(expr, blocks) <= bound + _FEAS_TOL
        return v, ok

    def blocks(self, v: np.ndarray) -> list[np.ndarray]:
        shape = self.aff.shape
        m = int(np.prod(shape))
        return [v[:, i * m:(i + 1) * m].reshape((-1,) + shape) for i in range(self.aff.n_blocks)]

    def objective(self, node: Node):
        if self.node_prefix is not None:
            node = lin((1.0, self.node_prefix), (1.0, node))
        return lambda v: evaluate(node, self.blocks(v), self.anchor)

    def reference_coords(self) -> np.ndarray:
        """Coordinates of the set's known member (the reference, or (P, P) when nested)."""
        S = self.S
        v = np.tile(S.anchor.p.ravel(), 2) if isinstance(S, NestedSet) else S.reference.p.ravel()
        return v[self.coord][None]

    def pack(self, v: np.ndarray):
        b = [JointPmf.renormalize(x[0]) for x in self.blocks(v[None])]
        return b[0] if len(b) == 1 else tuple(b)


def _axes(ub: np.ndarray, h: float) -> list[np.ndarray]:
    return [np.arange(int(math.floor(u / h + 1e-9)) + 1) * h for u in ub]


def _neighbors(d: int) -> np.ndarray:
    return np.array([s for s in itertools.product((-1, 0, 1), repeat=d) if any(s)], dtype=float)


def grid_oracle_many(objs, S, resolution: int = 200, *, budget: int = 10**7,
                     max_dim: int = 4, refine: bool = False,
                     refine_tol: float = 1e-7, max_refine: int = 400) -> list[GridResult]:
    """Grid minima of several objectives sharing one feasibility-filtered grid."""
    nodes = [o.expr if isinstance(o, Objective) else o for o in objs]
    g = _Grid(S, max_dim)
    h = 1.0 / resolution
    axes = _axes(g.ub, h)
    sizes = [len(a) for a in axes]
    total = int(np.prod(sizes)) if sizes else 1
    if total > budget:
        raise ResourceError(f"grid has {total} points, budget is {budget}")
    fns = [g.objective(n) for n in nodes]
    best_val = [math.inf] * len(nodes)
    best_c = [None] * len(nodes)
    n_feas = 0
    # the known member is evaluated too: thin sets may contain no grid point
    for start in range(-1, total, _CHUNK):
        if start < 0:
            coords = g.reference_coords()
        elif sizes:
            idx = np.arange(start, min(total, start + _CHUNK))
            sub = np.unravel_index(idx, sizes)
            coords = np.stack([axes[k][sub[k]] for k in range(len(sizes))], axis=1)
        else:
            coords = np.zeros((1, 0))
        v, ok = g.points(coords)
        if not ok.any():
            continue
        coords, v = coords[ok], v[ok]
        n_feas += len(v)
        for k, fn in enumerate(fns):
            vals = fn(v)
            i = int(np.argmin(vals))
            if vals[i] < best_val[k]:
                best_val[k], best_c[k] = float(vals[i]), coords[i].copy()
    out = []
    nbr = _neighbors(g.dim) if g.dim else np.zeros((0, 0))
    for k, fn in enumerate(fns):
        if best_c[k] is None:
            out.append(GridResult(math.inf, None, math.inf, "infeasible", total, g.dim))
            continue
        c0, v0 = best_c[k], best_val[k]
        bound = _local_variation(g, fn, c0, v0, nbr, h)
        c, v = c0, v0
        if refine and g.dim:
            c, v = _pattern_search(g, fn, c0, v0, nbr, h, refine_tol, max_refine)
        pts, _ = g.points(c[None])
        out.append(GridResult(float(v), g.pack(pts[0]), float(bound), "ok", total, g.dim))
    return out


def grid_oracle(obj, S, resolution: int = 200, **kw) -> GridResult:
    """Exhaustive grid minimum of ``obj`` over ``S`` (or a nested set)."""
    return grid_oracle_many([obj], S, resolution, **kw)[0]


def _local_variation(g, fn, c, val, nbr, h) -> float:
    """Largest objective change to a feasible grid neighbour: the error estimate."""
    if not len(nbr):
        return 0.0
    v, ok = g.points(c[None, :] + h * nbr)
    if not ok.any():
        return math.inf
    return float(np.max(np.abs(fn(v[ok]) - val)))


def _pattern_search(g, fn, c, val, nbr, h, tol, max_iter):
    step = h
    for _ in range(max_iter):
        if step < tol:
            break
        cand = c[None, :] + step * nbr
        v, ok = g.points(cand)
        if ok.any():
            vals = fn(v[ok])
            i = int(np.argmin(vals))
            if vals[i] < val - 1e-15:
                c, val = cand[ok][i], float(vals[i])
                continue
        step /= 2
    return c, val
