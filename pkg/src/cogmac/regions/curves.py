"""Per-input rate regions traced as R1 sweeps with bisection on R2."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..prob_core import ChannelSpec, InputDist, JointPmf, mutual_info
from .primitives import RatePrimitives, RegionOptions

KINDS = ("sup", "sup_tilde", "bin", "bin_tilde", "bin_star", "lm", "matched", "hull")
_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class RegionCurve:
    """Boundary samples (R1, max R2) of a downward-closed rate region.

    ``meta`` carries the dropped R1 values (outside the region), solver
    issues and the solve count.
    """
    kind: str
    samples: np.ndarray
    anchor: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float).reshape(-1, 2)
        if len(s) > 1 and np.any(np.diff(s[:, 0]) <= 0):
            raise ValueError("R1 samples must be strictly increasing")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def R1(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def R2(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def degraded(self) -> bool:
        return bool(self.meta.get("issues"))

    def max_r2(self, R1: float) -> float:
        """Linear interpolation of the boundary; -inf outside the sampled span."""
        if not len(self.samples) or R1 < self.R1[0] - 1e-12 or R1 > self.R1[-1] + 1e-12:
            return -math.inf
        return float(np.interp(R1, self.R1, self.R2))

    def contains(self, R1: float, R2: float, tol: float = 0.0) -> bool:
        if not len(self.samples) or R1 < -tol or R2 < -tol or R1 > self.R1[-1] + tol:
            return False
        r1 = min(max(R1, self.R1[0]), self.R1[-1])
        return R2 <= float(np.interp(r1, self.R1, self.R2)) + tol

    def max_sum_rate(self) -> float:
        if not len(self.samples):
            return -math.inf
        return float(np.max(self.R1 + self.R2))


def _largest(pred: Callable[[float], bool], lo: float, hi: float, tol: float) -> float | None:
    """Largest x in [lo, hi] (to ``tol``) with pred(x), pred monotone true-then-false."""
    if pred(hi):
        return hi
    if not pred(lo):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _grid(R1_grid) -> np.ndarray:
    g = np.unique(np.asarray(R1_grid, dtype=float))
    if np.any(g < 0):
        raise ValueError("rates must be nonnegative")
    return g


def _finish(kind, pts, dropped, pr: RatePrimitives | None, anchor, extra=None) -> RegionCurve:
    meta = {"dropped": dropped, "issues": list(pr.issues) if pr else [],
            "solves": pr.solves if pr else 0}
    if extra:
        meta.update(extra)
    return RegionCurve(kind, np.array(pts, dtype=float).reshape(-1, 2), anchor, meta)


def _prims(P, q, opts, prims):
    return prims if prims is not None else RatePrimitives(P, q, opts)


def _sup_r2(pr: RatePrimitives, R1: float, tol: float) -> float | None:
    """Largest R2 <= R2' with R1 <= R1''(R2), or None."""
    return _largest(lambda r2: pr.R1pp(r2) >= R1 - _SLACK, 0.0, pr.R2p(), tol)


def region_sup(P: JointPmf, q, R1_grid, opts: RegionOptions | None = None,
               prims: RatePrimitives | None = None) -> RegionCurve:
    """{R2 <= R2'(P), R1 <= R1''(P, R2)}."""
    opts = opts or RegionOptions()
    pr = _prims(P, q, opts, prims)
    pts, dropped = [], []
    for R1 in _grid(R1_grid):
        r2 = _sup_r2(pr, R1, opts.bisect_tol)
        if r2 is None:
            dropped.append(float(R1))
        else:
            pts.append((R1, r2))
    return _finish("sup", pts, dropped, pr, P)


def region_sup_tilde(P: JointPmf, q, R1_grid, opts: RegionOptions | None = None,
                     prims: RatePrimitives | None = None) -> RegionCurve:
    """{R2 <= R2'(P), R1 + R2 <= min over L0sup(R1) of I(X1X2;Y)}."""
    opts = opts or RegionOptions()
    pr = _prims(P, q, opts, prims)
    pts, dropped = [], []
    for R1 in _grid(R1_grid):
        m = min(pr.R2p(), pr.psi(R1) - R1)
        if m < -_SLACK:
            dropped.append(float(R1))
        else:
            pts.append((R1, max(m, 0.0)))
    return _finish("sup_tilde", pts, dropped, pr, P)


def _bin_r2(pr: RatePrimitives, R1: float, tol: float) -> float | None:
    if R1 > pr.R1p() + _SLACK:
        return None
    r2p = pr.R2p()
    r2pp = pr.R2pp(R1)
    if r2pp >= r2p:
        return r2p
    a = _sup_r2(pr, R1, tol)
    best = max(r2pp, a if a is not None else -math.inf)
    if best < -_SLACK:
        return None
    return max(0.0, min(r2p, best))


def region_bin(P: JointPmf, q, R1_grid, opts: RegionOptions | None = None,
               prims: RatePrimitives | None = None) -> RegionCurve:
    """{R1 <= R1', R2 <= R2', (R1 <= R1''(R2) or R2 <= R2''(R1))}."""
    opts = opts or RegionOptions()
    pr = _prims(P, q, opts, prims)
    pts, dropped = [], []
    for R1 in _grid(R1_grid):
        r2 = _bin_r2(pr, R1, opts.bisect_tol)
        if r2 is None:
            dropped.append(float(R1))
        else:
            pts.append((R1, r2))
    return _finish("bin", pts, dropped, pr, P)


def region_bin_tilde(P: JointPmf, q, R1_grid, opts: RegionOptions | None = None,
                     prims: RatePrimitives | None = None) -> RegionCurve:
    """{R1 <= R1', R2 <= R2', R1 + R2 <= min over L0bin(R1, R2) of I(X1X2;Y)}."""
    opts = opts or RegionOptions()
    pr = _prims(P, q, opts, prims)
    pts, dropped = [], []
    for R1 in _grid(R1_grid):
        r2 = None
        if R1 <= pr.R1p() + _SLACK:
            r2 = _largest(lambda r2: pr.phi(R1, r2) - R1 - r2 >= -_SLACK, 0.0, pr.R2p(),
                          opts.bisect_tol)
        if r2 is None:
            dropped.append(float(R1))
        else:
            pts.append((R1, r2))
    return _finish("bin_tilde", pts, dropped, pr, P)


def rate_split_closure(curve: RegionCurve, R1_grid=None, n_extra: int = 21) -> RegionCurve:
    """Close a region under moving rate from user 2 to user 1 (sum preserved).

    max R2*(R1) = max over sampled a <= R1 of B(a) - (R1 - a).
    """
    a, B = curve.R1, curve.R2
    if not len(a):
        return RegionCurve("bin_star", np.zeros((0, 2)), curve.anchor, dict(curve.meta))
    top = float(np.max(a + B))
    base = a if R1_grid is None else _grid(R1_grid)
    grid = np.unique(np.concatenate([base, np.linspace(0.0, top, n_extra), [top]]))
    grid = grid[grid <= top + 1e-15]
    pts = []
    for R1 in grid:
        ok = a <= R1 + 1e-15
        if not ok.any():
            continue
        v = float(np.max(B[ok] - (R1 - a[ok])))
        if v >= -_SLACK:
            pts.append((R1, max(v, 0.0)))
    meta = dict(curve.meta)
    meta["split_from"] = curve.kind
    return RegionCurve("bin_star", np.array(pts), curve.anchor, meta)


def region_bin_star(P: JointPmf, q, R1_grid, opts: RegionOptions | None = None,
                    prims: RatePrimitives | None = None, n_extra: int = 21) -> RegionCurve:
    """Rate-split closure of the binning region, reported on ``R1_grid``.

    The binning boundary is sampled on ``n_extra`` points of [0, R1'] besides
    the grid, so coarse grids do not miss its sum-rate face.
    """
    opts = opts or RegionOptions()
    pr = _prims(P, q, opts, prims)
    base = _grid(R1_grid)
    inner = np.unique(np.concatenate([base[base <= pr.R1p()], np.linspace(0.0, pr.R1p(), n_extra)]))
    return rate_split_closure(region_bin(P, q, inner, opts, pr), base, n_extra)


def region_lm(P1, P2, channel: ChannelSpec, R1_grid, opts: RegionOptions | None = None,
              product_coupling: bool = False, prims: RatePrimitives | None = None) -> RegionCurve:
    """Non-cognitive MAC region at the product input P1 x P2.

    ``product_coupling`` restricts every minimization to f12 = f1 f2.
    """
    opts = opts or RegionOptions()
    P = channel.joint(InputDist.product(P1, P2))
    pr = _prims(P, channel.q, opts, prims)
    pc = product_coupling
    r1max, r2max = pr.lm1(pc), pr.lm2(pc)
    pts, dropped = [], []
    for R1 in _grid(R1_grid):
        r2 = None
        if R1 <= r1max + _SLACK:
            r2 = _largest(lambda r2: pr.lm0(R1, r2, pc) - R1 - r2 >= -_SLACK, 0.0, r2max,
                          opts.bisect_tol)
        if r2 is None:
            dropped.append(float(R1))
        else:
            pts.append((R1, r2))
    return _finish("lm", pts, dropped, pr, P, {"R1_max": r1max, "R2_max": r2max})


def region_matched(P: JointPmf, R1_grid) -> RegionCurve:
    """{R2 <= I(X2;Y|X1), R1 + R2 <= I(X1X2;Y)}, evaluated in closed form."""
    i2 = mutual_info(P, (1,), (2,), (0,))
    i12 = mutual_info(P, (0, 1), (2,))
    pts, dropped = [], []
    for R1 in _grid(R1_grid):
        m = min(i2, i12 - R1)
        if m < -_SLACK:
            dropped.append(float(R1))
        else:
            pts.append((R1, max(m, 0.0)))
    return _finish("matched", pts, dropped, None, P)


REGION_FUNCS = {
    "sup": region_sup, "sup_tilde": region_sup_tilde, "bin": region_bin,
    "bin_tilde": region_bin_tilde, "bin_star": region_bin_star,
}
