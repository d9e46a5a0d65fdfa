"""Convex hull of per-input regions over a family or a random sample of inputs."""
from __future__ import annotations

import math

import numpy as np

from ..prob_core import ChannelSpec, InputDist
from .channels import random_input
from .curves import REGION_FUNCS, RegionCurve, region_lm, region_matched
from .primitives import RegionOptions


def upper_envelope(points) -> tuple[np.ndarray, np.ndarray]:
    """Upper concave envelope of a downward-closed point set.

    Axis projections of every point are added, so the envelope starts at the
    largest R2 and is nonincreasing.  Returns the vertices and, per vertex,
    the index of the input point that produced it.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(pts):
        return np.zeros((0, 2)), np.zeros(0, dtype=int)
    src = np.arange(len(pts))
    allp = np.concatenate([pts, np.c_[pts[:, 0], np.zeros(len(pts))],
                           np.c_[np.zeros(len(pts)), pts[:, 1]]])
    allsrc = np.concatenate([src, src, src])
    order = np.lexsort((-allp[:, 1], allp[:, 0]))
    allp, allsrc = allp[order], allsrc[order]
    keep = np.r_[True, np.diff(allp[:, 0]) > 0]
    allp, allsrc = allp[keep], allsrc[keep]
    hull: list[int] = []
    for i in range(len(allp)):
        while len(hull) >= 2:
            o, a = allp[hull[-2]], allp[hull[-1]]
            b = allp[i]
            if (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]) >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return allp[hull], allsrc[hull]


def _curve(kind: str, channel: ChannelSpec, inp: InputDist, grid, opts) -> RegionCurve:
    if kind == "lm":
        p12 = inp.p12
        return region_lm(p12.sum(axis=1), p12.sum(axis=0), channel, grid, opts)
    if kind == "matched":
        return region_matched(channel.joint(inp), grid)
    if kind not in REGION_FUNCS:
        raise ValueError(f"unknown region kind {kind!r}")
    return REGION_FUNCS[kind](channel.joint(inp), channel.q, grid, opts)


def _perturb(rng, inp: InputDist, product: bool, conc: float = 60.0) -> InputDist:
    p = inp.p12
    if product:
        a = rng.dirichlet(conc * p.sum(axis=1) + 0.05)
        b = rng.dirichlet(conc * p.sum(axis=0) + 0.05)
        return InputDist.product(a, b)
    return InputDist(rng.dirichlet(conc * p.ravel() + 0.05).reshape(p.shape))


def hull_over_inputs(kind: str, channel: ChannelSpec, family=None, *, n_anchors: int = 200,
                     seed: int = 0, R1_grid=None, n_grid: int = 11, refine_top: int = 4,
                     refine_draws: int = 4, opts: RegionOptions | None = None) -> RegionCurve:
    """Upper concave envelope of the union of per-input regions.

    ``family`` is a list of input distributions; when omitted, ``n_anchors``
    Dirichlet(1) inputs are drawn (product inputs for ``kind="lm"``).  The
    anchors best supporting the envelope in five weight directions are then
    perturbed ``refine_draws`` times each.
    """
    opts = opts or RegionOptions()
    k1, k2, _ = channel.W.shape
    product = kind == "lm"
    grid = np.linspace(0.0, math.log2(k1), n_grid) if R1_grid is None else R1_grid
    if family is None:
        family = [random_input(np.random.default_rng([seed, i]), k1, k2, product=product)
                  for i in range(n_anchors)]
    anchors = [f if isinstance(f, InputDist) else InputDist(f) for f in family]
    curves = [_curve(kind, channel, a, grid, opts) for a in anchors]
    origin = ["family"] * len(anchors)
    if refine_top > 0 and refine_draws > 0 and len(anchors) > 1:
        best = []
        for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
            score = [np.max(lam * c.R1 + (1 - lam) * c.R2) if len(c.R1) else -math.inf
                     for c in curves]
            for i in np.argsort(score)[::-1][:refine_top]:
                if i not in best:
                    best.append(int(i))
        rng = np.random.default_rng([seed, 10**6])
        for i in best:
            for _ in range(refine_draws):
                a = _perturb(rng, anchors[i], product)
                anchors.append(a)
                curves.append(_curve(kind, channel, a, grid, opts))
                origin.append(f"refine:{i}")
    pts, owner = [], []
    for i, c in enumerate(curves):
        pts.extend(c.samples.tolist())
        owner.extend([i] * len(c.samples))
    verts, src = upper_envelope(pts)
    issues = [dict(x, anchor=i) for i, c in enumerate(curves) for x in c.meta.get("issues", [])]
    meta = {"region": kind, "n_anchors": len(anchors), "vertex_anchor": [owner[s] for s in src],
            "anchor_origin": origin, "issues": issues, "dropped": []}
    return RegionCurve("hull", verts, [a.p12 for a in anchors], meta)
