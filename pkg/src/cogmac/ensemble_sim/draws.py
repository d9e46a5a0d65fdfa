"""Uniform draws from type classes and conditional type classes."""
from __future__ import annotations

import numpy as np

from ..prob_core import TypeCount


def _counts(composition) -> np.ndarray:
    c = composition.counts if isinstance(composition, TypeCount) else composition
    c = np.asarray(c, dtype=np.int64)
    if np.any(c < 0):
        raise ValueError("negative counts")
    return c


def draw_from_type(composition, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """A sequence uniform over the type class of a 1-D composition.

    Every arrangement of the multiset is equally likely.  With ``size``,
    returns that many independent rows.
    """
    c = _counts(composition)
    if c.ndim != 1:
        raise ValueError("composition must be one-dimensional")
    if c.sum() == 0:
        raise ValueError("empty type class")
    base = np.repeat(np.arange(len(c)), c)
    if size is None:
        return rng.permutation(base)
    return rng.permuted(np.tile(base, (size, 1)), axis=1)


def draw_conditional(x, joint, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Sequences z uniform over {z : joint type of (x, z) equals ``joint``}.

    ``joint`` holds counts indexed [x symbol, z symbol].  Positions holding
    symbol a receive a uniform arrangement of the multiset joint[a, :].
    ``x`` may be a stack of sequences of shape (m, n); the result then has
    shape (m, size, n), or (m, n) without ``size``.
    """
    x = np.asarray(x)
    c = _counts(joint)
    if c.ndim != 2:
        raise ValueError("joint composition must be two-dimensional")
    X = np.atleast_2d(x)
    m, n = X.shape
    occ = (X[:, :, None] == np.arange(c.shape[0])).sum(axis=1)
    if X.size and (X.min() < 0 or X.max() >= c.shape[0]) or not np.all(occ == c.sum(axis=1)):
        raise ValueError("empty conditional type class: x does not have the pinned marginal")
    rows = 1 if size is None else size
    blocks = [rng.permuted(np.tile(np.repeat(np.arange(c.shape[1]), c[a]), (m * rows, 1)), axis=1)
              for a in range(c.shape[0])]
    vals = np.concatenate(blocks, axis=1).reshape(m, rows, n)
    order = np.broadcast_to(np.argsort(X, axis=1, kind="stable")[:, None, :], (m, rows, n))
    out = np.empty((m, rows, n), dtype=np.int64)
    np.put_along_axis(out, order, vals, axis=2)
    if size is None:
        out = out[:, 0]
    return out[0] if x.ndim == 1 else out
