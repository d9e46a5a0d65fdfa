"""Objective catalog: information functionals of one or two joint pmfs.

An objective is a small expression tree.  Leaves are mutual informations of
the last pmf block (the "tilde" distribution) and, for nested problems, the
divergence of block 0 from the anchor.  ``Pos`` nodes are the |.|^+ clamps of
the rate expressions.  Every tree can be evaluated on a batch of tables
(shape ``(N, k1, k2, ky)``) and differentiated at a single point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

_LN2 = math.log(2.0)
_TINY = 1e-300
# log floor for gradients only; unbounded slopes at empty cells stall SLSQP
_GRAD_FLOOR = 1e-12


@dataclass(frozen=True)
class Info:
    """I(A;B|C) of block ``block`` (default: last block)."""
    a: tuple
    b: tuple
    c: tuple = ()
    block: int = -1


@dataclass(frozen=True)
class Div:
    """D(block || anchor), the anchor being supplied at evaluation time."""
    block: int = 0


@dataclass(frozen=True)
class Affine:
    terms: tuple  # ((coef, node), ...)
    const: float = 0.0


@dataclass(frozen=True)
class Pos:
    arg: "Node"


Node = Union[Info, Div, Affine, Pos]

X1, X2, Y = 0, 1, 2


def lin(*terms, const: float = 0.0) -> Affine:
    return Affine(tuple(terms), float(const))


def _catalog(kind: str, R1: float, R2: float) -> Node:
    I = Info
    table = {
        "MI_X1_given_X2_and_X12": lin((1, I((X1,), (Y,), (X2,))), (1, I((X1,), (X2,)))),
        "MI_X2_given_X1_and_X12": lin((1, I((X2,), (Y,), (X1,))), (1, I((X1,), (X2,)))),
        "MI_X1_YX2": I((X1,), (Y, X2)),
        "CMI_X2_Y_given_X1": I((X2,), (Y,), (X1,)),
        "CMI_X1_Y_given_X2": I((X1,), (Y,), (X2,)),
        "MI_X1_Y": I((X1,), (Y,)),
        "MI_X2_Y": I((X2,), (Y,)),
        "MI_X12_Y": I((X1, X2), (Y,)),
        "MI_X12_Y_plus_X12": lin((1, I((X1, X2), (Y,))), (1, I((X1,), (X2,)))),
        # min over L0 gives R1''(P, R2)
        "R1pp": lin((1, I((X1,), (Y,))),
                    (1, Pos(lin((1, I((X2,), (Y,), (X1,))), const=-R2)))),
        # min over L0 gives R2''(P, R1)
        "R2pp": lin((1, I((X2,), (Y,))), (-1, I((X1,), (X2,))),
                    (1, Pos(lin((1, I((X1,), (Y, X2))), const=-R1)))),
        # min over L0 gives r2(P, R1), the reversed-roles superposition bound
        "r2": lin((1, I((X2,), (Y,))),
                  (1, Pos(lin((1, I((X1,), (Y,), (X2,))), const=-R1)))),
        # inner terms of the error exponents
        "E2_inner": Pos(lin((1, I((X2,), (Y,), (X1,))), const=-R2)),
        "E1sup_inner": Pos(lin((1, I((X1,), (Y,))),
                               (1, Pos(lin((1, I((X2,), (Y,), (X1,))), const=-R2))),
                               const=-R1)),
        "E1bin_inner": Pos(lin((1, I((X1,), (Y, X2))), const=-R1)),
        "E0b_inner": Pos(lin((1, I((X2,), (Y,))), (-1, I((X1,), (X2,))),
                             (1, Pos(lin((1, I((X1,), (Y, X2))), const=-R1))),
                             const=-R2)),
        "constant": lin(const=R1),
    }
    if kind not in table:
        raise KeyError(f"unknown objective kind {kind!r}")
    return table[kind]


CONVEX_ON_FIXED_MARGINALS = frozenset({
    "MI_X1_given_X2_and_X12", "MI_X2_given_X1_and_X12", "MI_X1_YX2",
    "CMI_X2_Y_given_X1", "CMI_X1_Y_given_X2", "MI_X1_Y", "MI_X2_Y", "MI_X12_Y",
    "MI_X12_Y_plus_X12", "R1pp", "R2pp", "r2", "E2_inner", "E1sup_inner",
    "E1bin_inner", "E0b_inner", "constant",
})


@dataclass(frozen=True)
class Objective:
    """Catalogued objective; ``rates`` = (R1, R2) where the form uses them.

    For ``kind="constant"`` the constant is ``rates[0]``.
    """
    kind: str
    rates: tuple = (0.0, 0.0)

    def __post_init__(self):
        r = tuple(float(x) for x in self.rates)
        if len(r) != 2:
            raise ValueError("rates must be a pair (R1, R2)")
        object.__setattr__(self, "rates", r)
        _catalog(self.kind, *r)

    @property
    def expr(self) -> Node:
        return _catalog(self.kind, *self.rates)


# ----------------------------------------------------------------------------
# batched evaluation


def _xlogx_sum(m: np.ndarray, axes) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(m > 0, m * np.log(np.where(m > 0, m, 1.0)), 0.0)
    return t.sum(axis=axes)


def _neg_entropy(f: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """sum m log m (nats) of the marginal of batched tables f on ``keep``."""
    if not keep:
        return np.zeros(f.shape[0])
    drop = tuple(1 + a for a in range(3) if a not in keep)
    m = f.sum(axis=drop) if drop else f
    return _xlogx_sum(m, tuple(range(1, m.ndim)))


def batch_info(f: np.ndarray, a, b, c=()) -> np.ndarray:
    A, B, C = set(a), set(b), set(c)
    val = (_neg_entropy(f, sorted(A | B | C)) + _neg_entropy(f, sorted(C))
           - _neg_entropy(f, sorted(A | C)) - _neg_entropy(f, sorted(B | C)))
    return np.maximum(val / _LN2, 0.0)


def batch_div(f: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    g = np.broadcast_to(anchor, f.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(f > 0, f * (np.log(np.where(f > 0, f, 1.0)) - np.log(np.where(g > 0, g, _TINY))), 0.0)
    bad = np.any((f > 0) & (g <= 0), axis=(1, 2, 3))
    out = np.maximum(t.sum(axis=(1, 2, 3)) / _LN2, 0.0)
    out[bad] = np.inf
    return out


def evaluate(node: Node, blocks: Sequence[np.ndarray], anchor: np.ndarray | None = None) -> np.ndarray:
    """Evaluate on batched blocks; each block has shape (N, k1, k2, ky)."""
    if isinstance(node, Info):
        return batch_info(blocks[node.block], node.a, node.b, node.c)
    if isinstance(node, Div):
        return batch_div(blocks[node.block], anchor)
    if isinstance(node, Pos):
        return np.maximum(evaluate(node.arg, blocks, anchor), 0.0)
    out = np.full(blocks[0].shape[0], node.const, dtype=float)
    for coef, child in node.terms:
        out = out + coef * evaluate(child, blocks, anchor)
    return out


def evaluate_one(node: Node, blocks: Sequence[np.ndarray], anchor=None) -> float:
    return float(evaluate(node, [b[None] for b in blocks], anchor)[0])


# ----------------------------------------------------------------------------
# smooth (epigraph) form for gradient solvers


def _info_value_grad(f: np.ndarray, a, b, c):
    """Value (bits) and gradient wrt every cell of I(A;B|C) at one table."""
    A, B, C = set(a), set(b), set(c)
    val = 0.0
    grad = np.zeros_like(f)
    for keep, sign in ((A | B | C, 1.0), (C, 1.0), (A | C, -1.0), (B | C, -1.0)):
        if not keep:
            continue
        drop = tuple(x for x in range(3) if x not in keep)
        m = f.sum(axis=drop, keepdims=True) if drop else f
        val += sign * float(np.sum(np.where(m > 0, m * np.log(np.maximum(m, _TINY)), 0.0)))
        grad = grad + sign * np.log(np.maximum(m, _GRAD_FLOOR))
    return val / _LN2, grad / _LN2


class Compiled:
    """Objective with every Pos node replaced by an auxiliary epigraph variable.

    The smooth objective is ``root`` with aux values substituted; constraint k
    requires ``t_k >= arg_k`` (and ``t_k >= 0`` through bounds).  This is an
    exact reformulation because every Pos node enters with a nonnegative
    coefficient.
    """

    def __init__(self, node: Node):
        self.args: list[Node] = []
        self.root = self._strip(node, 1.0)

    @property
    def n_aux(self) -> int:
        return len(self.args)

    def _strip(self, node: Node, sign: float):
        if isinstance(node, Pos):
            if sign < 0:
                raise ValueError("|.|^+ under a negative coefficient is not supported")
            inner = self._strip(node.arg, sign)
            self.args.append(inner)
            return ("aux", len(self.args) - 1)
        if isinstance(node, Affine):
            return Affine(tuple((coef, self._strip(ch, sign * coef)) for coef, ch in node.terms),
                          node.const)
        return node

    def value_grad(self, node, blocks, anchor, aux):
        """Value and (block gradients, aux gradient) of a stripped node."""
        if isinstance(node, tuple):
            g_aux = np.zeros(len(aux))
            g_aux[node[1]] = 1.0
            return float(aux[node[1]]), [np.zeros_like(b) for b in blocks], g_aux
        if isinstance(node, Info):
            v, g = _info_value_grad(blocks[node.block], node.a, node.b, node.c)
            gb = [np.zeros_like(b) for b in blocks]
            gb[node.block] = g
            return v, gb, np.zeros(len(aux))
        if isinstance(node, Div):
            f = blocks[node.block]
            lg = np.log(np.maximum(anchor, _TINY))
            v = float(np.sum(np.where(f > 0, f * (np.log(np.maximum(f, _TINY)) - lg), 0.0))) / _LN2
            gb = [np.zeros_like(b) for b in blocks]
            gb[node.block] = (np.log(np.maximum(f, _GRAD_FLOOR)) - lg + 1.0) / _LN2
            return v, gb, np.zeros(len(aux))
        total = node.const
        gb = [np.zeros_like(b) for b in blocks]
        ga = np.zeros(len(aux))
        for coef, ch in node.terms:
            v, g, a = self.value_grad(ch, blocks, anchor, aux)
            total += coef * v
            for i in range(len(gb)):
                gb[i] += coef * g[i]
            ga += coef * a
        return total, gb, ga


def blocks_used(node: Node) -> set:
    if isinstance(node, (Info, Div)):
        return {node.block}
    if isinstance(node, Pos):
        return blocks_used(node.arg)
    out = set()
    for _, ch in node.terms:
        out |= blocks_used(ch)
    return out
