"""Finite-alphabet probability primitives, information functionals and
method-of-types combinatorics.

Joint tables are dense ``numpy`` arrays indexed ``[x1, x2, y]``.  All
information quantities are in bits.  The conventions ``0 log 0 = 0`` and
``a log(a/0) = +inf`` (for ``a > 0``) are applied everywhere; an infinite
divergence is returned as ``math.inf``, never as NaN.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.special import gammaln

PMF_TOL = 1e-12
DEFAULT_CELL_CAP = 4096
DEFAULT_ENUM_CAP = 24
DEFAULT_TYPE_COUNT_CAP = 2_000_000

AXIS = {"X1": 0, "X2": 1, "Y": 2}
_LN2 = math.log(2.0)


class ResourceError(RuntimeError):
    """A configured size cap (blocklength, alphabet, enumeration) was exceeded."""


def _axes(group) -> tuple[int, ...]:
    if group is None:
        return ()
    if isinstance(group, (int, np.integer)):
        return (int(group),)
    if isinstance(group, str):
        return (AXIS[group],)
    return tuple(AXIS[g] if isinstance(g, str) else int(g) for g in group)


@dataclass(frozen=True)
class AlphabetDims:
    k1: int
    k2: int
    ky: int
    cap: int = field(default=DEFAULT_CELL_CAP, compare=False)

    def __post_init__(self):
        for name in ("k1", "k2", "ky"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"alphabet size {name} must be >= 1")
        if self.k1 * self.k2 * self.ky > self.cap:
            raise ResourceError(
                f"table size {self.k1 * self.k2 * self.ky} exceeds cap {self.cap}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.k1, self.k2, self.ky)

    @property
    def size(self) -> int:
        return self.k1 * self.k2 * self.ky


def _check_pmf(p: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{what}: non-finite entries")
    if np.any(p < 0):
        raise ValueError(f"{what}: negative entries")
    s = float(p.sum())
    if abs(s - 1.0) > PMF_TOL:
        raise ValueError(f"{what}: entries sum to {s!r}, not 1")


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Probability table over X1 x X2 x Y."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 3:
            raise ValueError("JointPmf needs a 3-d table [x1, x2, y]")
        AlphabetDims(*p.shape)
        _check_pmf(p, "JointPmf")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def renormalize(cls, p) -> "JointPmf":
        p = np.clip(np.asarray(p, dtype=float), 0.0, None)
        return cls(p / p.sum())

    @classmethod
    def from_parts(cls, p12, W) -> "JointPmf":
        p12 = np.asarray(p12, dtype=float)
        return cls(p12[:, :, None] * np.asarray(W, dtype=float))

    @property
    def dims(self) -> AlphabetDims:
        return AlphabetDims(*self.p.shape)

    def marginal(self, group) -> np.ndarray:
        """Marginal over ``group`` (names or axes), axes kept in table order."""
        keep = sorted(set(_axes(group)))
        drop = tuple(a for a in range(3) if a not in keep)
        return self.p.sum(axis=drop)

    @property
    def p12(self) -> np.ndarray:
        return self.p.sum(axis=2)

    @property
    def p1(self) -> np.ndarray:
        return self.p.sum(axis=(1, 2))

    @property
    def p2(self) -> np.ndarray:
        return self.p.sum(axis=(0, 2))

    @property
    def py(self) -> np.ndarray:
        return self.p.sum(axis=(0, 1))

    def conditional_y(self) -> np.ndarray:
        """P(y|x1,x2); rows with zero input mass are left uniform."""
        p12 = self.p12[:, :, None]
        ky = self.p.shape[2]
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(p12 > 0, self.p / np.where(p12 > 0, p12, 1.0), 1.0 / ky)
        return w


@dataclass(frozen=True, eq=False)
class InputDist:
    """Random-coding distribution P(x1, x2)."""

    p12: np.ndarray

    def __post_init__(self):
        p = np.array(self.p12, dtype=float)
        if p.ndim != 2:
            raise ValueError("InputDist needs a 2-d table [x1, x2]")
        _check_pmf(p, "InputDist")
        p.setflags(write=False)
        object.__setattr__(self, "p12", p)

    @classmethod
    def renormalize(cls, p) -> "InputDist":
        p = np.clip(np.asarray(p, dtype=float), 0.0, None)
        return cls(p / p.sum())

    @classmethod
    def product(cls, p1, p2) -> "InputDist":
        return cls(np.outer(p1, p2))


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """Channel law W(y|x1,x2) together with the decoding metric q(x1,x2,y)."""

    W: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        q = np.array(self.q, dtype=float)
        if W.ndim != 3 or q.shape != W.shape:
            raise ValueError("W and q must both be 3-d tables of equal shape")
        AlphabetDims(*W.shape)
        if np.any(W < 0) or not np.all(np.isfinite(W)):
            raise ValueError("W must be finite and nonnegative")
        rows = W.sum(axis=2)
        if np.max(np.abs(rows - 1.0)) > PMF_TOL:
            raise ValueError("W(.|x1,x2) must sum to 1 for every input pair")
        if not np.all(np.isfinite(q)):
            raise ValueError("metric q must be finite")
        W.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "q", q)

    @property
    def dims(self) -> AlphabetDims:
        return AlphabetDims(*self.W.shape)

    def joint(self, inp) -> JointPmf:
        p12 = inp.p12 if isinstance(inp, InputDist) else np.asarray(inp, dtype=float)
        return JointPmf.from_parts(p12, self.W)


def matched_metric(W, floor: float = -60.0) -> np.ndarray:
    """log2 W, with impossible transitions mapped to a finite ``floor``."""
    W = np.asarray(W, dtype=float)
    with np.errstate(divide="ignore"):
        q = np.log2(W)
    return np.where(W > 0, q, floor)


@dataclass(frozen=True, eq=False)
class TypeCount:
    """Integer occupation numbers of a length-``n`` sequence (or joint sequence)."""

    n: int
    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if self.n < 1:
            raise ValueError("blocklength must be positive")
        if np.any(c < 0):
            raise ValueError("negative counts")
        if int(c.sum()) != int(self.n):
            raise ValueError(f"counts sum to {int(c.sum())}, expected {self.n}")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def pmf(self) -> np.ndarray:
        return self.counts / self.n

    def marginal(self, axes) -> np.ndarray:
        keep = set(_axes(axes))
        drop = tuple(a for a in range(self.counts.ndim) if a not in keep)
        return self.counts.sum(axis=drop)


# ----------------------------------------------------------------------------
# information functionals


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p, dtype=float)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out


def _table(f) -> np.ndarray:
    return f.p if isinstance(f, JointPmf) else np.asarray(f, dtype=float)


def entropy(p) -> float:
    """Shannon entropy in bits of any pmf array (all axes jointly)."""
    p = _table(p)
    return float(max(-_xlogx(p).sum(), 0.0))


def h2(p: float) -> float:
    """Binary entropy function in bits."""
    return entropy(np.array([p, 1.0 - p]))


def _marg_entropy(f: np.ndarray, keep: Sequence[int]) -> float:
    if not keep:
        return 0.0
    drop = tuple(a for a in range(f.ndim) if a not in keep)
    return entropy(f.sum(axis=drop))


def mutual_info(f, a, b, c=()) -> float:
    """I(A;B|C) in bits, groups given by names (``"X1"``) or axis indices."""
    A, B, C = set(_axes(a)), set(_axes(b)), set(_axes(c))
    if not A or not B:
        raise ValueError("mutual_info needs nonempty groups A and B")
    if A & B or A & C or B & C:
        raise ValueError("groups must not overlap")
    f = _table(f)
    val = (_marg_entropy(f, sorted(A | C)) + _marg_entropy(f, sorted(B | C))
           - _marg_entropy(f, sorted(A | B | C)) - _marg_entropy(f, sorted(C)))
    return float(max(val, 0.0))


def conditional_entropy(f, a, c=()) -> float:
    A, C = set(_axes(a)), set(_axes(c))
    if A & C:
        raise ValueError("groups must not overlap")
    f = _table(f)
    return float(max(_marg_entropy(f, sorted(A | C)) - _marg_entropy(f, sorted(C)), 0.0))


def divergence(f, g) -> float:
    """D(f||g) in bits; ``math.inf`` when f is not absolutely continuous wrt g."""
    f, g = _table(f), _table(g)
    if f.shape != g.shape:
        raise ValueError("divergence needs tables of equal shape")
    pos = f > 0
    if np.any(g[pos] <= 0):
        return math.inf
    return float(max(np.sum(f[pos] * np.log2(f[pos] / g[pos])), 0.0))


def conditional_divergence(f, g_cond, given) -> float:
    """D(f_{.|C} || g_cond | f_C) = sum f log(f(.|c) / g_cond(.|c)).

    ``g_cond`` is a conditional table of the same shape as ``f``, normalized
    over the non-conditioning axes (e.g. a channel W(y|x1,x2) with
    ``given=("X1", "X2")``).
    """
    f, g = _table(f), np.asarray(g_cond, dtype=float)
    C = _axes(given)
    drop = tuple(a for a in range(f.ndim) if a not in C)
    fc = f.sum(axis=drop, keepdims=True)
    pos = f > 0
    if np.any(g[pos] <= 0):
        return math.inf
    ratio = f[pos] / np.broadcast_to(fc, f.shape)[pos] / g[pos]
    return float(max(np.sum(f[pos] * np.log2(ratio)), 0.0))


def metric_expectation(f, q) -> float:
    f, q = _table(f), np.asarray(q, dtype=float)
    if f.shape != q.shape:
        raise ValueError("metric table shape does not match pmf")
    return float(np.sum(f * q))


# ----------------------------------------------------------------------------
# method of types


def _compositions(m: int, r: int) -> Iterator[tuple[int, ...]]:
    """All r-tuples of nonnegative integers summing to m (stars and bars)."""
    if r == 1:
        yield (m,)
        return
    for bars in itertools.combinations(range(m + r - 1), r - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(m + r - 2 - prev)
        yield tuple(out)


def count_types(n: int, shape, pin=None, pin_axes=()) -> int:
    """Closed-form number of (conditional) types enumerated by ``enumerate_types``."""
    shape = tuple(int(s) for s in shape)
    pin_axes = _axes(pin_axes)
    if pin is None:
        m = int(np.prod(shape))
        return math.comb(n + m - 1, m - 1)
    r = int(np.prod([s for a, s in enumerate(shape) if a not in pin_axes]))
    return math.prod(math.comb(int(c) + r - 1, r - 1) for c in np.ravel(pin))


def enumerate_types(n: int, shape, pin=None, pin_axes=(), *, max_n: int = DEFAULT_ENUM_CAP,
                    max_count: int = DEFAULT_TYPE_COUNT_CAP) -> list[TypeCount]:
    """Every integer count table of ``shape`` summing to ``n``.

    With ``pin`` (integer counts over ``pin_axes``) only tables whose marginal
    on ``pin_axes`` equals ``pin`` are produced, i.e. the conditional types
    given a sequence of that type.
    """
    if n > max_n:
        raise ResourceError(f"blocklength {n} exceeds enumeration cap {max_n}")
    shape = tuple(int(s) for s in shape)
    pin_axes = _axes(pin_axes)
    total = count_types(n, shape, pin, pin_axes)
    if total > max_count:
        raise ResourceError(f"{total} types exceed enumeration cap {max_count}")
    if pin is None:
        return [TypeCount(n, np.array(c).reshape(shape))
                for c in _compositions(n, int(np.prod(shape)))]
    pin = np.asarray(pin, dtype=np.int64)
    if pin.shape != tuple(shape[a] for a in pin_axes):
        raise ValueError("pinned marginal has the wrong shape")
    if int(pin.sum()) != n:
        raise ValueError("pinned marginal does not sum to n")
    free_axes = [a for a in range(len(shape)) if a not in pin_axes]
    free_shape = tuple(shape[a] for a in free_axes)
    r = int(np.prod(free_shape))
    cells = list(np.ndindex(*pin.shape))
    per_cell = [list(_compositions(int(pin[c]), r)) for c in cells]
    order = list(pin_axes) + free_axes
    inverse = np.argsort(order)
    out = []
    for combo in itertools.product(*per_cell):
        block = np.array(combo, dtype=np.int64).reshape(pin.shape + free_shape)
        out.append(TypeCount(n, np.transpose(block, inverse)))
    return out


def _log2_multinomial(counts: np.ndarray) -> float:
    counts = np.asarray(counts, dtype=float)
    return float((gammaln(counts.sum() + 1) - gammaln(counts + 1).sum()) / _LN2)


def log_type_class_size(t: TypeCount, given_axes=None, given: TypeCount | None = None) -> float:
    """log2 |T(t)|, or log2 |T(t | s)| for a conditioning sequence s on ``given_axes``.

    The conditional class size is the product over conditioning symbols c of
    multinomial(n_c; n_{c,.}).  If ``given`` is supplied it must equal the
    marginal of ``t`` on ``given_axes``.
    """
    if given_axes is None:
        if given is not None:
            raise ValueError("conditioning type supplied without conditioning axes")
        return _log2_multinomial(t.counts.ravel())
    C = _axes(given_axes)
    marg = t.marginal(C)
    if given is not None:
        if given.counts.shape != marg.shape or not np.array_equal(given.counts, marg):
            raise ValueError("conditioning type is inconsistent with the joint type")
    free = [a for a in range(t.counts.ndim) if a not in C]
    block = np.transpose(t.counts, list(C) + free).reshape(marg.size, -1)
    return float(sum(_log2_multinomial(row) for row in block))


def quantize_to_type(p, n: int) -> np.ndarray:
    """Largest-remainder rounding of a pmf to integer counts summing to n."""
    p = np.asarray(p, dtype=float)
    raw = p.ravel() * n
    base = np.floor(raw).astype(np.int64)
    short = n - int(base.sum())
    if short > 0:
        rem = raw - base
        order = np.argsort(-rem, kind="stable")
        base[order[:short]] += 1
    return base.reshape(p.shape)
