"""Problem files: channel, metric, optional input and single-user construction, as JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..prob_core import ChannelSpec, InputDist
from ..regions.channels import induced_mac

STOCHASTIC_TOL = 1e-9


class ProblemError(ValueError):
    """Schema violation; the message lists every offending field."""


@dataclass(frozen=True)
class SingleUserBlock:
    X: int
    W_su: np.ndarray
    q_su: np.ndarray
    phi: np.ndarray


@dataclass(frozen=True, eq=False)
class ProblemFile:
    dims: tuple
    W: np.ndarray
    q: np.ndarray
    P: np.ndarray | None = None
    single_user: SingleUserBlock | None = None

    @property
    def channel(self) -> ChannelSpec:
        return ChannelSpec(self.W, self.q)

    @property
    def input(self) -> InputDist | None:
        return None if self.P is None else InputDist(self.P)

    # -- parsing ------------------------------------------------------------

    @classmethod
    def from_dict(cls, d) -> "ProblemFile":
        errs: list[str] = []
        if not isinstance(d, dict):
            raise ProblemError("top level: expected an object")
        unknown = set(d) - {"dims", "W", "q", "P", "single_user"}
        if unknown:
            errs.append(f"top level: unknown fields {sorted(unknown)}")
        su = None
        if d.get("single_user") is not None:
            su = _single_user(d["single_user"], errs)
        dims = _dims(d.get("dims"), errs)
        if su is not None and dims is not None and su.phi.shape != dims[:2]:
            errs.append(f"single_user.phi: shape {su.phi.shape} does not match dims {dims[:2]}")
        if "W" in d or "q" in d or su is None:
            W = _array(d, "W", dims, errs)
            q = _array(d, "q", dims, errs, allow_neg_inf=True)
            if W is not None:
                _stochastic(W, "W", errs)
            if su is not None and W is not None and q is not None and not errs:
                ch = induced_mac(su.W_su, su.q_su, su.phi)
                if not (np.allclose(W, ch.W, atol=1e-12) and np.array_equal(q, ch.q)):
                    errs.append("W, q: inconsistent with the channel induced by single_user")
        elif not errs:
            ch = induced_mac(su.W_su, su.q_su, su.phi)
            W, q = ch.W, ch.q
            if dims is not None and W.shape != dims:
                errs.append(f"dims: {dims} does not match the induced channel {W.shape}")
        else:
            W = q = None
        P = None
        if d.get("P") is not None:
            P = _array(d, "P", None if dims is None else dims[:2], errs)
            if P is not None:
                if np.any(P < 0):
                    errs.append("P: negative entries")
                elif abs(P.sum() - 1.0) > STOCHASTIC_TOL:
                    errs.append(f"P: entries sum to {P.sum():.12g}, expected 1")
        if errs:
            raise ProblemError("invalid problem file:\n  " + "\n  ".join(errs))
        return cls(dims, W, q, P, su)

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> "ProblemFile":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ProblemError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
        try:
            return cls.from_dict(d)
        except ProblemError as e:
            raise ProblemError(f"{source}: {e}") from None

    @classmethod
    def load(cls, path) -> "ProblemFile":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ProblemError(f"{path}: {e.strerror}") from None
        return cls.loads(text, str(path))

    # -- emission -------------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"dims": list(self.dims), "W": self.W.tolist(), "q": self.q.tolist()}
        if self.P is not None:
            d["P"] = self.P.tolist()
        if self.single_user is not None:
            s = self.single_user
            d["single_user"] = {"X": s.X, "W_su": s.W_su.tolist(), "q_su": s.q_su.tolist(),
                                "phi": s.phi.tolist()}
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def same_as(self, other: "ProblemFile") -> bool:
        def eq(a, b):
            return (a is None) == (b is None) and (a is None or np.array_equal(a, b))
        s, o = self.single_user, other.single_user
        su_eq = (s is None and o is None) or (s is not None and o is not None and s.X == o.X
                                             and all(eq(getattr(s, k), getattr(o, k))
                                                     for k in ("W_su", "q_su", "phi")))
        return (tuple(self.dims) == tuple(other.dims) and eq(self.W, other.W)
                and eq(self.q, other.q) and eq(self.P, other.P) and su_eq)


def _dims(v, errs):
    if v is None:
        errs.append("dims: missing")
        return None
    if (not isinstance(v, list) or len(v) != 3
            or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in v)):
        errs.append("dims: expected three positive integers [|X1|, |X2|, |Y|]")
        return None
    return tuple(v)


def _array(d, key, shape, errs, allow_neg_inf=False, path=None):
    path = path or key
    if key not in d:
        errs.append(f"{path}: missing")
        return None
    try:
        a = np.array(d[key], dtype=float)
    except (ValueError, TypeError):
        errs.append(f"{path}: expected a rectangular array of numbers")
        return None
    if shape is not None and a.shape != tuple(shape):
        errs.append(f"{path}: expected shape {tuple(shape)}, got {a.shape}")
        return None
    if np.any(np.isnan(a)) or np.any(np.isposinf(a)) or (not allow_neg_inf and np.any(np.isinf(a))):
        errs.append(f"{path}: non-finite entries")
        return None
    return a


def _stochastic(W, path, errs):
    if np.any(W < 0):
        errs.append(f"{path}: negative probabilities")
        return
    s = W.sum(axis=-1)
    for idx in zip(*np.nonzero(np.abs(s - 1.0) > STOCHASTIC_TOL)):
        where = "".join(f"[{i}]" for i in idx)
        errs.append(f"{path}{where}: row sums to {s[idx]:.12g}, expected 1")


def _single_user(v, errs):
    if not isinstance(v, dict):
        errs.append("single_user: expected an object")
        return None
    X = v.get("X")
    if not isinstance(X, int) or isinstance(X, bool) or X < 1:
        errs.append("single_user.X: expected a positive integer")
        return None
    W_su = _array(v, "W_su", None, errs, path="single_user.W_su")
    q_su = _array(v, "q_su", None if W_su is None else W_su.shape, errs, allow_neg_inf=True,
                  path="single_user.q_su")
    phi = _array(v, "phi", None, errs, path="single_user.phi")
    if W_su is None or q_su is None or phi is None:
        return None
    if W_su.ndim != 2 or W_su.shape[0] != X:
        errs.append(f"single_user.W_su: expected shape ({X}, |Y|), got {W_su.shape}")
        return None
    _stochastic(W_su, "single_user.W_su", errs)
    if phi.ndim != 2 or np.any(phi != np.round(phi)) or np.any(phi < 0) or np.any(phi >= X):
        errs.append(f"single_user.phi: expected a 2-D table of symbols in [0, {X})")
        return None
    return SingleUserBlock(X, W_su, q_su, phi.astype(np.int64))
