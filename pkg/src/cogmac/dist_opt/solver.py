"""Multistart SLSQP over the affine parameterization of a constraint set.

Equalities are eliminated (``v = v0 + N z``); nonnegativity and the metric
inequality are linear constraints on ``z``; each |.|^+ clamp becomes an
epigraph variable.  Starts run sequentially, each with its own RNG stream
seeded by ``(seed, start index)``, so results are bit-identical per seed.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _sp_minimize

from ..prob_core import JointPmf
from .objectives import Compiled, Div, Node, Objective, evaluate_one, lin
from .sets import (INEQ_TOL, FeasibleSet, NestedSet, X1, X2, affine_of, fix_metric,
                   marginal, match_marginals, max_entropy_member, project_nested)

CONVERGED, MAX_ITERS, INFEASIBLE, STALLED = "converged", "max-iters", "infeasible", "stalled"


@dataclass(frozen=True)
class MinimizeOptions:
    starts: int = 16
    max_iter: int = 10000
    tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True, eq=False)
class OptResult:
    value: float
    argmin: object
    status: str
    starts_used: int
    certificate_gap: float
    start_values: tuple = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.status == CONVERGED


class _Smooth:
    """Caches value and gradients of the epigraph program at the last x."""

    def __init__(self, aff, comp: Compiled, nonlin, anchor):
        self.aff, self.comp, self.anchor = aff, comp, anchor
        self.nl = [(Compiled(e), b) for e, b in nonlin]
        self.d = aff.basis.shape[1]
        self.key = None

    def _blocks(self, x):
        return self.aff.blocks(self.aff.point(x[:self.d]))

    def _lift(self, gb):
        return self.aff.basis.T @ np.concatenate([g.ravel() for g in gb])

    def _eval(self, x):
        k = x.tobytes()
        if k == self.key:
            return
        self.key = k
        blocks = self._blocks(x)
        aux = x[self.d:]
        c = self.comp
        v, gb, ga = c.value_grad(c.root, blocks, self.anchor, aux)
        self.f, self.g = v, np.concatenate([self._lift(gb), ga])
        cons, jac = [], []
        for k_, arg in enumerate(c.args):
            a, gb, ga = c.value_grad(arg, blocks, self.anchor, aux)
            e = np.zeros(len(aux))
            e[k_] = 1.0
            cons.append(aux[k_] - a)
            jac.append(np.concatenate([-self._lift(gb), e - ga]))
        for comp, bound in self.nl:
            a, gb, _ = comp.value_grad(comp.root, blocks, self.anchor, aux)
            cons.append(bound - a)
            jac.append(np.concatenate([-self._lift(gb), np.zeros(len(aux))]))
        self.c = np.array(cons)
        self.J = np.array(jac).reshape(len(cons), len(x))

    def fun(self, x):
        self._eval(x)
        return self.f

    def grad(self, x):
        self._eval(x)
        return self.g

    def cons(self, x):
        self._eval(x)
        return self.c

    def jac(self, x):
        self._eval(x)
        return self.J

    def aux_start(self, z):
        blocks = self.aff.blocks(self.aff.point(z))
        aux = np.zeros(self.comp.n_aux)
        for k, arg in enumerate(self.comp.args):
            aux[k] = max(0.0, self.comp.value_grad(arg, blocks, self.anchor, aux)[0])
        return aux


def _linear_constraints(aff, n_aux):
    free = aff.free
    Bf = aff.basis[free]
    A = [Bf]
    b = [aff.v0[free]]
    if aff.G.shape[0]:
        A.append(aff.G @ aff.basis)
        b.append(aff.G @ aff.v0 - aff.h)
    A = np.hstack([np.vstack(A), np.zeros((sum(a.shape[0] for a in A), n_aux))])
    b = np.concatenate(b)
    return {"type": "ineq", "fun": lambda x: A @ x + b, "jac": lambda x: A}


def _slsqp(sm: _Smooth, z0, lin_con, opts: MinimizeOptions):
    x0 = np.concatenate([z0, sm.aux_start(z0)])
    if not len(x0):
        return z0, 0  # the feasible set is a single point
    bounds = [(None, None)] * sm.d + [(0.0, None)] * sm.comp.n_aux
    cons = [lin_con]
    if sm.comp.n_aux or sm.nl:
        cons.append({"type": "ineq", "fun": sm.cons, "jac": sm.jac})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = _sp_minimize(sm.fun, x0, jac=sm.grad, method="SLSQP", bounds=bounds,
                         constraints=cons,
                         options={"maxiter": opts.max_iter, "ftol": opts.tol})
    return r.x[:sm.d], int(r.status)


def _phase1(aff, nonlin, anchor, z0, opts):
    """Minimize the worst nonlinear-constraint violation over the linear set."""
    comps = [(Compiled(e), b) for e, b in nonlin]
    d = aff.basis.shape[1]

    def f(x):
        return x[d]

    def g(x):
        e = np.zeros(d + 1)
        e[d] = 1.0
        return e

    def cons(x):
        blocks = aff.blocks(aff.point(x[:d]))
        return np.array([x[d] - (c.value_grad(c.root, blocks, anchor, np.zeros(0))[0] - b)
                         for c, b in comps])

    def jac(x):
        blocks = aff.blocks(aff.point(x[:d]))
        rows = []
        for c, _ in comps:
            _, gb, _ = c.value_grad(c.root, blocks, anchor, np.zeros(0))
            rows.append(np.concatenate([-aff.basis.T @ np.concatenate([q.ravel() for q in gb]), [1.0]]))
        return np.array(rows)

    lin_con = _linear_constraints(aff, 1)
    def violation(z):
        return -float(np.min(cons(np.concatenate([z, [0.0]]))))

    x0 = np.concatenate([z0, [max(0.0, violation(z0))]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = _sp_minimize(f, x0, jac=g, method="SLSQP", constraints=[lin_con,
                         {"type": "ineq", "fun": cons, "jac": jac}],
                         options={"maxiter": opts.max_iter, "ftol": 1e-12})
    return r.x[:d], violation(r.x[:d])


def _run(aff, node: Node, nonlin, anchor, starts: list, repair: Callable, exact: Callable,
         feasible: Callable, opts: MinimizeOptions, pack: Callable) -> OptResult:
    comp = Compiled(node)
    sm = _Smooth(aff, comp, nonlin, anchor)
    lin_con = _linear_constraints(aff, comp.n_aux)
    best = None
    per_start = []
    for i, v in enumerate(starts):
        cands = []
        blocks, ok = repair(v)
        if ok and feasible(blocks):
            cands.append((exact(blocks), blocks, CONVERGED))
        z, code = _slsqp(sm, aff.coords(v), lin_con, opts)
        if code not in (0, 9):
            z2, code2 = _slsqp(sm, z, lin_con, opts)
            z, code = z2, (code2 if code2 in (0, 9) else code)
        blocks, ok = repair(aff.point(z))
        status = {0: CONVERGED, 9: MAX_ITERS}.get(code, STALLED)
        if ok and feasible(blocks):
            cands.append((exact(blocks), blocks, status))
        if not cands:
            per_start.append(math.inf)
            continue
        val, blocks, _ = min(cands, key=lambda c: c[0])
        per_start.append(val)
        if best is None or val < best[0] - 1e-15:
            best = (val, blocks, status)
    if best is None:
        return OptResult(math.inf, None, INFEASIBLE, len(starts), math.nan, tuple(per_start))
    vals = sorted(v for v in per_start if math.isfinite(v))
    gap = vals[1] - vals[0] if len(vals) > 1 else math.nan
    return OptResult(float(best[0]), pack(best[1]), best[2], len(starts), float(gap), tuple(per_start))


# random starts that cannot be repaired into the set are redrawn at most this often
_MAX_DRAWS = 20


def _dirichlet_table(rng, shape, allowed):
    t = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    return np.where(allowed, t, 0.0)


def minimize(obj: Objective | Node, S: FeasibleSet, opts: MinimizeOptions | None = None) -> OptResult:
    """Minimize a single-pmf objective over ``S``."""
    opts = opts or MinimizeOptions()
    node = obj.expr if isinstance(obj, Objective) else obj
    aff = affine_of(S)
    ref = S.reference.p
    nonlin = S.nonlinear()

    def repair(v):
        f = np.clip(v.reshape(ref.shape), 0.0, None)
        f, ok = match_marginals(f, S.pins, S.targets(), ref)
        if ok and S.has_metric:
            f, ok = fix_metric(f, S.metric, S.bound, ref)
        return [f / f.sum()], ok

    def feasible(blocks):
        return S.contains(blocks[0], INEQ_TOL)

    def exact(blocks):
        return evaluate_one(node, blocks)

    starts = [ref.ravel().copy(), max_entropy_member(S).ravel()]
    if nonlin:
        z1, viol = _phase1(aff, nonlin, None, np.zeros(aff.basis.shape[1]), opts)
        if viol > INEQ_TOL:
            return OptResult(math.inf, None, INFEASIBLE, 1, math.nan, ())
        starts.insert(2, repair(aff.point(z1))[0][0].ravel())
    k = 0
    allowed = S.allowed()
    while len(starts) < opts.starts and k < _MAX_DRAWS * opts.starts:
        rng = np.random.default_rng([opts.seed, k])
        k += 1
        t = _dirichlet_table(rng, ref.shape, allowed)
        f, ok = repair(t.ravel())
        if ok:
            starts.append(f[0].ravel())
    starts = starts[:max(1, opts.starts)]
    return _run(aff, node, nonlin, None, starts, repair, exact, feasible, opts,
                lambda b: JointPmf.renormalize(b[0]))


def minimize_nested(obj: Objective | Node, S: NestedSet,
                    opts: MinimizeOptions | None = None, warm=None) -> OptResult:
    """Minimize D(P'||P) + obj(P~) jointly over P' in K(P), P~ in S(P').

    ``argmin`` is the pair ``(P', P~)``; ``warm`` is an optional pair used
    as the second start.
    """
    opts = opts or MinimizeOptions()
    inner = obj.expr if isinstance(obj, Objective) else obj
    node = lin((1.0, Div(0)), (1.0, inner))
    aff = affine_of(S)
    P = S.anchor.p
    shape = P.shape
    m = P.size

    def repair(v):
        o, i, ok = project_nested(v[:m].reshape(shape), v[m:].reshape(shape), S)
        return [o / o.sum(), i / i.sum()], ok

    def feasible(blocks):
        return S.contains(blocks[0], blocks[1], INEQ_TOL)

    def exact(blocks):
        return evaluate_one(node, blocks, P)

    starts = [np.concatenate([P.ravel(), P.ravel()])]
    p12 = marginal(P, (X1, X2))
    sup = (P > 0).astype(float)
    o = p12 * sup / np.maximum(sup.sum(axis=2, keepdims=True), 1)
    o = o / o.sum()
    inner_me = max_entropy_member(S.inner_set(JointPmf.renormalize(o)))
    starts.append(np.concatenate([o.ravel(), inner_me.ravel()]))
    if warm is not None:
        wo, wi = (np.asarray(x.p if isinstance(x, JointPmf) else x, dtype=float) for x in warm)
        blocks, ok = repair(np.concatenate([wo.ravel(), wi.ravel()]))
        if ok:
            starts.insert(1, np.concatenate([x.ravel() for x in blocks]))
    k = 0
    allowed = P.sum(axis=2, keepdims=True) > 0
    while len(starts) < opts.starts and k < _MAX_DRAWS * opts.starts:
        rng = np.random.default_rng([opts.seed, k])
        k += 1
        a = _dirichlet_table(rng, shape, P > 0)
        b = _dirichlet_table(rng, shape, np.broadcast_to(allowed, shape))
        blocks, ok = repair(np.concatenate([a.ravel(), b.ravel()]))
        if ok:
            starts.append(np.concatenate([x.ravel() for x in blocks]))
    starts = starts[:max(1, opts.starts)]
    return _run(aff, node, [], P, starts, repair, exact, feasible, opts,
                lambda b: (JointPmf.renormalize(b[0]), JointPmf.renormalize(b[1])))
