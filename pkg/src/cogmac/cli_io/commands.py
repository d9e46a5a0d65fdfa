"""Command bodies: resolved parameters in, JSON-ready payload and summary out."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..dist_opt import MinimizeOptions
from ..ensemble_sim import (DEFAULT_EXACT_CAP, EnsembleConfig, exact_bin_fail, exact_pe1_sup,
                            exact_pe2_sup, simulate)
from ..exponents import ZERO_TOL, scheme_exponents
from ..prob_core import InputDist, ResourceError
from ..regions import (RatePrimitives, RegionOptions, hull_over_inputs, lapidoth_su_bound,
                       random_input, region_bin, region_lm, region_matched, region_sup,
                       single_user_bound)
from ..regions.curves import REGION_FUNCS
from .problem import ProblemFile

REGION_KINDS = ("lm", "sup", "sup-tilde", "bin", "bin-tilde", "bin-star", "matched")
SCHEME_ALIASES = {"sup": "superposition", "superposition": "superposition",
                  "bin": "binning", "binning": "binning"}


class UsageError(ValueError):
    pass


@dataclass
class Outcome:
    payload: dict
    summary: list = field(default_factory=list)
    degraded: bool = False
    csv_rows: list | None = None


def _input(pb: ProblemFile) -> InputDist:
    if pb.P is None:
        raise UsageError("the problem file has no input distribution P")
    return pb.input


def _region_opts(params) -> RegionOptions:
    return RegionOptions(starts=params["starts"], seed=params["seed"])


def _curve_payload(c) -> dict:
    return {"kind": c.kind, "samples": c.samples.tolist(),
            "dropped": list(c.meta.get("dropped", [])),
            "diagnostics": {"issues": _jsonable(c.meta.get("issues", [])),
                            "solves": c.meta.get("solves", 0)}}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, InputDist):
        return x.p12.tolist()
    return x


def region(pb: ProblemFile, params: dict) -> Outcome:
    kind = params["kind"].replace("-", "_")
    if params["grid"] < 1:
        raise UsageError("--grid needs at least one point")
    grid = np.linspace(0.0, math.log2(pb.dims[0]), params["grid"])
    opts = _region_opts(params)
    ch = pb.channel
    if params["dist"] == "sweep":
        c = hull_over_inputs(kind, ch, n_anchors=params["n_dist"], seed=params["seed"],
                             R1_grid=grid, opts=opts)
        anchors = [a.tolist() for a in c.anchor]
    else:
        inp = _input(pb)
        P = ch.joint(inp)
        if kind == "lm":
            c = region_lm(inp.p12.sum(axis=1), inp.p12.sum(axis=0), ch, grid, opts)
        elif kind == "matched":
            c = region_matched(P, grid)
        else:
            c = REGION_FUNCS[kind](P, ch.q, grid, opts)
        anchors = [inp.p12.tolist()]
    out = _curve_payload(c)
    out["anchors"] = anchors
    for k in ("R1_max", "R2_max"):
        if k in c.meta:
            out[k] = float(c.meta[k])
    summary = [f"region {params['kind']}: {len(c.samples)} boundary points, "
               f"max sum-rate {c.max_sum_rate():.6f}"]
    if len(c.samples):
        summary.append(f"  corner candidates: R1 = {c.R1[-1]:.6f}, R2max(R1 = 0) = {c.R2[0]:.6f}")
    rows = [("R1", "R2max")] + [(repr(float(a)), repr(float(b))) for a, b in c.samples]
    return Outcome(out, summary, c.degraded, rows)


def exponent(pb: ProblemFile, params: dict) -> Outcome:
    R1, R2 = params["R1"], params["R2"]
    if R1 < 0 or R2 < 0:
        raise UsageError("rates must be nonnegative")
    ch = pb.channel
    opts = MinimizeOptions(starts=params["starts"], seed=params["seed"])
    r = scheme_exponents(ch.joint(_input(pb)), ch.q, R1, R2, opts)
    scheme = SCHEME_ALIASES[params["scheme"]]
    value = r.E_sup if scheme == "superposition" else r.E_bin
    verdict = "inside" if value > ZERO_TOL else "outside"
    comps = r.as_dict()
    out = {"scheme": scheme, "rates": [R1, R2], "exponent": value, "verdict": verdict,
           "components": comps, "statuses": dict(r.statuses)}
    summary = [f"{k:8s} {v:.6f}" for k, v in comps.items()]
    summary.append(f"{scheme} exponent {value:.6f}: {verdict}")
    return Outcome(out, summary, r.degraded)


def region_edge_R1(P, q, scheme: str, R2: float, opts: RegionOptions, hi: float) -> float:
    """Largest R1 with (R1, R2) in the scheme's region at P (bisection, opts.bisect_tol)."""
    pr = RatePrimitives(P, q, opts)
    fn = region_sup if scheme == "superposition" else region_bin

    def inside(r1):
        return fn(P, q, [r1], opts, prims=pr).contains(r1, R2)

    if not inside(0.0):
        return 0.0
    lo = 0.0
    while inside(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > opts.bisect_tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if inside(mid) else (lo, mid)
    return lo


def simulate_cmd(pb: ProblemFile, params: dict) -> Outcome:
    scheme = SCHEME_ALIASES[params["scheme"]]
    ch = pb.channel
    inp = _input(pb)
    R1, R2 = params["R1"], params["R2"]
    summary = []
    probe = params.get("probe_outside")
    if probe is not None:
        edge = region_edge_R1(ch.joint(inp), ch.q, scheme, R2, _region_opts(params),
                              math.log2(pb.dims[0]))
        R1 = probe * edge
        summary.append(f"converse probe: R1 = {probe} x region edge {edge:.6f} = {R1:.6f}")
    try:
        cfg = EnsembleConfig(scheme, params["n"], R1, R2, inp, params["gamma"], params["seed"])
        rep = simulate(cfg, ch, params["trials"], budget=params["budget"])
    except ResourceError as e:
        raise UsageError(str(e)) from None
    out = {"report": rep.as_dict(), "rates": [R1, R2]}
    for k in ("errors", "err1", "err2", "encode_fail"):
        lo, hi = rep.interval(k)
        summary.append(f"{k:12s} {rep.rate(k):.4f}  wilson95 [{lo:.4f}, {hi:.4f}]")
    if params["exact"]:
        out["exact"] = _exact_side_by_side(cfg, ch, rep, summary)
    return Outcome(out, summary, False)


def _exact_side_by_side(cfg, ch, rep, summary) -> dict:
    res = {}
    if cfg.scheme == "superposition":
        if cfg.n > DEFAULT_EXACT_CAP:
            summary.append(f"exact oracles skipped: n = {cfg.n} exceeds the cap {DEFAULT_EXACT_CAP}")
            return {"skipped": f"n exceeds the exact-enumeration cap {DEFAULT_EXACT_CAP}"}
        pairs = [("pe1_event", exact_pe1_sup(cfg.counts, ch, cfg.R1, cfg.R2, cfg.n)),
                 ("pe2_event", exact_pe2_sup(cfg.counts, ch, cfg.R2, cfg.n))]
    else:
        pairs = [("encode_fail", exact_bin_fail(cfg.counts, cfg.gamma, cfg.n))]
    for name, p in pairs:
        mc = rep.rate(name)
        sigma = math.sqrt(max(p * (1 - p), 1e-300) / max(rep.trials, 1))
        lo, hi = rep.interval(name)
        res[name] = {"exact": p, "monte_carlo": mc, "sigma": sigma,
                     "z": (mc - p) / sigma, "inside_wilson95": lo <= p <= hi}
        summary.append(f"{name:12s} exact {p:.6f}  monte carlo {mc:.6f}  z = {(mc - p) / sigma:+.2f}")
    return res


def su_bound(pb: ProblemFile, params: dict) -> Outcome:
    su = pb.single_user
    if su is None:
        raise UsageError("the problem file has no single_user block")
    opts = _region_opts(params)
    k1, k2 = su.phi.shape
    if params["dist"] == "sweep":
        rng_inputs = [(random_input(np.random.default_rng([params["seed"], i]), k1, k2, False),
                       random_input(np.random.default_rng([params["seed"], 10**6 + i]), k1, k2, True))
                      for i in range(params["n_dist"])]
    else:
        inp = _input(pb)
        rng_inputs = [(inp, InputDist.product(inp.p12.sum(axis=1), inp.p12.sum(axis=0)))]
    per, degraded = [], False
    for cog_in, lm_in in rng_inputs:
        b = single_user_bound(su.W_su, su.q_su, su.phi, cog_in, opts)
        lv, info = lapidoth_su_bound(su.W_su, su.q_su, su.phi, lm_in.p12.sum(axis=1),
                                     lm_in.p12.sum(axis=0), opts)
        degraded |= bool(b.issues or info["issues"])
        per.append({"cognitive_input": cog_in.p12.tolist(), "cognitive": b.value,
                    "sup_sum": b.sup_sum, "reversed_sum": b.reversed_sum,
                    "bin_star_sum": b.bin_star_sum, "product_input": lm_in.p12.tolist(),
                    "lapidoth": lv})
    cog = max(p["cognitive"] for p in per)
    lap = max(p["lapidoth"] for p in per)
    out = {"cognitive_bound": cog, "lapidoth_bound": lap, "gap": cog - lap, "per_input": per}
    summary = [f"cognitive-MAC bound {cog:.6f}", f"non-cognitive bound {lap:.6f}",
               f"gap {cog - lap:+.6f}"]
    return Outcome(out, summary, degraded)


COMMANDS = {"region": region, "exponent": exponent, "simulate": simulate_cmd, "su-bound": su_bound}


def solver_settings(command: str, params: dict) -> dict:
    if command == "exponent":
        return asdict(MinimizeOptions(starts=params["starts"], seed=params["seed"]))
    if command in ("region", "su-bound") or params.get("probe_outside") is not None:
        return asdict(_region_opts(params))
    return {}
