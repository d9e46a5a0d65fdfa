import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogmac.dist_opt import (FeasibleSet, MinimizeOptions, NestedSet, Objective, grid_oracle,
                             grid_oracle_many, minimize, minimize_nested, project_to_set)
from cogmac.prob_core import JointPmf, ResourceError, mutual_info


def instance(seed, ky=2):
    rng = np.random.default_rng(seed)
    W = rng.dirichlet(np.ones(ky), size=(2, 2))
    p12 = rng.dirichlet(np.ones(4)).reshape(2, 2)
    return JointPmf.from_parts(p12, W), rng.normal(size=(2, 2, ky))


SINGLE = [("L2", "CMI_X2_Y_given_X1", (0, 0)), ("L1", "MI_X1_YX2", (0, 0)),
          ("L0", "R1pp", (0, 0.2)), ("L0", "R2pp", (0.3, 0)), ("Gq", "MI_X12_Y", (0, 0)),
          ("L0sup", "MI_X12_Y", (0.2, 0))]


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("kind,obj,rates", SINGLE)
def test_minimize_not_worse_than_grid(seed, kind, obj, rates):
    P, q = instance(seed)
    S = FeasibleSet(kind, P, q, rates=rates if kind == "L0sup" else (0, 0))
    o = Objective(obj, rates)
    r = minimize(o, S)
    g = grid_oracle(o, S, 120)
    if g.status == "infeasible":
        # thin sets can miss every grid point; the solver's point must still be a member
        assert r.status == "infeasible" or S.contains(r.argmin)
        return
    assert r.value <= g.value + 1e-6
    assert S.contains(r.argmin)


@given(st.integers(0, 10_000), st.sampled_from(["K", "Gq", "L0", "L1", "L2", "D1", "D2"]))
def test_projection_lands_in_set_and_is_idempotent(seed, kind):
    P, q = instance(seed)
    S = FeasibleSet(kind, P, q)
    f = np.random.default_rng(seed + 1).dirichlet(np.ones(8)).reshape(2, 2, 2)
    proj = project_to_set(f, S)
    if proj.feasible:
        assert S.contains(proj.pmf)
        again = project_to_set(proj.pmf, S)
        np.testing.assert_array_equal(again.pmf.p, proj.pmf.p)


@given(st.integers(0, 10_000))
def test_reference_bounds_the_minimum(seed):
    P, q = instance(seed)
    for kind, obj, axes in [("L2", "CMI_X2_Y_given_X1", ((1,), (2,), (0,))),
                            ("L0", "MI_X12_Y", ((0, 1), (2,), ()))]:
        r = minimize(Objective(obj), FeasibleSet(kind, P, q), MinimizeOptions(starts=2))
        assert r.value <= mutual_info(P, *axes) + 1e-9


def test_unreachable_metric_is_infeasible():
    P, q = instance(0)
    r = minimize(Objective("MI_X1_Y"), FeasibleSet("Gq", P, q, threshold=1e9))
    assert r.status == "infeasible" and r.value == math.inf and r.argmin is None


def test_single_point_set():
    # X2 constant: pinning X1Y determines the whole table
    W = np.array([[[0.8, 0.2]], [[0.3, 0.7]]])
    P = JointPmf.from_parts(np.array([[0.4], [0.6]]), W)
    r = minimize(Objective("MI_X1_Y"), FeasibleSet("L2", P, np.zeros((2, 1, 2))))
    assert r.value == pytest.approx(mutual_info(P, (0,), (2,)), abs=1e-12)


def test_seeded_runs_are_identical():
    P, q = instance(3)
    S = FeasibleSet("L0", P, q)
    a = minimize(Objective("R1pp", (0, 0.1)), S, MinimizeOptions(starts=6, seed=4))
    b = minimize(Objective("R1pp", (0, 0.1)), S, MinimizeOptions(starts=6, seed=4))
    assert a.value == b.value and a.start_values == b.start_values


def test_unknown_kinds_rejected():
    P, q = instance(0)
    with pytest.raises(ValueError):
        FeasibleSet("L9", P, q)
    with pytest.raises(KeyError):
        Objective("no_such_objective")


def test_grid_oracle_dimension_cap():
    P, q = instance(0, ky=3)
    with pytest.raises(ResourceError):
        grid_oracle(Objective("MI_X1_Y"), FeasibleSet("K", P, q), 10, max_dim=2)


@pytest.mark.parametrize("inner,kind", [("L2", "E2_inner"), ("L1", "E1bin_inner"),
                                        ("L0", "E1sup_inner"), ("L0", "E0b_inner")])
def test_nested_solver_against_refined_grid(inner, kind):
    P, q = instance(7)
    S = NestedSet(P, q, inner)
    objs = [Objective(kind, r) for r in [(0.0, 0.0), (0.1, 0.2)]]
    grids = grid_oracle_many(objs, S, resolution=12, max_dim=8, refine=True)
    for o, g in zip(objs, grids):
        r = minimize_nested(o, S)
        assert S.contains(*r.argmin)
        assert abs(r.value - g.value) <= g.error_bound + 1e-6
        assert r.value <= g.value + 1e-6
