"""Optimization of information functionals over constraint sets of joint pmfs."""
from .objectives import Objective
from .oracle import GridResult, grid_oracle, grid_oracle_many
from .sets import FeasibleSet, NestedSet, Projection, project_to_set
from .solver import MinimizeOptions, OptResult, minimize, minimize_nested

__all__ = ["Objective", "FeasibleSet", "NestedSet", "Projection", "project_to_set",
           "MinimizeOptions", "OptResult", "minimize", "minimize_nested",
           "GridResult", "grid_oracle", "grid_oracle_many"]
