"""Random-code ensembles: Monte Carlo simulation and exact small-n error probabilities."""
from .config import SCHEMES, EnsembleConfig, codebook_size, type_counts
from .draws import draw_conditional, draw_from_type
from .exact import DEFAULT_EXACT_CAP, TIE_TOL, exact_bin_fail, exact_pe1_sup, exact_pe2_sup
from .simulate import SimReport, default_workers, simulate

__all__ = [
    "SCHEMES", "EnsembleConfig", "codebook_size", "type_counts", "draw_conditional",
    "draw_from_type", "DEFAULT_EXACT_CAP", "TIE_TOL", "exact_bin_fail", "exact_pe1_sup",
    "exact_pe2_sup", "SimReport", "default_workers", "simulate",
]
