"""Rate regions at a fixed input distribution, their hulls over inputs and single-user bounds."""
from .channels import induced_mac, parallel_channel, random_channel, random_input
from .curves import (RegionCurve, rate_split_closure, region_bin, region_bin_star,
                     region_bin_tilde, region_lm, region_matched, region_sup, region_sup_tilde)
from .primitives import RatePrimitives, RegionOptions, rate_primitives
from .hull import hull_over_inputs, upper_envelope
from .single_user import SingleUserBound, lapidoth_su_bound, single_user_bound
