"""Ensemble parameters: blocklength, rates, codebook sizes and the input type."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..prob_core import InputDist, ResourceError, mutual_info, quantize_to_type

SCHEMES = ("superposition", "binning")


def codebook_size(n: int, R: float) -> int:
    """ceil(2^(nR)); exponents within 1e-9 of an integer count as that integer."""
    if R < 0:
        raise ValueError("rates must be nonnegative")
    x = n * R
    if abs(x - round(x)) < 1e-9:
        x = float(round(x))
    if x > 62:
        raise ResourceError(f"codebook of 2^{x:.1f} codewords is not representable")
    return max(1, math.ceil(2.0 ** x))


def type_counts(P, n: int) -> np.ndarray:
    """Joint X1X2 counts of the n-type nearest to ``P`` (largest remainder)."""
    p = P.p12 if isinstance(P, InputDist) else np.asarray(P)
    if p.ndim != 2:
        raise ValueError("input distribution must be a 2-D table")
    if np.issubdtype(p.dtype, np.integer):
        if int(p.sum()) != n or np.any(p < 0):
            raise ValueError("integer counts must be nonnegative and sum to n")
        return p.astype(np.int64)
    return quantize_to_type(InputDist.renormalize(p).p12, n)


@dataclass(frozen=True)
class EnsembleConfig:
    """One constant-composition ensemble.

    ``P`` is quantized to an n-type on construction; ``gamma`` defaults to
    I(X1;X2) of the quantized type plus n^(-1/2).
    """
    scheme: str
    n: int
    R1: float
    R2: float
    P: object
    gamma: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.n < 1:
            raise ValueError("blocklength must be positive")
        counts = type_counts(self.P, self.n)
        counts.setflags(write=False)
        object.__setattr__(self, "P", counts)
        if self.gamma is None:
            g = mutual_info((counts / self.n)[:, :, None], (0,), (1,)) + self.n ** -0.5
            object.__setattr__(self, "gamma", float(g))
        elif self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        for r in (self.R1, self.R2):
            codebook_size(self.n, r)

    @property
    def counts(self) -> np.ndarray:
        return self.P

    @property
    def input(self) -> InputDist:
        return InputDist(self.P / self.n)

    @property
    def M1(self) -> int:
        return codebook_size(self.n, self.R1)

    @property
    def M2(self) -> int:
        return codebook_size(self.n, self.R2)

    @property
    def K(self) -> int:
        """Codewords per bin (binning only)."""
        return codebook_size(self.n, self.gamma) if self.scheme == "binning" else 1

    def as_dict(self) -> dict:
        return {"scheme": self.scheme, "n": self.n, "R1": self.R1, "R2": self.R2,
                "P_counts": self.P.tolist(), "gamma": self.gamma, "seed": self.seed,
                "M1": self.M1, "M2": self.M2, "K": self.K}
