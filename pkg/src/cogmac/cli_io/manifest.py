"""Run manifests: everything needed to reproduce an output file exactly."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from .. import __version__

TOOL = "cogmac"


@dataclass(frozen=True)
class RunManifest:
    """Resolved parameters of one command.

    Wall-clock time and thread count live in a sidecar so that outputs stay
    byte-identical across re-runs.
    """
    command: str
    params: dict
    problem: dict
    seed: int
    solver: dict = field(default_factory=dict)
    tool: str = TOOL
    version: str = __version__

    @property
    def problem_sha256(self) -> str:
        return hashlib.sha256(canonical(self.problem).encode()).hexdigest()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["problem_sha256"] = self.problem_sha256
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        keys = ("command", "params", "problem", "seed", "solver", "tool", "version")
        missing = [k for k in keys[:4] if k not in d]
        if missing:
            raise ValueError(f"manifest lacks {missing}")
        m = cls(**{k: d[k] for k in keys if k in d})
        if "problem_sha256" in d and d["problem_sha256"] != m.problem_sha256:
            raise ValueError("manifest problem hash does not match its embedded problem")
        return m


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
