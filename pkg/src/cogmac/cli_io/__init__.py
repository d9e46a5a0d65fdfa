"""Problem files, run manifests and the ``cogmac`` command line."""
from .manifest import RunManifest
from .problem import ProblemError, ProblemFile, SingleUserBlock

__all__ = ["RunManifest", "ProblemError", "ProblemFile", "SingleUserBlock"]
