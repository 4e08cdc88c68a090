"""Finite higher-rank graphs, circle-valued cocycles on their path categories,
and exact finite-dimensional models of the associated twisted operator algebras."""

__version__ = "0.1.0"

from . import degrees
from .cocycle import Cocycle, check_cocycle, trivial_cocycle
from .errors import KgtError
from .kgraph import (
    Edge,
    KGraph,
    KGraphSkeleton,
    Path,
    builtin_fixtures,
    make_skeleton,
    validate_skeleton,
)
from .phases import Phase
from .verify import SuiteConfig, run_suite

__all__ = [
    "Cocycle",
    "Edge",
    "KGraph",
    "KGraphSkeleton",
    "KgtError",
    "Path",
    "Phase",
    "SuiteConfig",
    "builtin_fixtures",
    "check_cocycle",
    "degrees",
    "make_skeleton",
    "run_suite",
    "trivial_cocycle",
    "validate_skeleton",
    "__version__",
]
