"""Monte Carlo engine for multivariate renewal-reward paths."""

from ._backend import HAVE_COMPILED, available_backends, resolve_backend
from ._engine import (
    DEFAULT_BLOCK_SIZE,
    CompareTable,
    SimConfig,
    SimEstimate,
    compare,
    simulate,
)

__all__ = [
    "HAVE_COMPILED",
    "available_backends",
    "resolve_backend",
    "DEFAULT_BLOCK_SIZE",
    "CompareTable",
    "SimConfig",
    "SimEstimate",
    "compare",
    "simulate",
]
