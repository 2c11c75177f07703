"""renewcov: moments, asymptotics, and simulation of multivariate
renewal-reward processes.

Workflow: declare a model (cycle length and reward coordinates as affine
combinations of shared independent primitives), get its exact cycle moments,
evaluate the mean/covariance expansion constants, build the refined normal
approximation, and validate everything against the built-in seeded Monte
Carlo engine.
"""

from .asymptotics import AsymptoticSummary, summarize
from .distributions import (
    MAX_MOMENT_ORDER,
    Primitive,
    deterministic,
    exponential,
    gamma,
    raw_moment,
    sample,
    uniform,
)
from .errors import (
    ConsistencyError,
    DimensionError,
    ModelError,
    ModelParseError,
    NotPositiveDefiniteError,
    RenewcovError,
    RunawayPathError,
    UnsupportedOrderError,
)
from .gaussian import GaussianApprox, expected_min_bivariate, pd_threshold
from .model import (
    ORDINARY,
    SAME_AS_CYCLE,
    AffineForm,
    CycleMoments,
    DelayCycle,
    ModelSpec,
    cycle_moments,
    form,
    joint_moment,
    sample_cycle,
    sample_cycles,
    sample_delay,
)
from .simulate import CompareTable, SimConfig, SimEstimate, compare, simulate

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AffineForm",
    "AsymptoticSummary",
    "CompareTable",
    "ConsistencyError",
    "CycleMoments",
    "DelayCycle",
    "DimensionError",
    "GaussianApprox",
    "MAX_MOMENT_ORDER",
    "ModelError",
    "ModelParseError",
    "ModelSpec",
    "NotPositiveDefiniteError",
    "ORDINARY",
    "Primitive",
    "RenewcovError",
    "RunawayPathError",
    "SAME_AS_CYCLE",
    "SimConfig",
    "SimEstimate",
    "UnsupportedOrderError",
    "compare",
    "cycle_moments",
    "deterministic",
    "expected_min_bivariate",
    "exponential",
    "form",
    "gamma",
    "joint_moment",
    "pd_threshold",
    "raw_moment",
    "sample",
    "sample_cycle",
    "sample_cycles",
    "sample_delay",
    "simulate",
    "summarize",
    "uniform",
]
