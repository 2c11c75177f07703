"""Exception types shared across the package."""


class RenewcovError(Exception):
    """Base class for all renewcov errors."""


class UnsupportedOrderError(RenewcovError):
    """A moment of higher order than the supported cap was requested."""


class ModelError(RenewcovError):
    """Invalid model definition: bad parameters, malformed forms, bad input."""


class ModelParseError(ModelError):
    """A model file could not be parsed into a valid specification."""


class ConsistencyError(RenewcovError):
    """An internal cross-check failed; indicates a bug, not a user error."""


class DimensionError(RenewcovError):
    """Operation is only defined for a specific number of reward coordinates."""


class NotPositiveDefiniteError(RenewcovError):
    """Covariance matrix at the requested time is not positive definite.

    Carries the threshold ``t0`` beyond which the matrix becomes PD (None
    when the rate matrix is degenerate and no threshold exists).
    """

    def __init__(self, message, t0=None):
        super().__init__(message)
        self.t0 = t0


class RunawayPathError(RenewcovError):
    """A simulated path exceeded the configured cycle budget."""

    def __init__(self, message, block_index=None, seed=None):
        super().__init__(message)
        self.block_index = block_index
        self.seed = seed
