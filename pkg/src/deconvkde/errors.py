"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Inconsistent kernel, density or experiment configuration."""


class NumericalRegimeError(OverflowError):
    """The requested noise/bandwidth ratio cannot be represented in doubles.

    ``max_ratio`` is the largest supported value of ``r = sigma / h`` for the
    error model involved, when known.
    """

    def __init__(self, message, max_ratio=None):
        super().__init__(message)
        self.max_ratio = max_ratio


class BandwidthBoundaryError(RuntimeError):
    """The MISE minimum sits on the upper end of the bandwidth grid."""


class ReplicationError(RuntimeError):
    """A Monte Carlo replication failed; ``index`` identifies it."""

    def __init__(self, index, cause):
        super().__init__(f"replication {index} failed: {cause}")
        self.index = index
