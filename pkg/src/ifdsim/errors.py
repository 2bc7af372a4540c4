"""Exception types shared across the package."""


class NonHermitianInput(ValueError):
    """A spectral vector violated Hermitian symmetry beyond tolerance."""


class QuadratureFailure(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


class NotPositiveDefinite(ValueError):
    """A covariance operator has a non-positive eigenvalue beyond tolerance."""


class SingularGram(RuntimeError):
    """The data-space covariance could not be solved against."""


class GridMismatch(ValueError):
    """Two fields live on incommensurate grids."""


class ConfigError(ValueError):
    """An experiment configuration is malformed."""
