"""Exception hierarchy shared by all causalflow modules."""


class CausalflowError(Exception):
    """Base class for all causalflow errors."""


class NonStationary(CausalflowError):
    """Coupling matrix has spectral radius at or above the stationarity bound."""


class DimensionMismatch(CausalflowError):
    """Matrix or panel dimensions are inconsistent with the declared layout."""


class UnknownChannel(CausalflowError):
    """A channel name does not exist in the model, spec or panel."""


class SingularCovariance(CausalflowError):
    """A covariance block could not be factored even after the jitter retry."""


class InsufficientData(CausalflowError):
    """Not enough samples, windows or surrogates for the requested estimate."""


class NoConvergence(CausalflowError):
    """A horizon-doubling limit did not converge within the allowed horizon."""


class TopologyMismatch(CausalflowError):
    """An AR spec's zero pattern contradicts the requested network topology."""
