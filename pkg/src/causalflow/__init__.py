"""causalflow: directed information, transfer entropy and Granger-Geweke
causality for multivariate Gaussian time series.

The toolkit evaluates information flow both in closed form from AR(1) network
specifications and empirically from recorded panels, and infers directed
causal graphs with or without causal conditioning on the remaining channels.
"""

from .analytic import (
    BivariateMeasures,
    BivariateRates,
    StationaryMoments,
    TrivariateCaseRates,
    bivariate_closed_forms,
    bivariate_marginal_variance_forms,
    bivariate_marginal_variance_rates,
    bivariate_rates,
    solve_lyapunov,
    trivariate_case_rates,
)
from .empirical import empirical_rate, empirical_rate_value, monte_carlo_rate
from .engine import (
    PredictionError,
    conditional_mutual_information,
    gaussian_entropy,
    prediction_error,
)
from .errors import (
    CausalflowError,
    DimensionMismatch,
    InsufficientData,
    NoConvergence,
    NonStationary,
    SingularCovariance,
    TopologyMismatch,
    UnknownChannel,
)
from .inference import infer_graph, surrogate_null
from .measures import (
    ConditioningMode,
    delayed_directed_information,
    directed_information,
    geweke_index,
    instantaneous_information_exchange,
    measure_rate,
    mutual_information_block,
    transfer_entropy,
)
from .model import (
    RATE,
    ARProcessSpec,
    CausalGraph,
    GaussianJointModel,
    MeasureReport,
    TimeSeriesPanel,
    VariableSelector,
    bivariate_spec,
    build_window_model,
    stationary_covariance,
    trivariate_chain_spec,
)
from .simulate import SimulationConfig, estimate_window_covariance, simulate

__version__ = "0.1.0"

__all__ = [
    "ARProcessSpec", "BivariateMeasures", "BivariateRates", "CausalGraph",
    "CausalflowError", "ConditioningMode", "DimensionMismatch",
    "GaussianJointModel", "InsufficientData", "MeasureReport", "NoConvergence",
    "NonStationary", "PredictionError", "RATE", "SimulationConfig",
    "SingularCovariance", "StationaryMoments", "TimeSeriesPanel",
    "TopologyMismatch", "TrivariateCaseRates", "UnknownChannel",
    "VariableSelector", "bivariate_closed_forms",
    "bivariate_marginal_variance_forms", "bivariate_marginal_variance_rates",
    "bivariate_rates", "bivariate_spec", "build_window_model",
    "conditional_mutual_information", "delayed_directed_information",
    "directed_information", "empirical_rate", "empirical_rate_value",
    "estimate_window_covariance", "gaussian_entropy", "geweke_index",
    "infer_graph", "instantaneous_information_exchange", "measure_rate",
    "monte_carlo_rate", "mutual_information_block", "prediction_error",
    "simulate", "solve_lyapunov", "stationary_covariance", "surrogate_null",
    "transfer_entropy", "trivariate_case_rates", "trivariate_chain_spec",
]
