"""Tandem M/M/1 authentication-latency simulator (C++ core)."""

from ._authsim import (
    AuthsimError,
    EmptySampleError,
    ParameterError,
    ScenarioConfig,
    ServiceDistribution,
    StabilityError,
    cascade_mean_sojourn,
    cascade_quantile,
    cascade_sojourn_cdf,
    evaluate_point,
    mm1_mean_sojourn,
    protocol_check,
    replication_ci,
    run_scenario,
    summarize,
    transmission_time,
)

__all__ = [
    "AuthsimError",
    "EmptySampleError",
    "ParameterError",
    "ScenarioConfig",
    "ServiceDistribution",
    "StabilityError",
    "cascade_mean_sojourn",
    "cascade_quantile",
    "cascade_sojourn_cdf",
    "evaluate_point",
    "mm1_mean_sojourn",
    "protocol_check",
    "replication_ci",
    "run_scenario",
    "summarize",
    "transmission_time",
]
