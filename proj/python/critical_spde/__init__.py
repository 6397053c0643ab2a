"""Spectral Galerkin experiments for SPDEs with critical drift."""

from ._core import (
    Drift,
    ScalarFunction,
    Spectrum,
    bound_constants,
    config_reference,
    custom_spectrum,
    emit_config,
    experiment_names,
    lambda_op_coeffs,
    make_spectrum,
    moments,
    ou_derivative,
    ou_eval,
    qt_variances,
    resolvent_eval,
    run_config,
    set_worker_count,
    simulate_path,
    worker_count,
)

__all__ = [
    "Drift",
    "ScalarFunction",
    "Spectrum",
    "bound_constants",
    "config_reference",
    "custom_spectrum",
    "emit_config",
    "experiment_names",
    "lambda_op_coeffs",
    "make_spectrum",
    "moments",
    "ou_derivative",
    "ou_eval",
    "qt_variances",
    "resolvent_eval",
    "run_config",
    "set_worker_count",
    "simulate_path",
    "worker_count",
]
