"""Sparse recovery of nonnegative signals with very sparse stable random projections."""
from .analysis import ComplexityQuery, ComplexityResult, h_poisson, optimize_lambda
from .codec import DesignParams, Estimate, Measurements, Signal, decode_min, encode, generate_signal
from .experiments import ExperimentConfig, run_experiment
from .ratio_cdf import QuadratureSpec, cdf_ratio
from .rng import RngStream, derive_stream
from .stable_sampler import SamplingOverflowError, StableParams, sample_stable

__all__ = [
    "ComplexityQuery", "ComplexityResult", "DesignParams", "Estimate", "ExperimentConfig",
    "Measurements", "QuadratureSpec", "RngStream", "SamplingOverflowError", "Signal", "StableParams",
    "cdf_ratio", "decode_min", "derive_stream", "encode", "generate_signal", "h_poisson",
    "optimize_lambda", "run_experiment", "sample_stable",
]
