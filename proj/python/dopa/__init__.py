"""Optimistic-perturbation bandits.

Thin wrapper over the compiled ``_dopa`` extension: arm sampling via
dual-threshold bisection over marginal ambiguity sets, the explicit
optimistic noise model, and a seeded simulation harness.
"""

from _dopa import (
    ConfigError,
    DomainError,
    Generator,
    InputError,
    ModelError,
    NoiseModel,
    RangeError,
    bisection_sample,
    build_noise_model,
    convex_baseline,
    dual_root_newton,
    exp3_probabilities,
    make_generator,
    potential_value,
    rng_algorithm,
    run_batch,
    run_bench,
    run_episode,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Generator",
    "InputError",
    "ModelError",
    "NoiseModel",
    "RangeError",
    "bisection_sample",
    "build_noise_model",
    "convex_baseline",
    "dual_root_newton",
    "exp3_probabilities",
    "make_generator",
    "potential_value",
    "rng_algorithm",
    "run_batch",
    "run_bench",
    "run_episode",
]
