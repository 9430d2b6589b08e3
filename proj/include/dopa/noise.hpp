#pragma once

#include <vector>

#include "dopa/generators.hpp"
#include "dopa/rng.hpp"

namespace dopa {

// The explicit optimistic joint noise distribution at a fixed reward
// estimate u: a mixture over arms where component k pushes arm k's noise
// above its truncation threshold and every other arm's noise at or below its
// own threshold. Perturbing u with a draw from this distribution and taking
// the argmax reproduces the sampler's arm probabilities exactly.
//
// The model depends on u: rebuilding at a different estimate changes both the
// mixture weights and the thresholds.
struct OptimisticNoiseModel {
  MarginalFamily family;
  std::vector<double> u;
  std::vector<double> p;           // mixture weights = arm probabilities at u
  std::vector<double> thresholds;  // per-arm truncation points F_k^{-1}(1-p_k)
};

// Builds the model. Arm probabilities come from the high-precision dual-root
// oracle at tolerance min(epsilon, 1e-12). Throws ModelError if any arm
// probability is 0 or 1 (the truncation would be undefined).
OptimisticNoiseModel build_noise_model(const std::vector<double>& u,
                                       const MarginalFamily& family,
                                       double epsilon);

struct NoiseSample {
  std::vector<double> z;
  int component = 0;  // mixture component the sample was drawn from
};

// Draws the mixture component with one uniform, then one coordinate per arm
// by inverse-CDF on the matching sub-interval of (0,1): (1-p_k, 1) for the
// component's arm, (0, 1-p_l) for every other arm. Never uses rejection. The
// perturbed argmax equals the component by construction.
NoiseSample sample_noise(const OptimisticNoiseModel& model, SplitMix64& rng);

// argmax of u + z; floating-point ties resolve toward the mixture component.
int perturbed_argmax(const std::vector<double>& u, const std::vector<double>& z,
                     int component);

struct ArmFrequency {
  int arm = 0;
  double frequency = 0.0;    // empirical argmax frequency
  double probability = 0.0;  // model weight p_k
  double z_score = 0.0;      // binomial standard-error units
};

struct ValidationReport {
  std::vector<ArmFrequency> arms;
  long long samples = 0;
  long long argmax_mismatches = 0;  // perturbed argmax != component
  double max_abs_z = 0.0;
  bool passed = false;  // all |z| <= 4 and no mismatches
};

// Monte-Carlo check that empirical argmax frequencies track the model
// weights. Requires n >= 10^4 (InputError otherwise).
ValidationReport validate_argmax_frequencies(const OptimisticNoiseModel& model,
                                             long long n, SplitMix64& rng);

}  // namespace dopa
