#include "dopa/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dopa/errors.hpp"
#include "dopa/sampler.hpp"

namespace dopa {

namespace {

constexpr long long kMinValidationSamples = 10000;

}  // namespace

OptimisticNoiseModel build_noise_model(const std::vector<double>& u,
                                       const MarginalFamily& family,
                                       double epsilon) {
  ArmSamplingRequest req{u, family, std::min(epsilon, 1e-12), std::nullopt};
  ArmSamplingResult root = dual_root_newton(req);

  OptimisticNoiseModel model{family, u, std::move(root.p_hat), {}};
  const int K = family.arms();
  model.thresholds.resize(K);
  for (int k = 0; k < K; ++k) {
    const double pk = model.p[k];
    if (!(pk > 0.0 && pk < 1.0)) {
      throw ModelError("noise model degenerate: arm " + std::to_string(k) +
                       " has probability " + std::to_string(pk) +
                       "; truncation at a 0/1 quantile is undefined");
    }
    // F_k^{-1}(1 - p_k) = -eta_k F^{-1}(p_k); evaluating the generator
    // quantile at p_k directly avoids the 1-(1-p) cancellation.
    model.thresholds[k] = -family.eta(k) * family.generator().quantile(pk);
  }
  return model;
}

NoiseSample sample_noise(const OptimisticNoiseModel& model, SplitMix64& rng) {
  const int K = model.family.arms();
  NoiseSample out;
  out.z.resize(K);

  // Component draw: inverse-CDF over the mixture weights with one uniform.
  const double uc = rng.next_open01();
  int comp = K - 1;
  double cum = 0.0;
  for (int k = 0; k < K; ++k) {
    cum += model.p[k];
    if (uc < cum) {
      comp = k;
      break;
    }
  }
  out.component = comp;

  for (int k = 0; k < K; ++k) {
    const double v = rng.next_open01();
    const double pk = model.p[k];
    if (k == comp) {
      // Upper tail: the CDF argument is x = (1-p_k) + v p_k, whose complement
      // 1 - x = p_k (1 - v) is formed directly so a tiny p_k cannot round the
      // argument onto the closed endpoint.
      const double complement =
          std::max(pk * (1.0 - v), std::numeric_limits<double>::min());
      out.z[k] =
          -model.family.eta(k) * model.family.generator().quantile(complement);
    } else {
      out.z[k] = model.family.quantile(k, v * (1.0 - pk));  // lower part
    }
  }
  return out;
}

int perturbed_argmax(const std::vector<double>& u, const std::vector<double>& z,
                     int component) {
  int best = component;
  double best_v = u[component] + z[component];
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = u[k] + z[k];
    if (v > best_v) {
      best = static_cast<int>(k);
      best_v = v;
    }
  }
  return best;
}

ValidationReport validate_argmax_frequencies(const OptimisticNoiseModel& model,
                                             long long n, SplitMix64& rng) {
  if (n < kMinValidationSamples) {
    throw InputError("validate_argmax_frequencies: need n >= " +
                     std::to_string(kMinValidationSamples) + ", got " +
                     std::to_string(n));
  }
  const int K = model.family.arms();
  std::vector<long long> counts(K, 0);
  long long mismatches = 0;
  for (long long i = 0; i < n; ++i) {
    const NoiseSample s = sample_noise(model, rng);
    const int winner = perturbed_argmax(model.u, s.z, s.component);
    if (winner != s.component) ++mismatches;
    ++counts[winner];
  }

  ValidationReport report;
  report.samples = n;
  report.argmax_mismatches = mismatches;
  report.arms.resize(K);
  for (int k = 0; k < K; ++k) {
    const double pk = model.p[k];
    const double freq =
        static_cast<double>(counts[k]) / static_cast<double>(n);
    const double se = std::sqrt(pk * (1.0 - pk) / static_cast<double>(n));
    ArmFrequency& row = report.arms[k];
    row.arm = k;
    row.frequency = freq;
    row.probability = pk;
    row.z_score = se > 0.0 ? (freq - pk) / se : 0.0;
    report.max_abs_z = std::max(report.max_abs_z, std::abs(row.z_score));
  }
  report.passed = report.max_abs_z <= 4.0 && mismatches == 0;
  return report;
}

}  // namespace dopa
