#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dopa/environments.hpp"
#include "dopa/generators.hpp"
#include "dopa/rng.hpp"

namespace dopa {

enum class PolicyKind {
  DopaStatic,      // bisection sampler, fixed or horizon-tuned scale
  DopaAnytime,     // bisection sampler, eta_t = 2 sqrt(t)
  FtrlBaseline,    // generic convex solver on the Tsallis objective
  Exp3,            // softmax closed form
  Ftl,             // argmax indicator, lowest index on ties
  FtplOptimistic,  // noise-model mixture weights (distinct code path)
};

enum class EtaSchedule {
  Constant,      // eta
  TunedHorizon,  // sqrt(T (1-alpha) / (2 alpha)) * K^(alpha - 1/2)
  AnytimeSqrt,   // eta_t = 2 sqrt(t)
  GammaSqrt,     // hybrid weights scaled by sqrt(t), eta = 1
};

struct Policy {
  PolicyKind kind = PolicyKind::DopaStatic;
  GeneratorPtr generator;  // unused by ftl
  EtaSchedule schedule = EtaSchedule::Constant;
  double eta = 1.0;
  double epsilon = 1e-8;
  double alpha = 0.5;  // Tsallis parameter for ftrl_baseline / tuned eta
  // Explicit bisection resolution, taken verbatim when set.
  std::optional<double> delta_override{};
  // Numeric stand-in for a missing closed-form Lipschitz bound, measured at
  // the generator's base weights; the per-round resolution is derived from
  // it. Estimated on demand when absent.
  std::optional<double> lipschitz_hint{};

  std::string describe() const;
};

const char* policy_kind_name(PolicyKind kind);
PolicyKind policy_kind_from_name(const std::string& name);

// Scale for round t (1-based). TunedHorizon needs the horizon.
double schedule_eta(const Policy& policy, int t, int arms, int horizon);

struct LearnerState {
  std::vector<double> u_hat;  // cumulative reward estimates, start at zero
  int t = 1;                  // round index
};

// The per-round arm distribution of the policy at the given state. Always a
// simplex vector; strictly positive for the dopa / exp3 / ftrl policies.
std::vector<double> next_distribution(const Policy& policy,
                                      const LearnerState& state, int horizon);

struct RewardEstimate {
  int arm = 0;
  double value = 0.0;        // reward / probability, <= 0
  double probability = 0.0;  // sampling probability actually used
};

// Importance-weighted single-round estimate. Throws InputError when the
// probability is not positive or the reward leaves [-1, 0].
RewardEstimate estimate_reward(int chosen, double reward, double p_chosen);

struct RoundRecord {
  int t = 0;
  int arm = 0;
  double reward = 0.0;
  double probability = 0.0;
  double regret_increment = 0.0;
  double cum_regret = 0.0;
};

struct RunTrace {
  std::uint64_t seed = 0;
  std::string policy;
  std::string env;
  std::string rng_algorithm;
  std::vector<RoundRecord> rounds;

  double final_regret() const {
    return rounds.empty() ? 0.0 : rounds.back().cum_regret;
  }
};

// Inverse-CDF draw from a probability vector; ties toward the lower index.
int sample_from(const std::vector<double>& probs, double uniform01);

// One seeded episode of the prediction loop: query the environment, sample
// an arm from the potential gradient, update the estimate. Deterministic in
// (policy, environment, horizon, seed).
RunTrace run_episode(const Policy& policy, Environment& env, int horizon,
                     std::uint64_t seed);

struct AggregateStats {
  std::vector<double> mean;    // per-round cumulative pseudo-regret stats
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> stderr_mean;
  int horizon = 0;
  int seed_count = 0;

  double final_mean() const { return mean.empty() ? 0.0 : mean.back(); }
  double final_stderr() const {
    return stderr_mean.empty() ? 0.0 : stderr_mean.back();
  }
};

struct BatchResult {
  std::vector<RunTrace> traces;  // in seed order
  AggregateStats stats;
};

// Independent episodes, one per seed, optionally spread over threads. The
// result is identical to sequential execution.
BatchResult run_batch(const Policy& policy, const EnvFactory& env_factory,
                      int horizon, const std::vector<std::uint64_t>& seeds,
                      int threads = 0);

}  // namespace dopa
