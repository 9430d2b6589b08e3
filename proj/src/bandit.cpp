#include "dopa/bandit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <thread>

#include "dopa/errors.hpp"
#include "dopa/noise.hpp"
#include "dopa/sampler.hpp"

namespace dopa {

namespace {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

MarginalFamily family_for_round(const Policy& policy, int t, int arms,
                                int horizon) {
  if (policy.schedule == EtaSchedule::GammaSqrt) {
    // Reweight the hybrid components by sqrt(t) and keep eta = 1.
    const auto* hybrid =
        dynamic_cast<const HybridGenerator*>(policy.generator.get());
    if (!hybrid) {
      throw ConfigError(
          "policy: the sqrt-gamma schedule needs a hybrid generator");
    }
    const double gamma = std::sqrt(static_cast<double>(t));
    std::vector<HybridGenerator::Component> parts = hybrid->components();
    for (auto& [w, g] : parts) w *= gamma;
    return MarginalFamily(harmonic_combine(std::move(parts)), 1.0, arms);
  }
  return MarginalFamily(policy.generator,
                        schedule_eta(policy, t, arms, horizon), arms);
}

}  // namespace

const char* policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::DopaStatic: return "dopa_static";
    case PolicyKind::DopaAnytime: return "dopa_anytime";
    case PolicyKind::FtrlBaseline: return "ftrl_baseline";
    case PolicyKind::Exp3: return "exp3";
    case PolicyKind::Ftl: return "ftl";
    case PolicyKind::FtplOptimistic: return "ftpl_optimistic";
  }
  return "unknown";
}

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "dopa_static") return PolicyKind::DopaStatic;
  if (name == "dopa_anytime") return PolicyKind::DopaAnytime;
  if (name == "ftrl_baseline") return PolicyKind::FtrlBaseline;
  if (name == "exp3") return PolicyKind::Exp3;
  if (name == "ftl") return PolicyKind::Ftl;
  if (name == "ftpl_optimistic") return PolicyKind::FtplOptimistic;
  throw ConfigError("unknown policy kind '" + name + "'");
}

std::string Policy::describe() const {
  std::string out = policy_kind_name(kind);
  if (kind == PolicyKind::Ftl) return out;
  out += "[";
  if (generator) out += generator->name();
  switch (schedule) {
    case EtaSchedule::Constant:
      out += ";eta=" + format_number(eta);
      break;
    case EtaSchedule::TunedHorizon:
      out += ";eta=tuned(alpha=" + format_number(alpha) + ")";
      break;
    case EtaSchedule::AnytimeSqrt:
      out += ";eta=2*sqrt(t)";
      break;
    case EtaSchedule::GammaSqrt:
      out += ";gamma=sqrt(t)";
      break;
  }
  out += ";epsilon=" + format_number(epsilon) + "]";
  return out;
}

double schedule_eta(const Policy& policy, int t, int arms, int horizon) {
  switch (policy.schedule) {
    case EtaSchedule::Constant:
      return policy.eta;
    case EtaSchedule::TunedHorizon: {
      if (horizon < 1) {
        throw ConfigError("policy: tuned eta needs a positive horizon");
      }
      const double a = policy.alpha;
      return std::sqrt(horizon * (1.0 - a) / (2.0 * a)) *
             std::pow(static_cast<double>(arms), a - 0.5);
    }
    case EtaSchedule::AnytimeSqrt:
      return 2.0 * std::sqrt(static_cast<double>(t));
    case EtaSchedule::GammaSqrt:
      return 1.0;
  }
  throw ConfigError("policy: unknown schedule");
}

std::vector<double> next_distribution(const Policy& policy,
                                      const LearnerState& state, int horizon) {
  const int K = static_cast<int>(state.u_hat.size());
  if (K < 1) throw InputError("next_distribution: empty state");

  switch (policy.kind) {
    case PolicyKind::Ftl: {
      // Argmax indicator; lowest index wins ties.
      int best = 0;
      for (int k = 1; k < K; ++k) {
        if (state.u_hat[k] > state.u_hat[best]) best = k;
      }
      std::vector<double> p(K, 0.0);
      p[best] = 1.0;
      return p;
    }
    case PolicyKind::Exp3:
      return exp3_closed_form(state.u_hat,
                              schedule_eta(policy, state.t, K, horizon));
    case PolicyKind::DopaStatic:
    case PolicyKind::DopaAnytime: {
      MarginalFamily fam = family_for_round(policy, state.t, K, horizon);
      std::optional<double> delta = policy.delta_override;
      if (!delta && !fam.generator().lipschitz_bound()) {
        double L;
        if (policy.lipschitz_hint) {
          L = *policy.lipschitz_hint;
          if (policy.schedule == EtaSchedule::GammaSqrt) {
            // Reweighting by gamma scales every quantile slope by gamma, so
            // the density bound shrinks by the same factor.
            L /= std::sqrt(static_cast<double>(state.t));
          }
        } else {
          L = estimate_lipschitz(fam.generator());
        }
        delta = policy.epsilon * fam.min_eta() / (2.0 * L * std::sqrt(K));
      }
      ArmSamplingRequest req{state.u_hat, std::move(fam), policy.epsilon,
                             delta};
      return bisection_sample(req).p_hat;
    }
    case PolicyKind::FtrlBaseline: {
      ArmSamplingRequest req{state.u_hat,
                             family_for_round(policy, state.t, K, horizon),
                             policy.epsilon, policy.delta_override};
      return generic_convex_baseline(req).p_hat;
    }
    case PolicyKind::FtplOptimistic: {
      return build_noise_model(state.u_hat,
                               family_for_round(policy, state.t, K, horizon),
                               policy.epsilon)
          .p;
    }
  }
  throw ConfigError("next_distribution: unknown policy kind");
}

RewardEstimate estimate_reward(int chosen, double reward, double p_chosen) {
  if (!(p_chosen > 0.0)) {
    throw InputError(
        "estimate_reward: sampling probability must be positive (sampler "
        "positivity violated), got " +
        std::to_string(p_chosen));
  }
  if (!(reward >= -1.0 && reward <= 0.0)) {
    throw InputError("estimate_reward: reward " + std::to_string(reward) +
                     " outside [-1,0]");
  }
  return RewardEstimate{chosen, reward / p_chosen, p_chosen};
}

int sample_from(const std::vector<double>& probs, double uniform01) {
  double cum = 0.0;
  const int K = static_cast<int>(probs.size());
  for (int k = 0; k < K; ++k) {
    cum += probs[k];
    if (uniform01 < cum) return k;
  }
  // Fell off the end through rounding; return the last positive-mass arm.
  for (int k = K - 1; k >= 0; --k) {
    if (probs[k] > 0.0) return k;
  }
  throw InputError("sample_from: zero probability vector");
}

RunTrace run_episode(const Policy& policy, Environment& env, int horizon,
                     std::uint64_t seed) {
  if (horizon < 1) throw InputError("run_episode: horizon must be >= 1");
  const int K = env.arms();

  env.reset(SplitMix64::derive(seed, 1));
  SplitMix64 learner_rng(SplitMix64::derive(seed, 0));

  RunTrace trace;
  trace.seed = seed;
  trace.policy = policy.describe();
  trace.env = env.describe();
  trace.rng_algorithm = kRngAlgorithm;
  trace.rounds.reserve(horizon);

  LearnerState state;
  state.u_hat.assign(K, 0.0);
  RegretLedger ledger(K, env.gaps());
  History history;

  for (int t = 1; t <= horizon; ++t) {
    state.t = t;
    try {
      std::vector<double> r = env.rewards(t, history);
      if (static_cast<int>(r.size()) != K) {
        throw EnvError(env.describe() + ": wrong reward dimension");
      }
      check_reward_range(r, env.describe());

      const std::vector<double> p = next_distribution(policy, state, horizon);
      const int arm = sample_from(p, learner_rng.next_open01());
      ledger.record(t, arm, r, p);

      const RewardEstimate est = estimate_reward(arm, r[arm], p[arm]);
      state.u_hat[arm] += est.value;

      trace.rounds.push_back(RoundRecord{t, arm, r[arm], p[arm],
                                         ledger.last_increment(),
                                         ledger.cumulative()});
      history.arms.push_back(arm);
      history.rewards.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error("episode aborted at round " + std::to_string(t) + " of " +
                  std::to_string(horizon) + " (seed " + std::to_string(seed) +
                  ", " + std::to_string(trace.rounds.size()) +
                  " rounds completed): " + e.what());
    }
  }
  return trace;
}

BatchResult run_batch(const Policy& policy, const EnvFactory& env_factory,
                      int horizon, const std::vector<std::uint64_t>& seeds,
                      int threads) {
  if (seeds.empty()) throw InputError("run_batch: need at least one seed");
  if (!env_factory) throw InputError("run_batch: null environment factory");

  const int n = static_cast<int>(seeds.size());
  BatchResult result;
  result.traces.resize(n);

  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);

  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      auto env = env_factory();
      result.traces[i] = run_episode(policy, *env, horizon, seeds[i]);
    }
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (int i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) {
          auto env = env_factory();
          result.traces[i] = run_episode(policy, *env, horizon, seeds[i]);
        }
      }));
    }
    for (auto& f : futures) f.get();  // rethrows any episode failure
  }

  AggregateStats& stats = result.stats;
  stats.horizon = horizon;
  stats.seed_count = n;
  stats.mean.assign(horizon, 0.0);
  stats.min.assign(horizon, std::numeric_limits<double>::infinity());
  stats.max.assign(horizon, -std::numeric_limits<double>::infinity());
  stats.stderr_mean.assign(horizon, 0.0);
  std::vector<double> sq(horizon, 0.0);
  for (const RunTrace& trace : result.traces) {
    for (int t = 0; t < horizon; ++t) {
      const double v = trace.rounds[t].cum_regret;
      stats.mean[t] += v;
      sq[t] += v * v;
      stats.min[t] = std::min(stats.min[t], v);
      stats.max[t] = std::max(stats.max[t], v);
    }
  }
  for (int t = 0; t < horizon; ++t) {
    stats.mean[t] /= n;
    if (n > 1) {
      const double var =
          std::max(0.0, (sq[t] - n * stats.mean[t] * stats.mean[t]) / (n - 1));
      stats.stderr_mean[t] = std::sqrt(var / n);
    }
  }
  return result;
}

}  // namespace dopa
