#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dopa/rng.hpp"

namespace dopa {

// What an environment is allowed to see before emitting the next reward
// vector: every previously chosen arm and every full past reward vector.
// Oblivious environments simply ignore it.
struct History {
  std::vector<int> arms;
  std::vector<std::vector<double>> rewards;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual int arms() const = 0;
  virtual std::string describe() const = 0;

  // Reward vector in [-1,0]^K for round t (1-based).
  virtual std::vector<double> rewards(int t, const History& history) = 0;

  // Per-arm suboptimality gaps when the reward law declares them (stochastic
  // and constrained regimes); nullopt for scripted adversaries, where regret
  // is measured against the best fixed arm in hindsight.
  virtual std::optional<std::vector<double>> gaps() const {
    return std::nullopt;
  }

  // Reseeds internal randomness; no-op for deterministic environments.
  virtual void reset(std::uint64_t /*seed*/) {}
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

// Independent per-round draws with the given means, realized as two-point
// rewards on {-1, 0} with P(reward = 0) = 1 + mean_k.
class StochasticEnv final : public Environment {
 public:
  explicit StochasticEnv(std::vector<double> means);
  int arms() const override;
  std::string describe() const override;
  std::vector<double> rewards(int t, const History& history) override;
  std::optional<std::vector<double>> gaps() const override;
  void reset(std::uint64_t seed) override;
  const std::vector<double>& means() const { return means_; }

 private:
  std::vector<double> means_;
  std::vector<double> gaps_;
  SplitMix64 rng_{0};
};

// The deterministic two-arm trap for follow-the-leader: (-1/2, 0) in round 1,
// (-1, 0) on odd rounds after that, (0, -1) on even rounds. Extra arms beyond
// the first two always pay 0.
class FtlKillerEnv final : public Environment {
 public:
  explicit FtlKillerEnv(int arms = 2);
  int arms() const override;
  std::string describe() const override;
  std::vector<double> rewards(int t, const History& history) override;

 private:
  int arms_;
};

// Arbitrary scripted (possibly history-dependent) reward schedule.
class ScriptedEnv final : public Environment {
 public:
  using Script = std::function<std::vector<double>(int, const History&)>;
  ScriptedEnv(int arms, std::string label, Script script);
  int arms() const override;
  std::string describe() const override;
  std::vector<double> rewards(int t, const History& history) override;

 private:
  int arms_;
  std::string label_;
  Script script_;
};

// Fixed T x K reward table (rows past the table repeat the last row).
class TableEnv final : public Environment {
 public:
  TableEnv(std::string label, std::vector<std::vector<double>> rows);
  int arms() const override;
  std::string describe() const override;
  std::vector<double> rewards(int t, const History& history) override;

 private:
  std::string label_;
  std::vector<std::vector<double>> rows_;
};

// Stochastic base draws at means -gap_k, plus a deterministic corruption
// phase: during the first floor(C) rounds the best and worst arms swap
// rewards. Each corrupted round moves the comparison by at most one unit, so
// the emitted sequence satisfies the self-bounding inequality with the
// declared (gaps, C).
class ConstrainedAdversaryEnv final : public Environment {
 public:
  ConstrainedAdversaryEnv(std::vector<double> gaps, double corruption_budget);
  int arms() const override;
  std::string describe() const override;
  std::vector<double> rewards(int t, const History& history) override;
  std::optional<std::vector<double>> gaps() const override;
  void reset(std::uint64_t seed) override;
  double corruption_budget() const { return budget_; }

 private:
  std::vector<double> gaps_;
  double budget_;
  int best_arm_ = 0;
  int worst_arm_ = 0;
  SplitMix64 rng_{0};
};

// Pseudo-regret accounting for one episode. With declared gaps the cumulative
// value is the exact sum of the chosen arms' gaps; otherwise it is the
// best-fixed-arm prefix regret computed from the full reward history.
class RegretLedger {
 public:
  RegretLedger(int arms, std::optional<std::vector<double>> gaps);

  void record(int t, int arm, const std::vector<double>& reward_vector,
              const std::vector<double>& probabilities);

  double cumulative() const { return cum_regret_; }
  double last_increment() const { return last_increment_; }
  int rounds() const { return rounds_; }
  const std::vector<long long>& pull_counts() const { return pulls_; }
  const std::vector<double>& probability_sums() const { return prob_sums_; }

 private:
  std::optional<std::vector<double>> gaps_;
  std::vector<double> arm_cum_rewards_;
  std::vector<long long> pulls_;
  std::vector<double> prob_sums_;
  double learner_cum_ = 0.0;
  double cum_regret_ = 0.0;
  double last_increment_ = 0.0;
  int rounds_ = 0;
};

double pseudo_regret(const RegretLedger& ledger);

// Lower bound sum_t sum_k gap_k p_{t,k} - C implied by the self-bounding
// constraint, computed from the recorded sampling probabilities.
double self_bounding_floor(const RegretLedger& ledger,
                           const std::vector<double>& gaps,
                           double corruption_budget);

// Throws EnvError unless every component lies in [-1, 0].
void check_reward_range(const std::vector<double>& r, const std::string& who);

}  // namespace dopa
