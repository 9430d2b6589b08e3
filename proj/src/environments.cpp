#include "dopa/environments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dopa/errors.hpp"

namespace dopa {

namespace {

std::vector<double> gaps_from_means(const std::vector<double>& means) {
  const double best = *std::max_element(means.begin(), means.end());
  std::vector<double> gaps(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) gaps[k] = best - means[k];
  return gaps;
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ",";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", xs[i]);
    out += buf;
  }
  return out;
}

}  // namespace

void check_reward_range(const std::vector<double>& r, const std::string& who) {
  for (double v : r) {
    if (!(v >= -1.0 && v <= 0.0)) {
      throw EnvError(who + ": reward " + std::to_string(v) +
                     " outside [-1,0]");
    }
  }
}

// -- StochasticEnv --------------------------------------------------------------

StochasticEnv::StochasticEnv(std::vector<double> means)
    : means_(std::move(means)) {
  if (means_.empty()) throw ConfigError("stochastic: needs at least one arm");
  for (double m : means_) {
    if (!(m >= -1.0 && m <= 0.0)) {
      throw ConfigError("stochastic: mean " + std::to_string(m) +
                        " outside [-1,0]");
    }
  }
  gaps_ = gaps_from_means(means_);
}

int StochasticEnv::arms() const { return static_cast<int>(means_.size()); }

std::string StochasticEnv::describe() const {
  return "stochastic(means=[" + join_numbers(means_) + "])";
}

std::vector<double> StochasticEnv::rewards(int, const History&) {
  std::vector<double> r(means_.size());
  for (std::size_t k = 0; k < means_.size(); ++k) {
    // P(0) = 1 + mean, P(-1) = -mean.
    r[k] = rng_.next_open01() < 1.0 + means_[k] ? 0.0 : -1.0;
  }
  return r;
}

std::optional<std::vector<double>> StochasticEnv::gaps() const {
  return gaps_;
}

void StochasticEnv::reset(std::uint64_t seed) { rng_ = SplitMix64(seed); }

// -- FtlKillerEnv ---------------------------------------------------------------

FtlKillerEnv::FtlKillerEnv(int arms) : arms_(arms) {
  if (arms_ < 2) throw ConfigError("ftl_killer: needs at least two arms");
}

int FtlKillerEnv::arms() const { return arms_; }

std::string FtlKillerEnv::describe() const {
  return arms_ == 2 ? "ftl_killer"
                    : "ftl_killer(arms=" + std::to_string(arms_) + ")";
}

std::vector<double> FtlKillerEnv::rewards(int t, const History&) {
  std::vector<double> r(arms_, 0.0);
  if (t == 1) {
    r[0] = -0.5;
  } else if (t % 2 == 1) {
    r[0] = -1.0;
  } else {
    r[1] = -1.0;
  }
  return r;
}

// -- ScriptedEnv ----------------------------------------------------------------

ScriptedEnv::ScriptedEnv(int arms, std::string label, Script script)
    : arms_(arms), label_(std::move(label)), script_(std::move(script)) {
  if (arms_ < 1) throw ConfigError("script: needs at least one arm");
  if (!script_) throw ConfigError("script: empty script");
}

int ScriptedEnv::arms() const { return arms_; }

std::string ScriptedEnv::describe() const { return "script(" + label_ + ")"; }

std::vector<double> ScriptedEnv::rewards(int t, const History& history) {
  std::vector<double> r = script_(t, history);
  if (static_cast<int>(r.size()) != arms_) {
    throw EnvError(describe() + ": script emitted " +
                   std::to_string(r.size()) + " rewards, expected " +
                   std::to_string(arms_));
  }
  check_reward_range(r, describe());
  return r;
}

// -- TableEnv -------------------------------------------------------------------

TableEnv::TableEnv(std::string label, std::vector<std::vector<double>> rows)
    : label_(std::move(label)), rows_(std::move(rows)) {
  if (rows_.empty()) throw ConfigError("table env: no rows");
  const std::size_t k = rows_.front().size();
  if (k == 0) throw ConfigError("table env: empty row");
  for (const auto& row : rows_) {
    if (row.size() != k) throw ConfigError("table env: ragged rows");
    for (double v : row) {
      if (!(v >= -1.0 && v <= 0.0)) {
        throw ConfigError("table env " + label_ + ": reward " +
                          std::to_string(v) + " outside [-1,0]");
      }
    }
  }
}

int TableEnv::arms() const { return static_cast<int>(rows_.front().size()); }

std::string TableEnv::describe() const { return "script(file=" + label_ + ")"; }

std::vector<double> TableEnv::rewards(int t, const History&) {
  const std::size_t idx =
      std::min<std::size_t>(static_cast<std::size_t>(t - 1), rows_.size() - 1);
  return rows_[idx];
}

// -- ConstrainedAdversaryEnv ------------------------------------------------------

ConstrainedAdversaryEnv::ConstrainedAdversaryEnv(std::vector<double> gaps,
                                                 double corruption_budget)
    : gaps_(std::move(gaps)), budget_(corruption_budget) {
  if (gaps_.empty()) throw ConfigError("constrained: needs at least one arm");
  if (!(budget_ >= 0.0)) throw ConfigError("constrained: C must be >= 0");
  bool has_zero = false;
  for (double g : gaps_) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw ConfigError("constrained: gaps must lie in [0,1]");
    }
    if (g == 0.0) has_zero = true;
  }
  if (!has_zero) {
    throw ConfigError("constrained: at least one gap must equal zero");
  }
  best_arm_ = static_cast<int>(
      std::min_element(gaps_.begin(), gaps_.end()) - gaps_.begin());
  worst_arm_ = static_cast<int>(
      std::max_element(gaps_.begin(), gaps_.end()) - gaps_.begin());
}

int ConstrainedAdversaryEnv::arms() const {
  return static_cast<int>(gaps_.size());
}

std::string ConstrainedAdversaryEnv::describe() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", budget_);
  return "constrained(gaps=[" + join_numbers(gaps_) + "], C=" + buf + ")";
}

std::vector<double> ConstrainedAdversaryEnv::rewards(int t, const History&) {
  std::vector<double> r(gaps_.size());
  for (std::size_t k = 0; k < gaps_.size(); ++k) {
    const double mean = -gaps_[k];
    r[k] = rng_.next_open01() < 1.0 + mean ? 0.0 : -1.0;
  }
  if (t <= static_cast<int>(std::floor(budget_)) && best_arm_ != worst_arm_) {
    std::swap(r[best_arm_], r[worst_arm_]);
  }
  return r;
}

std::optional<std::vector<double>> ConstrainedAdversaryEnv::gaps() const {
  return gaps_;
}

void ConstrainedAdversaryEnv::reset(std::uint64_t seed) {
  rng_ = SplitMix64(seed);
}

// -- RegretLedger ---------------------------------------------------------------

RegretLedger::RegretLedger(int arms, std::optional<std::vector<double>> gaps)
    : gaps_(std::move(gaps)),
      arm_cum_rewards_(arms, 0.0),
      pulls_(arms, 0),
      prob_sums_(arms, 0.0) {
  if (arms < 1) throw ConfigError("ledger: needs at least one arm");
  if (gaps_ && static_cast<int>(gaps_->size()) != arms) {
    throw ConfigError("ledger: gap vector size mismatch");
  }
}

void RegretLedger::record(int t, int arm,
                          const std::vector<double>& reward_vector,
                          const std::vector<double>& probabilities) {
  (void)t;
  const int K = static_cast<int>(arm_cum_rewards_.size());
  if (arm < 0 || arm >= K) throw IndexError("ledger: arm out of range");
  ++rounds_;
  ++pulls_[arm];
  for (int k = 0; k < K; ++k) {
    arm_cum_rewards_[k] += reward_vector[k];
    prob_sums_[k] += probabilities[k];
  }
  learner_cum_ += reward_vector[arm];

  const double previous = cum_regret_;
  if (gaps_) {
    cum_regret_ += (*gaps_)[arm];
  } else {
    const double best =
        *std::max_element(arm_cum_rewards_.begin(), arm_cum_rewards_.end());
    cum_regret_ = best - learner_cum_;
  }
  last_increment_ = cum_regret_ - previous;
}

double pseudo_regret(const RegretLedger& ledger) { return ledger.cumulative(); }

double self_bounding_floor(const RegretLedger& ledger,
                           const std::vector<double>& gaps,
                           double corruption_budget) {
  if (gaps.size() != ledger.probability_sums().size()) {
    throw InputError("self_bounding_floor: gap vector size mismatch");
  }
  double floor = -corruption_budget;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    floor += gaps[k] * ledger.probability_sums()[k];
  }
  return floor;
}

}  // namespace dopa
