#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dopa/bandit.hpp"
#include "dopa/environments.hpp"
#include "dopa/generators.hpp"

namespace dopa {

// Generator expression grammar:
//   pareto(alpha=0.5) | exp3 | shifted_exp | inv_square
//   | hybrid(w1*expr + w2*expr + ...)
// Throws ConfigError with a position diagnostic on malformed input.
GeneratorPtr parse_generator(const std::string& spec);

// Environment grammar:
//   stochastic(means=[..]) | ftl_killer | script(file=path)
//   | constrained(gaps=[..], C=..)
// arms_hint pads ftl_killer beyond two arms; ignored elsewhere.
EnvFactory parse_environment(const std::string& spec, int arms_hint);

// CSV reward table loader for script(file=...): one row per round, one
// column per arm, optional header line.
std::vector<std::vector<double>> load_reward_table(const std::string& path);

// One experiment: policy + environment + run geometry, read from a JSON
// document; CLI flags override individual fields.
struct ExperimentConfig {
  Policy policy;
  std::string env_spec = "stochastic(means=[0,-0.2])";
  int arms = 2;
  int horizon = 1000;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir;
};

ExperimentConfig parse_config_json(const std::string& json_text);
Policy parse_policy_fields(const std::string& kind,
                           const std::string& generator_spec,
                           const std::string& eta_text, double epsilon,
                           double alpha);

}  // namespace dopa
