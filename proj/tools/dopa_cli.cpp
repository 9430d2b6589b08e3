// Command-line front end: sample / run / bench / validate subcommands.
// Exit codes: 0 success, 1 assertion or bound failure, 2 usage/parse error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dopa/bandit.hpp"
#include "dopa/bench.hpp"
#include "dopa/csv.hpp"
#include "dopa/environments.hpp"
#include "dopa/errors.hpp"
#include "dopa/noise.hpp"
#include "dopa/sampler.hpp"
#include "dopa/config.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_u(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw dopa::ConfigError(std::string("--u must be a JSON array: ") +
                            e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw dopa::ConfigError("--u must be a nonempty JSON array");
  }
  std::vector<double> u;
  for (const auto& v : j) u.push_back(v.get<double>());
  return u;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto dash = tok.find("..");
    if (dash != std::string::npos) {
      const std::uint64_t a = std::stoull(tok.substr(0, dash));
      const std::uint64_t b = std::stoull(tok.substr(dash + 2));
      for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(std::stoull(tok));
    }
  }
  if (seeds.empty()) throw dopa::ConfigError("--seeds: empty list");
  return seeds;
}

json result_json(const dopa::ArmSamplingResult& r) {
  return json{{"method", r.method},
              {"p", r.p_hat},
              {"tau_lo", r.tau_lo},
              {"iterations", r.iterations}};
}

int cmd_sample(const std::string& u_text, const std::string& generator_spec,
               double eta, double epsilon, const std::string& json_out) {
  const std::vector<double> u = parse_u(u_text);
  dopa::GeneratorPtr gen = dopa::parse_generator(generator_spec);
  dopa::MarginalFamily family(gen, eta, static_cast<int>(u.size()));

  dopa::ArmSamplingRequest req{u, family, epsilon, std::nullopt};
  if (!gen->lipschitz_bound()) {
    const double L = dopa::estimate_lipschitz(*gen);
    req.delta_override =
        epsilon * family.min_eta() / (2.0 * L * std::sqrt(family.arms()));
  }
  const dopa::ArmSamplingResult bis = dopa::bisection_sample(req);
  const dopa::ArmSamplingResult newton = dopa::dual_root_newton(req);

  double dist = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dist = std::max(dist, std::abs(bis.p_hat[k] - newton.p_hat[k]));
  }

  std::printf("generator: %s  eta=%g  epsilon=%g\n", gen->name().c_str(), eta,
              epsilon);
  std::printf("bisection : [");
  for (std::size_t k = 0; k < u.size(); ++k) {
    std::printf("%s%.10g", k ? ", " : "", bis.p_hat[k]);
  }
  std::printf("]  tau_lo=%.12g  iterations=%d\n", bis.tau_lo, bis.iterations);
  std::printf("newton    : [");
  for (std::size_t k = 0; k < u.size(); ++k) {
    std::printf("%s%.10g", k ? ", " : "", newton.p_hat[k]);
  }
  std::printf("]\n");
  std::printf("inf-distance: %.3g\n", dist);

  json out{{"generator", gen->name()},
           {"eta", eta},
           {"epsilon", epsilon},
           {"u", u},
           {"bisection", result_json(bis)},
           {"newton", result_json(newton)},
           {"inf_distance", dist}};
  // Hybrids need not integrate to zero; report the residual as a diagnostic.
  if (dynamic_cast<const dopa::HybridGenerator*>(gen.get())) {
    out["generator_f1"] = gen->integrated_quantile(1.0);
  }
  if (!json_out.empty()) {
    dopa::write_file(json_out, out.dump(2) + "\n");
  }
  return 0;
}

int cmd_run(dopa::ExperimentConfig cfg) {
  dopa::EnvFactory env_factory =
      dopa::parse_environment(cfg.env_spec, cfg.arms);
  {
    auto probe = env_factory();
    cfg.arms = probe->arms();
  }

  if (cfg.policy.schedule == dopa::EtaSchedule::TunedHorizon) {
    std::printf("tuned eta = %.10g\n",
                dopa::schedule_eta(cfg.policy, 1, cfg.arms, cfg.horizon));
  }

  const dopa::BatchResult batch =
      dopa::run_batch(cfg.policy, env_factory, cfg.horizon, cfg.seeds);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    for (const dopa::RunTrace& trace : batch.traces) {
      dopa::write_file(cfg.out_dir + "/trace_seed" +
                           std::to_string(trace.seed) + ".csv",
                       dopa::trace_csv(trace));
    }
    dopa::write_file(
        cfg.out_dir + "/aggregate.csv",
        dopa::aggregate_csv(batch.stats, cfg.arms, cfg.policy.alpha));
    std::printf("wrote %zu trace files and aggregate.csv to %s\n",
                batch.traces.size(), cfg.out_dir.c_str());
  }

  const double final_mean = batch.stats.final_mean();
  std::printf("policy: %s\n", cfg.policy.describe().c_str());
  std::printf("env:    %s  K=%d T=%d seeds=%d\n", cfg.env_spec.c_str(),
              cfg.arms, cfg.horizon, batch.stats.seed_count);
  std::printf("final mean pseudo-regret: %.6g (stderr %.4g)\n", final_mean,
              batch.stats.final_stderr());

  // Bound check for the policies that carry one.
  const double kt = static_cast<double>(cfg.arms) * cfg.horizon;
  bool bound_ok = true;
  if (cfg.policy.kind == dopa::PolicyKind::DopaAnytime) {
    const double bound = 4.0 * std::sqrt(kt) + 1.0;
    bound_ok = final_mean <= bound;
    std::printf("anytime bound 4*sqrt(KT)+1 = %.6g -> %s\n", bound,
                bound_ok ? "below" : "ABOVE");
  } else if (cfg.policy.kind == dopa::PolicyKind::DopaStatic &&
             cfg.policy.schedule == dopa::EtaSchedule::TunedHorizon) {
    const double a = cfg.policy.alpha;
    const double bound = std::sqrt(kt / (a * (1.0 - a)));
    bound_ok = final_mean <= bound;
    std::printf("tuned bound sqrt(KT/(alpha(1-alpha))) = %.6g -> %s\n", bound,
                bound_ok ? "below" : "ABOVE");
  }
  return bound_ok ? 0 : 1;
}

int cmd_bench(const std::string& k_text, int reps, std::uint64_t seed,
              const std::string& out_path) {
  dopa::BenchOptions opt;
  opt.repetitions = reps;
  opt.seed = seed;
  if (!k_text.empty()) {
    opt.k_values.clear();
    std::stringstream ss(k_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) opt.k_values.push_back(std::stoi(tok));
    }
  }
  const dopa::BenchReport report = dopa::run_bench(opt);
  const std::string csv = dopa::bench_csv(report);
  std::printf("%s", csv.c_str());
  const int k_last = opt.k_values.back();
  std::printf("speedup at K=%d: %.2fx\n", k_last, report.speedup_at(k_last));
  std::printf("bisection log-log slope: %.3f\n",
              report.bisection_loglog_slope());
  std::printf("iteration bound violations: %lld\n",
              report.iteration_bound_violations);
  if (!out_path.empty()) dopa::write_file(out_path, csv);
  return report.iteration_bound_violations == 0 ? 0 : 1;
}

int cmd_validate(int arms, const std::string& u_text,
                 const std::string& generator_spec, double eta, long long n,
                 std::uint64_t seed, const std::string& json_out) {
  std::vector<double> u;
  if (!u_text.empty()) {
    u = parse_u(u_text);
  } else {
    u.assign(arms, 0.0);
    for (int k = 0; k < arms; ++k) u[k] = -0.3 * k;
  }
  dopa::GeneratorPtr gen = dopa::parse_generator(generator_spec);
  dopa::MarginalFamily family(gen, eta, static_cast<int>(u.size()));
  const dopa::OptimisticNoiseModel model =
      dopa::build_noise_model(u, family, 1e-12);
  dopa::SplitMix64 rng(seed);
  const dopa::ValidationReport report =
      dopa::validate_argmax_frequencies(model, n, rng);

  std::printf("noise validation: %s  n=%lld  seed=%llu\n", gen->name().c_str(),
              n, static_cast<unsigned long long>(seed));
  std::printf("%4s %12s %12s %10s\n", "arm", "frequency", "probability",
              "z-score");
  for (const dopa::ArmFrequency& row : report.arms) {
    std::printf("%4d %12.6f %12.6f %10.3f\n", row.arm, row.frequency,
                row.probability, row.z_score);
  }
  std::printf("max |z| = %.3f, argmax mismatches = %lld -> %s\n",
              report.max_abs_z, report.argmax_mismatches,
              report.passed ? "pass" : "FAIL");

  if (!json_out.empty()) {
    json rows = json::array();
    for (const dopa::ArmFrequency& row : report.arms) {
      rows.push_back(json{{"arm", row.arm},
                          {"frequency", row.frequency},
                          {"probability", row.probability},
                          {"z_score", row.z_score}});
    }
    json out{{"generator", gen->name()},  {"eta", eta},
             {"u", u},                    {"samples", report.samples},
             {"max_abs_z", report.max_abs_z},
             {"argmax_mismatches", report.argmax_mismatches},
             {"passed", report.passed},   {"arms", rows}};
    dopa::write_file(json_out, out.dump(2) + "\n");
  }
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Optimistic-perturbation bandit toolkit: arm sampling via dual-threshold "
      "bisection, explicit optimistic noise models, and a simulation and "
      "benchmark harness"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand(
      "sample", "Compute an arm-sampling distribution for a reward estimate");
  std::string u_text = "[0,0,0,0]";
  std::string generator_spec = "pareto(alpha=0.5)";
  double eta = 1.0;
  double epsilon = 1e-8;
  std::string json_out;
  sample->add_option("--u", u_text, "reward estimate as a JSON array");
  sample->add_option("--generator", generator_spec, "generator spec");
  sample->add_option("--eta", eta, "uniform scale");
  sample->add_option("--epsilon", epsilon, "error tolerance");
  sample->add_option("--json", json_out, "write the result as JSON");

  // run
  auto* run = app.add_subcommand("run", "Run seeded bandit episodes");
  std::string config_path;
  std::string policy_kind, run_generator, eta_text, env_spec, out_dir,
      seeds_text;
  int arms = 0, horizon = 0;
  double run_epsilon = 0.0, run_alpha = 0.0;
  run->add_option("--config", config_path, "experiment JSON document");
  run->add_option("--policy", policy_kind,
                  "dopa_static|dopa_anytime|ftrl_baseline|exp3|ftl|"
                  "ftpl_optimistic");
  run->add_option("--generator", run_generator, "generator spec override");
  run->add_option("--eta", eta_text,
                  "learning rate: number, tuned, anytime, or gamma_sqrt");
  run->add_option("--env", env_spec, "environment spec override");
  run->add_option("--k", arms, "number of arms");
  run->add_option("--horizon,--T", horizon, "rounds per episode");
  run->add_option("--seeds", seeds_text, "comma list or a..b range");
  run->add_option("--epsilon", run_epsilon, "sampler tolerance");
  run->add_option("--alpha", run_alpha, "Tsallis parameter");
  run->add_option("--out", out_dir, "output directory for CSV files");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Per-call timing sweep of bisection vs the convex baseline");
  std::string k_list;
  int reps = 10;
  std::uint64_t bench_seed = 1;
  std::string bench_out;
  bench->add_option("--k", k_list, "comma list of K values");
  bench->add_option("--reps", reps, "repetitions per cell (>= 10)");
  bench->add_option("--seed", bench_seed, "rng seed");
  bench->add_option("--out", bench_out, "write the table as CSV");

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Monte-Carlo check of the optimistic noise distribution");
  int val_arms = 3;
  std::string val_u = "[0,-0.3,-1]";
  std::string val_generator = "pareto(alpha=0.5)";
  double val_eta = 1.0;
  long long val_n = 1000000;
  std::uint64_t val_seed = 1;
  std::string val_json;
  validate->add_option("--k", val_arms, "number of arms (when --u omitted)");
  validate->add_option("--u", val_u, "reward estimate as a JSON array");
  validate->add_option("--generator", val_generator, "generator spec");
  validate->add_option("--eta", val_eta, "uniform scale");
  validate->add_option("--n", val_n, "sample count (>= 10000)");
  validate->add_option("--seed", val_seed, "rng seed");
  validate->add_option("--json", val_json, "write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) {
      return cmd_sample(u_text, generator_spec, eta, epsilon, json_out);
    }
    if (run->parsed()) {
      dopa::ExperimentConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
          throw dopa::ConfigError("cannot open config '" + config_path + "'");
        }
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = dopa::parse_config_json(ss.str());
      } else {
        cfg = dopa::parse_config_json("{}");
      }
      // Flag overrides.
      if (arms > 0) cfg.arms = arms;
      if (horizon > 0) cfg.horizon = horizon;
      if (!env_spec.empty()) cfg.env_spec = env_spec;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (!seeds_text.empty()) cfg.seeds = parse_seed_list(seeds_text);
      if (!policy_kind.empty() || !run_generator.empty() ||
          !eta_text.empty() || run_epsilon > 0.0 || run_alpha > 0.0) {
        const std::string kind = !policy_kind.empty()
                                     ? policy_kind
                                     : dopa::policy_kind_name(cfg.policy.kind);
        const std::string gen_spec =
            !run_generator.empty()
                ? run_generator
                : (cfg.policy.generator ? cfg.policy.generator->name()
                                        : "pareto(alpha=0.5)");
        std::string eta_field = eta_text;
        if (eta_field.empty()) {
          switch (cfg.policy.schedule) {
            case dopa::EtaSchedule::TunedHorizon: eta_field = "tuned"; break;
            case dopa::EtaSchedule::AnytimeSqrt: eta_field = "anytime"; break;
            case dopa::EtaSchedule::GammaSqrt: eta_field = "gamma_sqrt"; break;
            default: eta_field = std::to_string(cfg.policy.eta); break;
          }
        }
        cfg.policy = dopa::parse_policy_fields(
            kind, gen_spec, eta_field,
            run_epsilon > 0.0 ? run_epsilon : cfg.policy.epsilon,
            run_alpha > 0.0 ? run_alpha : cfg.policy.alpha);
      }
      return cmd_run(std::move(cfg));
    }
    if (bench->parsed()) {
      return cmd_bench(k_list, reps, bench_seed, bench_out);
    }
    if (validate->parsed()) {
      if (val_n < 10000) {
        std::fprintf(stderr, "validate: --n must be at least 10000\n");
        return 2;
      }
      return cmd_validate(val_arms, val_u, val_generator, val_eta, val_n,
                          val_seed, val_json);
    }
  } catch (const dopa::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dopa::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
