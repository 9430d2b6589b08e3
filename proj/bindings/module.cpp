// Python bindings for the core operations: generator evaluation, arm
// sampling, the optimistic noise model, and seeded bandit runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "dopa/bandit.hpp"
#include "dopa/bench.hpp"
#include "dopa/csv.hpp"
#include "dopa/environments.hpp"
#include "dopa/errors.hpp"
#include "dopa/generators.hpp"
#include "dopa/noise.hpp"
#include "dopa/rng.hpp"
#include "dopa/sampler.hpp"
#include "dopa/config.hpp"

namespace py = pybind11;
using namespace dopa;

namespace {

ArmSamplingRequest make_request(const std::vector<double>& u,
                                const std::string& generator_spec, double eta,
                                double epsilon,
                                std::optional<double> delta_override) {
  GeneratorPtr gen = parse_generator(generator_spec);
  MarginalFamily family(gen, eta, static_cast<int>(u.size()));
  ArmSamplingRequest req{u, std::move(family), epsilon, delta_override};
  if (!gen->lipschitz_bound() && !req.delta_override) {
    const double L = estimate_lipschitz(*gen);
    req.delta_override =
        epsilon * eta / (2.0 * L * std::sqrt(static_cast<double>(u.size())));
  }
  return req;
}

py::dict result_dict(const ArmSamplingResult& r) {
  py::dict d;
  d["p"] = r.p_hat;
  d["tau_lo"] = r.tau_lo;
  d["iterations"] = r.iterations;
  d["method"] = r.method;
  return d;
}

// pybind11 holders cannot be shared_ptr<const T>; wrap the handle instead.
struct PyGenerator {
  GeneratorPtr ptr;
};

py::dict trace_dict(const RunTrace& trace) {
  py::dict d;
  d["seed"] = trace.seed;
  d["policy"] = trace.policy;
  d["env"] = trace.env;
  d["rng_algorithm"] = trace.rng_algorithm;
  std::vector<int> arms;
  std::vector<double> rewards, probabilities, cum_regret;
  arms.reserve(trace.rounds.size());
  for (const RoundRecord& r : trace.rounds) {
    arms.push_back(r.arm);
    rewards.push_back(r.reward);
    probabilities.push_back(r.probability);
    cum_regret.push_back(r.cum_regret);
  }
  d["arm"] = arms;
  d["reward"] = rewards;
  d["probability"] = probabilities;
  d["cum_pseudo_regret"] = cum_regret;
  d["final_regret"] = trace.final_regret();
  return d;
}

}  // namespace

PYBIND11_MODULE(_dopa, m) {
  m.doc() =
      "Optimistic-perturbation bandits: bisection arm sampling over marginal "
      "ambiguity sets, explicit optimistic noise models, and a simulation "
      "harness.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);

  py::class_<PyGenerator>(m, "Generator")
      .def("__repr__",
           [](const PyGenerator& g) {
             return "<Generator " + g.ptr->name() + ">";
           })
      .def_property_readonly(
          "name", [](const PyGenerator& g) { return g.ptr->name(); })
      .def(
          "cdf", [](const PyGenerator& g, double s) { return g.ptr->cdf(s); },
          py::arg("s"))
      .def(
          "quantile",
          [](const PyGenerator& g, double t) { return g.ptr->quantile(t); },
          py::arg("t"))
      .def(
          "density",
          [](const PyGenerator& g, double s) { return g.ptr->density(s); },
          py::arg("s"))
      .def(
          "integrated_quantile",
          [](const PyGenerator& g, double p) {
            return g.ptr->integrated_quantile(p);
          },
          py::arg("p"))
      .def_property_readonly("lipschitz_bound",
                             [](const PyGenerator& g) {
                               return g.ptr->lipschitz_bound();
                             });

  m.def(
      "make_generator",
      [](const std::string& spec) { return PyGenerator{parse_generator(spec)}; },
      py::arg("spec"),
      "Parse a generator spec string, e.g. 'pareto(alpha=0.5)', 'exp3', "
      "'hybrid(1*shifted_exp + 1*inv_square)'.");

  m.def(
      "bisection_sample",
      [](const std::vector<double>& u, const std::string& generator,
         double eta, double epsilon, std::optional<double> delta_override) {
        return result_dict(
            bisection_sample(make_request(u, generator, eta, epsilon,
                                          delta_override)));
      },
      py::arg("u"), py::arg("generator") = "pareto(alpha=0.5)",
      py::arg("eta") = 1.0, py::arg("epsilon") = 1e-8,
      py::arg("delta_override") = std::nullopt,
      "Arm-sampling distribution via dual-threshold bisection.");

  m.def(
      "dual_root_newton",
      [](const std::vector<double>& u, const std::string& generator,
         double eta, double epsilon) {
        return result_dict(
            dual_root_newton(make_request(u, generator, eta, epsilon, {})));
      },
      py::arg("u"), py::arg("generator") = "pareto(alpha=0.5)",
      py::arg("eta") = 1.0, py::arg("epsilon") = 1e-8,
      "High-precision dual-root oracle (safeguarded Newton).");

  m.def(
      "convex_baseline",
      [](const std::vector<double>& u, const std::string& generator,
         double eta, double epsilon) {
        return result_dict(generic_convex_baseline(
            make_request(u, generator, eta, epsilon, {})));
      },
      py::arg("u"), py::arg("generator") = "pareto(alpha=0.5)",
      py::arg("eta") = 1.0, py::arg("epsilon") = 1e-8,
      "Generic exponentiated-gradient solver used as the timing baseline.");

  m.def("exp3_probabilities", &exp3_closed_form, py::arg("u"), py::arg("eta"),
        "Softmax closed form matching the exponential generator.");

  m.def(
      "potential_value",
      [](const std::vector<double>& u, const std::vector<double>& p,
         const std::string& generator, double eta) {
        return potential_value(make_request(u, generator, eta, 1e-8, {}), p);
      },
      py::arg("u"), py::arg("p"), py::arg("generator") = "pareto(alpha=0.5)",
      py::arg("eta") = 1.0);

  py::class_<OptimisticNoiseModel>(m, "NoiseModel")
      .def_property_readonly(
          "p", [](const OptimisticNoiseModel& mdl) { return mdl.p; })
      .def_property_readonly("thresholds",
                             [](const OptimisticNoiseModel& mdl) {
                               return mdl.thresholds;
                             })
      .def_property_readonly(
          "u", [](const OptimisticNoiseModel& mdl) { return mdl.u; })
      .def(
          "sample",
          [](const OptimisticNoiseModel& mdl, std::uint64_t seed, int count) {
            SplitMix64 rng(seed);
            py::list out;
            for (int i = 0; i < count; ++i) {
              const NoiseSample s = sample_noise(mdl, rng);
              py::dict d;
              d["z"] = s.z;
              d["component"] = s.component;
              d["argmax"] = perturbed_argmax(mdl.u, s.z, s.component);
              out.append(d);
            }
            return out;
          },
          py::arg("seed"), py::arg("count") = 1)
      .def(
          "validate",
          [](const OptimisticNoiseModel& mdl, long long n,
             std::uint64_t seed) {
            SplitMix64 rng(seed);
            const ValidationReport rep =
                validate_argmax_frequencies(mdl, n, rng);
            py::dict d;
            std::vector<double> freq, prob, z;
            for (const ArmFrequency& row : rep.arms) {
              freq.push_back(row.frequency);
              prob.push_back(row.probability);
              z.push_back(row.z_score);
            }
            d["frequency"] = freq;
            d["probability"] = prob;
            d["z_score"] = z;
            d["samples"] = rep.samples;
            d["argmax_mismatches"] = rep.argmax_mismatches;
            d["max_abs_z"] = rep.max_abs_z;
            d["passed"] = rep.passed;
            return d;
          },
          py::arg("n"), py::arg("seed") = 1);

  m.def(
      "build_noise_model",
      [](const std::vector<double>& u, const std::string& generator,
         double eta, double epsilon) {
        GeneratorPtr gen = parse_generator(generator);
        MarginalFamily family(gen, eta, static_cast<int>(u.size()));
        return build_noise_model(u, family, epsilon);
      },
      py::arg("u"), py::arg("generator") = "pareto(alpha=0.5)",
      py::arg("eta") = 1.0, py::arg("epsilon") = 1e-8,
      "Explicit optimistic noise distribution at the given reward estimate.");

  m.def(
      "run_episode",
      [](const std::string& policy_kind, const std::string& generator,
         const std::string& eta, const std::string& env, int K, int T,
         std::uint64_t seed, double epsilon, double alpha) {
        Policy policy =
            parse_policy_fields(policy_kind, generator, eta, epsilon, alpha);
        EnvFactory factory = parse_environment(env, K);
        auto env_instance = factory();
        return trace_dict(run_episode(policy, *env_instance, T, seed));
      },
      py::arg("policy"), py::arg("generator") = "pareto(alpha=0.5)",
      py::arg("eta") = "1", py::arg("env") = "stochastic(means=[0,-0.2])",
      py::arg("K") = 2, py::arg("T") = 1000, py::arg("seed") = 1,
      py::arg("epsilon") = 1e-8, py::arg("alpha") = 0.5,
      "One seeded episode; returns per-round arrays and the final regret.");

  m.def(
      "run_batch",
      [](const std::string& policy_kind, const std::string& generator,
         const std::string& eta, const std::string& env, int K, int T,
         const std::vector<std::uint64_t>& seeds, double epsilon,
         double alpha, int threads) {
        Policy policy =
            parse_policy_fields(policy_kind, generator, eta, epsilon, alpha);
        EnvFactory factory = parse_environment(env, K);
        const BatchResult batch = run_batch(policy, factory, T, seeds, threads);
        py::dict d;
        d["mean"] = batch.stats.mean;
        d["min"] = batch.stats.min;
        d["max"] = batch.stats.max;
        d["stderr"] = batch.stats.stderr_mean;
        d["final_mean"] = batch.stats.final_mean();
        d["final_stderr"] = batch.stats.final_stderr();
        py::list traces;
        for (const RunTrace& t : batch.traces) traces.append(trace_dict(t));
        d["traces"] = traces;
        return d;
      },
      py::arg("policy"), py::arg("generator") = "pareto(alpha=0.5)",
      py::arg("eta") = "1", py::arg("env") = "stochastic(means=[0,-0.2])",
      py::arg("K") = 2, py::arg("T") = 1000,
      py::arg("seeds") = std::vector<std::uint64_t>{1},
      py::arg("epsilon") = 1e-8, py::arg("alpha") = 0.5,
      py::arg("threads") = 0,
      "Independent seeded episodes plus per-round aggregate statistics.");

  m.def(
      "run_bench",
      [](const std::vector<int>& k_values, int repetitions,
         std::uint64_t seed) {
        BenchOptions opt;
        if (!k_values.empty()) opt.k_values = k_values;
        opt.repetitions = repetitions;
        opt.seed = seed;
        const BenchReport rep = run_bench(opt);
        py::list cells;
        for (const BenchCell& c : rep.cells) {
          py::dict d;
          d["method"] = c.method;
          d["K"] = c.arms;
          d["mean_ns"] = c.mean_ns;
          d["min_ns"] = c.min_ns;
          d["max_ns"] = c.max_ns;
          d["median_ns"] = c.median_ns;
          d["mean_iterations"] = c.mean_iterations;
          cells.append(d);
        }
        py::dict d;
        d["cells"] = cells;
        d["speedup_at_max_k"] = rep.speedup_at(opt.k_values.back());
        d["bisection_loglog_slope"] = rep.bisection_loglog_slope();
        d["iteration_bound_violations"] = rep.iteration_bound_violations;
        return d;
      },
      py::arg("k_values") = std::vector<int>{4, 16, 64, 256, 1024},
      py::arg("repetitions") = 10, py::arg("seed") = 1);

  m.attr("rng_algorithm") = kRngAlgorithm;
}
