#include "dopa/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "dopa/errors.hpp"
#include "dopa/rng.hpp"
#include "dopa/sampler.hpp"

namespace dopa {

namespace {

double now_ns() {
  return static_cast<double>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

BenchCell summarize(const std::string& method, int arms,
                    std::vector<double> times, double iter_sum) {
  BenchCell cell;
  cell.method = method;
  cell.arms = arms;
  cell.min_ns = *std::min_element(times.begin(), times.end());
  cell.max_ns = *std::max_element(times.begin(), times.end());
  double sum = 0.0;
  for (double t : times) sum += t;
  cell.mean_ns = sum / times.size();
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  cell.median_ns = n % 2 == 1 ? times[n / 2]
                              : 0.5 * (times[n / 2 - 1] + times[n / 2]);
  cell.mean_iterations = iter_sum / static_cast<double>(n);
  return cell;
}

}  // namespace

const BenchCell* BenchReport::cell(const std::string& method,
                                   int arms) const {
  for (const BenchCell& c : cells) {
    if (c.method == method && c.arms == arms) return &c;
  }
  return nullptr;
}

double BenchReport::speedup_at(int arms) const {
  const BenchCell* bis = cell("bisection", arms);
  const BenchCell* base = cell("generic_baseline", arms);
  if (!bis || !base || !(bis->mean_ns > 0.0)) return 0.0;
  return base->mean_ns / bis->mean_ns;
}

double BenchReport::bisection_loglog_slope() const {
  // Least-squares slope of log(mean time) against log(K).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const BenchCell& c : cells) {
    if (c.method != "bisection") continue;
    const double x = std::log(static_cast<double>(c.arms));
    const double y = std::log(c.mean_ns);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BenchReport run_bench(const BenchOptions& options) {
  if (options.repetitions < 10) {
    throw ConfigError("bench: need at least 10 repetitions per cell");
  }
  if (options.k_values.empty()) {
    throw ConfigError("bench: empty K sweep");
  }

  BenchReport report;
  report.options = options;
  SplitMix64 rng(options.seed);

  for (int K : options.k_values) {
    if (K < 2) throw ConfigError("bench: K must be >= 2");
    MarginalFamily family(make_pareto(options.alpha), options.eta, K);

    std::vector<double> bis_times, base_times;
    double bis_iters = 0.0, base_iters = 0.0;
    bis_times.reserve(options.repetitions);
    base_times.reserve(options.repetitions);

    // One untimed warmup pass per method.
    {
      std::vector<double> u(K);
      for (double& v : u) v = rng.next_open01();
      ArmSamplingRequest req{u, family, options.epsilon, std::nullopt};
      (void)bisection_sample(req);
      (void)generic_convex_baseline(req);
    }

    for (int rep = 0; rep < options.repetitions; ++rep) {
      // Fresh estimate per repetition, shared by both methods so the pair
      // solves the same instance back to back.
      std::vector<double> u(K);
      for (double& v : u) v = rng.next_open01();
      ArmSamplingRequest req{u, family, options.epsilon, std::nullopt};

      const double t0 = now_ns();
      ArmSamplingResult bis = bisection_sample(req);
      const double t1 = now_ns();
      ArmSamplingResult base = generic_convex_baseline(req);
      const double t2 = now_ns();

      bis_times.push_back(t1 - t0);
      base_times.push_back(t2 - t1);
      bis_iters += bis.iterations;
      base_iters += base.iterations;

      const auto cap = theoretical_iteration_cap(req);
      if (cap && bis.iterations > *cap) ++report.iteration_bound_violations;
    }

    report.cells.push_back(summarize("bisection", K, bis_times, bis_iters));
    report.cells.push_back(
        summarize("generic_baseline", K, base_times, base_iters));
  }
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::string out =
      "method,K,mean_ns,min_ns,max_ns,median_ns,mean_iterations,speedup\n";
  for (const BenchCell& c : report.cells) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%d,%.0f,%.0f,%.0f,%.0f,%.2f,%.2f\n",
                  c.method.c_str(), c.arms, c.mean_ns, c.min_ns, c.max_ns,
                  c.median_ns, c.mean_iterations,
                  c.method == "bisection" ? report.speedup_at(c.arms) : 1.0);
    out += buf;
  }
  return out;
}

}  // namespace dopa
