#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dopa {

// One (method, K) cell of the timing sweep. Times cover only the sampler
// call itself; input generation and bookkeeping stay outside the clock.
struct BenchCell {
  std::string method;  // "bisection" or "generic_baseline"
  int arms = 0;
  double mean_ns = 0.0;
  double min_ns = 0.0;
  double max_ns = 0.0;
  double median_ns = 0.0;
  double mean_iterations = 0.0;
};

struct BenchOptions {
  std::vector<int> k_values = {4, 16, 64, 256, 1024};
  int repetitions = 10;  // per (method, K) cell, after one warmup
  std::uint64_t seed = 1;
  double epsilon = 1e-8;
  double alpha = 0.5;  // generator parameter for the swept family
  double eta = 1.0;
};

struct BenchReport {
  BenchOptions options;
  std::vector<BenchCell> cells;  // bisection/baseline pairs per K
  // Zero violations expected: every bisection call stayed within the
  // theoretical iteration cap.
  long long iteration_bound_violations = 0;

  const BenchCell* cell(const std::string& method, int arms) const;
  double speedup_at(int arms) const;     // baseline mean / bisection mean
  double bisection_loglog_slope() const; // log-time vs log-K regression slope
};

// Runs the sweep: for each K, repetitions of both methods interleaved on a
// shared fresh u drawn uniformly from [0,1]^K. At least 10 repetitions.
BenchReport run_bench(const BenchOptions& options);

// "method,K,mean_ns,min_ns,max_ns,median_ns,mean_iterations,speedup"
std::string bench_csv(const BenchReport& report);

}  // namespace dopa
