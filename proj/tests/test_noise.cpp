#include "dopa/noise.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "dopa/errors.hpp"
#include "dopa/rng.hpp"
#include "dopa/sampler.hpp"
#include "testing_util.hpp"

using namespace dopa;
using dopa_test::inf_dist;

namespace {

MarginalFamily pareto_family(double alpha, double eta, int arms) {
  return MarginalFamily(make_pareto(alpha), eta, arms);
}

}  // namespace

TEST_CASE("symmetric two-arm model") {
  auto model = build_noise_model({0.0, 0.0}, pareto_family(0.5, 1.0, 2), 1e-8);
  CHECK(model.p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.p[1] == doctest::Approx(0.5).epsilon(1e-12));
  // threshold = -F^{-1}(1/2) = -(2 - sqrt 2)
  const double expected = -(2.0 - std::sqrt(2.0));
  CHECK(model.thresholds[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(model.thresholds[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("stationarity holds across arms") {
  auto model =
      build_noise_model({0.0, -1.0}, pareto_family(0.5, 1.0, 2), 1e-8);
  const double a = model.u[0] + model.thresholds[0];
  const double b = model.u[1] + model.thresholds[1];
  CHECK(std::abs(a - b) <= 1e-10);

  auto model3 = build_noise_model({0.0, -0.3, -1.0},
                                  pareto_family(0.5, 1.0, 3), 1e-8);
  for (int k = 1; k < 3; ++k) {
    CHECK(std::abs((model3.u[0] + model3.thresholds[0]) -
                   (model3.u[k] + model3.thresholds[k])) <= 1e-10);
  }
}

TEST_CASE("mixture weights match the bisection sampler") {
  const std::vector<double> u{0.0, -0.4, -1.3};
  auto fam = pareto_family(0.5, 1.0, 3);
  auto model = build_noise_model(u, fam, 1e-8);
  auto bis = bisection_sample(ArmSamplingRequest{u, fam, 1e-10, std::nullopt});
  CHECK(inf_dist(model.p, bis.p_hat) <= 2e-10);
}

TEST_CASE("degenerate probabilities are rejected") {
  // An astronomically bad arm underflows to probability zero.
  CHECK_THROWS_AS(
      build_noise_model({0.0, -1e160}, pareto_family(0.5, 1.0, 2), 1e-8),
      ModelError);
}

TEST_CASE("samples always argmax at their component") {
  auto model = build_noise_model({0.0, -0.3, -1.0},
                                 pareto_family(0.5, 1.0, 3), 1e-8);
  SplitMix64 rng(123);
  for (int i = 0; i < 100000; ++i) {
    const NoiseSample s = sample_noise(model, rng);
    REQUIRE(perturbed_argmax(model.u, s.z, s.component) == s.component);
    // component noise above its threshold, others at or below
    CHECK(s.z[s.component] > model.thresholds[s.component]);
    for (int k = 0; k < 3; ++k) {
      if (k != s.component) CHECK(s.z[k] <= model.thresholds[k]);
    }
  }
}

TEST_CASE("component frequencies converge to the mixture weights") {
  auto model = build_noise_model({0.0, 0.0}, pareto_family(0.5, 1.0, 2), 1e-8);
  SplitMix64 rng(7);
  const int n = 100000;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    count += sample_noise(model, rng).component == 0 ? 1 : 0;
  }
  const double freq = static_cast<double>(count) / n;
  CHECK(std::abs(freq - 0.5) <= 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("pooled marginals reproduce the per-arm law") {
  // Kolmogorov-Smirnov against F_k on pooled draws; 1% critical value.
  auto fam = pareto_family(0.5, 1.0, 3);
  auto model = build_noise_model({0.0, -0.3, -1.0}, fam, 1e-8);
  SplitMix64 rng(2024);
  const int n = 1000000;
  std::vector<std::vector<double>> draws(3);
  for (auto& d : draws) d.reserve(n);
  for (int i = 0; i < n; ++i) {
    const NoiseSample s = sample_noise(model, rng);
    for (int k = 0; k < 3; ++k) draws[k].push_back(s.z[k]);
  }
  const double critical = std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(n);
  for (int k = 0; k < 3; ++k) {
    std::sort(draws[k].begin(), draws[k].end());
    double d_stat = 0.0;
    for (int i = 0; i < n; ++i) {
      const double cdf = fam.cdf(k, draws[k][i]);
      d_stat = std::max(d_stat, std::abs(cdf - (i + 1.0) / n));
      d_stat = std::max(d_stat, std::abs(cdf - static_cast<double>(i) / n));
    }
    CAPTURE(k);
    CHECK(d_stat <= critical);
  }
}

TEST_CASE("model depends on the reward estimate") {
  auto fam = pareto_family(0.5, 1.0, 2);
  auto a = build_noise_model({0.0, -0.5}, fam, 1e-8);
  auto b = build_noise_model({0.0, -1.5}, fam, 1e-8);
  CHECK(std::abs(a.thresholds[0] - b.thresholds[0]) > 1e-6);
  CHECK(std::abs(a.p[0] - b.p[0]) > 1e-6);
}

TEST_CASE("symmetric two-arm validation at the minimum sample count") {
  auto model = build_noise_model({0.0, 0.0}, pareto_family(0.5, 1.0, 2), 1e-8);
  SplitMix64 rng(17);
  const long long n = 10000;
  auto report = validate_argmax_frequencies(model, n, rng);
  CHECK(report.passed);
  for (const auto& row : report.arms) {
    CHECK(std::abs(row.frequency - 0.5) <=
          4.0 * std::sqrt(0.25 / static_cast<double>(n)));
  }
}

TEST_CASE("validation report on the three-arm scenario") {
  auto model = build_noise_model({0.0, -0.3, -1.0},
                                 pareto_family(0.5, 1.0, 3), 1e-8);
  SplitMix64 rng(31);
  auto report = validate_argmax_frequencies(model, 200000, rng);
  CHECK(report.passed);
  CHECK(report.argmax_mismatches == 0);
  CHECK(report.max_abs_z <= 4.0);
  // deterministic given the seed
  SplitMix64 rng2(31);
  auto again = validate_argmax_frequencies(model, 200000, rng2);
  for (int k = 0; k < 3; ++k) {
    CHECK(again.arms[k].frequency == report.arms[k].frequency);
  }
  CHECK_THROWS_AS(validate_argmax_frequencies(model, 9999, rng), InputError);
}
