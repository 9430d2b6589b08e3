#include "dopa/generators.hpp"

#include <cmath>
#include <vector>

#include <doctest.h>

#include "dopa/errors.hpp"
#include "dopa/rng.hpp"
#include "testing_util.hpp"

using namespace dopa;
using dopa_test::quantile_integral;

namespace {

std::vector<GeneratorPtr> catalog() {
  return {make_pareto(0.25), make_pareto(0.5),  make_pareto(0.75),
          make_exponential(), make_shifted_exponential(),
          make_inverse_square(),
          harmonic_combine({{1.0, make_shifted_exponential()},
                            {1.0, make_inverse_square()}})};
}

GeneratorPtr corollary_hybrid(double gamma) {
  return harmonic_combine({{gamma, make_shifted_exponential()},
                           {gamma, make_inverse_square()}});
}

}  // namespace

TEST_CASE("pareto closed forms") {
  ParetoGenerator g(0.5);
  CHECK(g.cdf(0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(g.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // quantile tends to 1 as t -> 1
  CHECK(g.quantile(1.0 - 1e-13) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g.integrated_quantile(0.25) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(g.integrated_quantile(0.0) == 0.0);
  CHECK(g.integrated_quantile(1.0) == 0.0);
  CHECK(g.density(g.quantile(0.25)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(*g.lipschitz_bound() == doctest::Approx(2.0));
  CHECK(g.domain_sup() == doctest::Approx(2.0));
}

TEST_CASE("exponential closed forms") {
  ExponentialGenerator g;
  CHECK(g.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.quantile(std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.density(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.integrated_quantile(0.0) == 0.0);
  CHECK(g.integrated_quantile(1.0) == 0.0);
  CHECK(g.integrated_quantile(0.5) ==
        doctest::Approx(0.5 * std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("hybrid components match the closed-form quantiles") {
  auto g1 = make_shifted_exponential();
  auto g2 = make_inverse_square();
  for (double t : {0.05, 0.3, 0.5, 0.8, 0.99}) {
    CHECK(g1->quantile(t) ==
          doctest::Approx(-1.0 - std::log(1.0 - t)).epsilon(1e-13));
    CHECK(g2->quantile(t) ==
          doctest::Approx(-1.0 / (2.0 * std::sqrt(t))).epsilon(1e-13));
  }
  auto hybrid = corollary_hybrid(1.0);
  for (double t : {0.1, 0.4, 0.7, 0.95}) {
    const double expected =
        -1.0 - std::log(1.0 - t) - 1.0 / (2.0 * std::sqrt(t));
    CHECK(hybrid->quantile(t) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("hybrid cdf inverts its quantile") {
  auto hybrid = corollary_hybrid(1.0);
  CHECK(hybrid->cdf(hybrid->quantile(0.5)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const double t = 0.001 + 0.998 * rng.next_open01();
    CHECK(std::abs(hybrid->cdf(hybrid->quantile(t)) - t) <= 1e-10);
  }
}

TEST_CASE("quantile/cdf round trip across the catalog") {
  SplitMix64 rng(7);
  for (const auto& g : catalog()) {
    CAPTURE(g->name());
    for (int i = 0; i < 100; ++i) {
      const double t = 0.001 + 0.998 * rng.next_open01();
      CHECK(std::abs(g->cdf(g->quantile(t)) - t) <= 1e-10);
    }
  }
}

TEST_CASE("zero mean for the non-hybrid zero-mean generators") {
  for (const auto& g : {make_pareto(0.25), make_pareto(0.5), make_pareto(0.75),
                        make_exponential(), make_shifted_exponential()}) {
    CAPTURE(g->name());
    const double mean =
        quantile_integral([&](double t) { return g->quantile(t); }, 1.0);
    CHECK(std::abs(mean) <= 1e-8);
  }
  // The inverse-square component integrates to -1; hybrids inherit the
  // deficit and report it through f(1).
  auto g2 = make_inverse_square();
  CHECK(g2->integrated_quantile(1.0) == doctest::Approx(-1.0));
  CHECK(corollary_hybrid(1.0)->integrated_quantile(1.0) ==
        doctest::Approx(-1.0));
}

TEST_CASE("integrated quantile is convex") {
  SplitMix64 rng(13);
  for (const auto& g : catalog()) {
    CAPTURE(g->name());
    for (int i = 0; i < 100; ++i) {
      double a = rng.next_open01(), b = rng.next_open01();
      if (a > b) std::swap(a, b);
      if (b - a < 1e-6) continue;
      const double mid = g->integrated_quantile(0.5 * (a + b));
      const double chord =
          0.5 * (g->integrated_quantile(a) + g->integrated_quantile(b));
      CHECK(mid <= chord + 1e-12);
    }
  }
}

TEST_CASE("pareto closed forms agree with quadrature") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    ParetoGenerator g(alpha);
    CAPTURE(alpha);
    for (double p : {0.1, 0.3, 0.55, 0.9}) {
      const double numeric =
          quantile_integral([&](double t) { return g.quantile(t); }, p);
      CHECK(std::abs(g.integrated_quantile(p) - numeric) <= 1e-8);
    }
    // density at the quantile
    for (double p : {0.05, 0.2, 0.5, 0.95}) {
      const double expected = std::pow(p, 2.0 - alpha) / alpha;
      CHECK(g.density(g.quantile(p)) ==
            doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("hybrid integrated quantile matches quadrature of its quantile") {
  auto hybrid = corollary_hybrid(1.0);
  for (double p : {0.1, 0.5, 0.9}) {
    const double numeric = quantile_integral(
        [&](double t) { return hybrid->quantile(t); }, p);
    CHECK(std::abs(hybrid->integrated_quantile(p) - numeric) <= 1e-8);
  }
}

TEST_CASE("hybrid identity: gamma (g1 + g2) in closed form") {
  for (double gamma : {1.0, std::sqrt(10.0)}) {
    auto hybrid = corollary_hybrid(gamma);
    CAPTURE(gamma);
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      const double expected =
          -gamma * (std::sqrt(p) + (p - 1.0) * std::log(1.0 - p));
      CHECK(std::abs(hybrid->integrated_quantile(p) - expected) <= 1e-8);
    }
  }
}

TEST_CASE("hybrid density agrees with central differences") {
  auto hybrid = corollary_hybrid(1.0);
  SplitMix64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const double t = 0.05 + 0.9 * rng.next_open01();
    const double s = hybrid->quantile(t);
    const double h = 1e-6 * std::max(1.0, std::abs(s));
    const double fd = (hybrid->cdf(s + h) - hybrid->cdf(s - h)) / (2.0 * h);
    const double an = hybrid->density(s);
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("harmonic_combine degenerate and idempotent cases") {
  auto p = make_pareto(0.5);
  auto single = harmonic_combine({{1.0, p}});
  auto split = harmonic_combine({{0.5, p}, {0.5, p}});
  for (double t : {0.05, 0.3, 0.6, 0.9}) {
    CHECK(single->quantile(t) == doctest::Approx(p->quantile(t)));
    CHECK(split->quantile(t) ==
          doctest::Approx(p->quantile(t)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(harmonic_combine({{-1.0, p}}), ConfigError);
  CHECK_THROWS_AS(harmonic_combine({}), ConfigError);
}

TEST_CASE("strong convexity floor eta / L on a grid") {
  struct Case {
    GeneratorPtr g;
    double eta;
  };
  for (const Case& c : {Case{make_pareto(0.5), 1.0},
                        Case{make_pareto(0.5), 3.0},
                        Case{make_exponential(), 1.0},
                        Case{make_inverse_square(), 2.0}}) {
    CAPTURE(c.g->name());
    const double L = *c.g->lipschitz_bound();
    for (int i = 1; i <= 100; ++i) {
      const double p = 0.01 + 0.98 * (i - 1) / 99.0;
      // second derivative of eta*f via the inverse function theorem
      const double curvature = c.eta / c.g->density(c.g->quantile(p));
      CHECK(curvature >= c.eta / L - 1e-9);
    }
  }
}

TEST_CASE("family cdf applies the min/max clipping") {
  MarginalFamily fam(make_pareto(0.5), 1.0, 4);
  CHECK(fam.cdf(0, -2.0) == 0.0);  // generator argument at its boundary
  CHECK(fam.cdf(0, -1e9) == 0.0);
  CHECK(fam.cdf(0, 1e9) == 1.0);
  // doubling eta halves the argument
  MarginalFamily wide(make_pareto(0.5), 2.0, 1);
  for (double s : {-1.5, -0.2, 0.4, 3.0}) {
    CHECK(wide.cdf(0, s) == doctest::Approx(fam.cdf(0, s / 2.0)));
  }
  // non-decreasing
  double prev = -1.0;
  for (double s = -4.0; s <= 4.0; s += 0.05) {
    const double v = fam.cdf(0, s);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("family quantile: scaling, reflection, round trip") {
  MarginalFamily fam(make_pareto(0.5), 1.0, 4);
  // x = 1 - 1/K with K=4 lands on -F^{-1}(1/4) = 0
  CHECK(fam.quantile(0, 0.75) == doctest::Approx(0.0).epsilon(1e-14));
  MarginalFamily scaled(make_pareto(0.5), 3.0, 1);
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const double x = 0.001 + 0.998 * rng.next_open01();
    CHECK(scaled.quantile(0, x) == doctest::Approx(3.0 * fam.quantile(0, x)));
    CHECK(std::abs(fam.cdf(0, fam.quantile(0, x)) - x) <= 1e-12);
  }
  // zero mean of the reflected per-arm quantile at eta = 1
  const double mean =
      quantile_integral([&](double x) { return fam.quantile(0, x); }, 1.0);
  CHECK(std::abs(mean) <= 1e-8);
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(ParetoGenerator(0.0), ConfigError);
  CHECK_THROWS_AS(ParetoGenerator(1.0), ConfigError);
  ParetoGenerator g(0.5);
  CHECK_THROWS_AS(g.cdf(2.5), DomainError);
  CHECK_THROWS_AS(g.quantile(0.0), RangeError);
  CHECK_THROWS_AS(g.quantile(1.0), RangeError);
  CHECK_THROWS_AS(g.integrated_quantile(1.5), RangeError);
  CHECK_THROWS_AS(InverseSquareGenerator{}.cdf(0.5), DomainError);

  MarginalFamily fam(make_pareto(0.5), 1.0, 2);
  CHECK_THROWS_AS(fam.cdf(2, 0.0), dopa::IndexError);
  CHECK_THROWS_AS(fam.quantile(-1, 0.5), dopa::IndexError);
  CHECK_THROWS_AS(MarginalFamily(make_pareto(0.5), -1.0, 2), ConfigError);
  CHECK_THROWS_AS(MarginalFamily(make_pareto(0.5), std::vector<double>{}),
                  ConfigError);
}
