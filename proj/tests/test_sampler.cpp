#include "dopa/sampler.hpp"

#include <cmath>
#include <vector>

#include <doctest.h>

#include "dopa/errors.hpp"
#include "dopa/rng.hpp"
#include "testing_util.hpp"

using namespace dopa;
using dopa_test::inf_dist;
using dopa_test::random_u;

namespace {

ArmSamplingRequest pareto_request(std::vector<double> u, double alpha,
                                  double eta, double epsilon = 1e-8) {
  const int k = static_cast<int>(u.size());
  return ArmSamplingRequest{std::move(u),
                            MarginalFamily(make_pareto(alpha), eta, k),
                            epsilon, std::nullopt};
}

}  // namespace

TEST_CASE("symmetric estimates sample uniformly with zero iterations") {
  auto res = bisection_sample(pareto_request({0, 0, 0, 0}, 0.5, 1.0));
  CHECK(res.iterations == 0);  // bracket collapses on entry
  for (double p : res.p_hat) CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("single arm short-circuits") {
  auto res = bisection_sample(pareto_request({-3.0}, 0.5, 1.0));
  CHECK(res.p_hat == std::vector<double>{1.0});
  CHECK(res.iterations == 0);
  CHECK(dual_root_newton(pareto_request({-3.0}, 0.5, 1.0)).p_hat ==
        std::vector<double>{1.0});
  CHECK(generic_convex_baseline(pareto_request({-3.0}, 0.5, 1.0)).p_hat ==
        std::vector<double>{1.0});
}

TEST_CASE("bisection matches the dual-root oracle") {
  auto bis = bisection_sample(pareto_request({0.0, -1.0}, 0.5, 1.0));
  auto newt = dual_root_newton(pareto_request({0.0, -1.0}, 0.5, 1.0));
  CHECK(inf_dist(bis.p_hat, newt.p_hat) <= 1e-8);

  SplitMix64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const int K = 2 << (trial % 4);
    auto req = pareto_request(random_u(rng, K, -100.0, 0.0), 0.5, 1.0);
    auto a = bisection_sample(req);
    auto b = dual_root_newton(req);
    CHECK(inf_dist(a.p_hat, b.p_hat) <= 1e-8 + 1e-9);
  }
}

TEST_CASE("iteration count respects the worked bound at K=16") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto req = pareto_request(random_u(rng, 16, -100.0, 0.0), 0.5, 1.0);
    auto res = bisection_sample(req);
    // ceil(log2(2 * 2 * 4 * 100 / 1e-8)) with span <= 100
    CHECK(res.iterations <= 38);
    auto cap = theoretical_iteration_cap(req);
    REQUIRE(cap.has_value());
    CHECK(res.iterations <= *cap);
  }
}

TEST_CASE("modulus of continuity resolution") {
  MarginalFamily fam(make_pareto(0.5), 1.0, 4);
  CHECK(modulus_delta(fam, 1e-8) == doctest::Approx(1.25e-9).epsilon(1e-12));
  CHECK(modulus_delta(fam, 2e-8) ==
        doctest::Approx(2.5e-9).epsilon(1e-12));  // linear in epsilon
  MarginalFamily wide(make_pareto(0.5), 10.0, 4);
  CHECK(modulus_delta(wide, 1e-8) ==
        doctest::Approx(1.25e-8).epsilon(1e-12));  // linear in eta
  MarginalFamily mixed(make_pareto(0.5), std::vector<double>{1.0, 2.0, 4.0});
  CHECK(modulus_delta(mixed, 1e-8) ==
        doctest::Approx(1e-8 / (2.0 * 2.0 * std::sqrt(3.0))));

  MarginalFamily hybrid(
      harmonic_combine({{1.0, make_shifted_exponential()},
                        {1.0, make_inverse_square()}}),
      1.0, 4);
  CHECK_THROWS_AS(modulus_delta(hybrid, 1e-8), ConfigError);
  CHECK(modulus_delta(hybrid, 1e-8, 1e-10) == doctest::Approx(1e-10));
}

TEST_CASE("hybrid families sample once a resolution is supplied") {
  auto gen = harmonic_combine(
      {{1.0, make_shifted_exponential()}, {1.0, make_inverse_square()}});
  const double L = estimate_lipschitz(*gen);
  CHECK(L > 0.0);
  const int K = 4;
  MarginalFamily fam(gen, 1.0, K);
  SplitMix64 rng(17);
  ArmSamplingRequest req{random_u(rng, K, -5.0, 0.0), fam, 1e-8,
                         1e-8 / (2.0 * L * std::sqrt(K))};
  auto bis = bisection_sample(req);
  auto newt = dual_root_newton(req);
  CHECK(inf_dist(bis.p_hat, newt.p_hat) <= 1e-8 + 1e-9);
}

TEST_CASE("newton oracle properties") {
  // exp3 family reduces to the softmax closed form
  SplitMix64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 3 + trial % 5;
    std::vector<double> u = random_u(rng, K, -10.0, 0.0);
    ArmSamplingRequest req{u, MarginalFamily(make_exponential(), 1.0, K),
                           1e-8, std::nullopt};
    auto newt = dual_root_newton(req);
    CHECK(inf_dist(newt.p_hat, exp3_closed_form(u, 1.0)) <= 1e-12);
  }
  // raising one coordinate never lowers its probability
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> u = random_u(rng, 6, -20.0, 0.0);
    auto base = dual_root_newton(pareto_request(u, 0.5, 1.0));
    u[0] += 1.0;
    auto bumped = dual_root_newton(pareto_request(u, 0.5, 1.0));
    CHECK(bumped.p_hat[0] >= base.p_hat[0] - 1e-12);
  }
}

TEST_CASE("exp3 closed form") {
  auto p = exp3_closed_form({0.0, std::log(2.0)}, 1.0);
  CHECK(p[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // shift invariance
  auto q = exp3_closed_form({5.0, 5.0 + std::log(2.0)}, 1.0);
  CHECK(inf_dist(p, q) <= 1e-14);
  for (double v : exp3_closed_form({3.0, 3.0, 3.0}, 2.0)) {
    CHECK(v == doctest::Approx(1.0 / 3.0));
  }
  // bisection with the exponential generator agrees
  SplitMix64 rng(33);
  for (int trial = 0; trial < 25; ++trial) {
    const int K = 2 + trial % 7;
    const double eta = 0.5 + 2.0 * rng.next_open01();
    std::vector<double> u = random_u(rng, K, -10.0, 0.0);
    ArmSamplingRequest req{u, MarginalFamily(make_exponential(), eta, K),
                           1e-8, std::nullopt};
    CHECK(inf_dist(bisection_sample(req).p_hat, exp3_closed_form(u, eta)) <=
          1e-8);
  }
}

TEST_CASE("potential value and optimality") {
  auto req = pareto_request({0, 0, 0, 0}, 0.5, 1.0);
  CHECK(potential_value(req, {0.25, 0.25, 0.25, 0.25}) ==
        doctest::Approx(2.0).epsilon(1e-12));

  SplitMix64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 4;
    auto r = pareto_request(random_u(rng, K, -10.0, 0.0), 0.5, 1.0);
    auto opt = dual_root_newton(r);
    const double at_opt = potential_value(r, opt.p_hat);
    CHECK(at_opt >=
          potential_value(r, std::vector<double>(K, 1.0 / K)) - 1e-10);
    // random feasible point
    std::vector<double> p(K);
    double s = 0.0;
    for (double& v : p) {
      v = rng.next_open01();
      s += v;
    }
    for (double& v : p) v /= s;
    CHECK(at_opt >= potential_value(r, p) - 1e-10);
    // adding a constant adds exactly that constant at fixed p
    auto shifted = r;
    for (double& v : shifted.u) v += 3.5;
    CHECK(potential_value(shifted, opt.p_hat) ==
          doctest::Approx(at_opt + 3.5).epsilon(1e-12));
  }
  CHECK_THROWS_AS(potential_value(req, {0.9, 0.0, 0.0, 0.0}), InputError);
}

TEST_CASE("baseline solver agrees with the oracle") {
  auto sym = generic_convex_baseline(pareto_request({0, 0, 0}, 0.5, 1.0));
  for (double p : sym.p_hat) CHECK(p == doctest::Approx(1.0 / 3.0));

  SplitMix64 rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    auto req = pareto_request(random_u(rng, 64, -100.0, 0.0), 0.5, 1.0);
    auto eg = generic_convex_baseline(req);
    auto bis = bisection_sample(req);
    CHECK(inf_dist(eg.p_hat, bis.p_hat) <= 1e-5);
  }
}

TEST_CASE("baseline stays robust on near-flat and mixed-scale instances") {
  // Near-flat estimates put the solver where objective gains sink below
  // double resolution almost immediately; these used to wedge the line
  // search. Sweep narrow and wide spans across alphas and scales.
  SplitMix64 rng(314);
  const double spans[] = {0.05, 0.5, 1.0, 100.0};
  const double alphas[] = {0.25, 0.5, 0.75};
  const double etas[] = {0.5, 1.0, 10.0};
  for (double span : spans) {
    for (double alpha : alphas) {
      for (double eta : etas) {
        for (int K : {2, 3, 16}) {
          CAPTURE(span);
          CAPTURE(alpha);
          CAPTURE(eta);
          CAPTURE(K);
          auto req = pareto_request(random_u(rng, K, -span, 0.0), alpha, eta);
          auto eg = generic_convex_baseline(req);
          auto oracle = dual_root_newton(req);
          CHECK(inf_dist(eg.p_hat, oracle.p_hat) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("simplex exactness of every sampler output") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    auto req = pareto_request(random_u(rng, 8, -50.0, 0.0), 0.5, 1.0);
    for (const auto& res :
         {bisection_sample(req), dual_root_newton(req),
          generic_convex_baseline(req)}) {
      double sum = 0.0;
      for (double p : res.p_hat) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("translation invariance, scale coupling, monotonicity, positivity") {
  SplitMix64 rng(101);
  const double eps = 1e-8;
  for (int trial = 0; trial < 25; ++trial) {
    const int K = 6;
    std::vector<double> u = random_u(rng, K, -40.0, 0.0);
    auto base = bisection_sample(pareto_request(u, 0.5, 1.0, eps));

    // translation
    std::vector<double> shifted = u;
    for (double& v : shifted) v += 7.25;
    auto tr = bisection_sample(pareto_request(shifted, 0.5, 1.0, eps));
    CHECK(inf_dist(base.p_hat, tr.p_hat) <= 2.0 * eps);

    // scale coupling p(lambda u; eta) = p(u; eta/lambda)
    for (double lambda : {0.5, 2.0, 10.0}) {
      std::vector<double> lu = u;
      for (double& v : lu) v *= lambda;
      auto left = bisection_sample(pareto_request(lu, 0.5, 1.0, eps));
      auto right =
          bisection_sample(pareto_request(u, 0.5, 1.0 / lambda, eps));
      CHECK(inf_dist(left.p_hat, right.p_hat) <= 2.0 * eps);
    }

    // lowering a coordinate never raises its probability
    std::vector<double> lower = u;
    lower[2] -= 5.0;
    auto low = bisection_sample(pareto_request(lower, 0.5, 1.0, eps));
    CHECK(low.p_hat[2] <= base.p_hat[2] + 2.0 * eps);

    // positivity on unbounded-support generators
    for (double p : base.p_hat) CHECK(p > 0.0);
    auto exp_res = bisection_sample(ArmSamplingRequest{
        u, MarginalFamily(make_exponential(), 1.0, K), eps, std::nullopt});
    for (double p : exp_res.p_hat) CHECK(p > 0.0);
  }
}

TEST_CASE("input validation") {
  auto bad = pareto_request({0.0, -1.0}, 0.5, 1.0);
  bad.u[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bisection_sample(bad), InputError);
  bad.u[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(dual_root_newton(bad), InputError);

  auto req = pareto_request({0.0, -1.0}, 0.5, 1.0);
  req.epsilon = 0.0;
  CHECK_THROWS_AS(bisection_sample(req), InputError);

  // hybrid family without a resolution signal
  MarginalFamily hybrid(
      harmonic_combine({{1.0, make_shifted_exponential()},
                        {1.0, make_inverse_square()}}),
      1.0, 2);
  ArmSamplingRequest hreq{{0.0, -1.0}, hybrid, 1e-8, std::nullopt};
  CHECK_THROWS_AS(bisection_sample(hreq), ConfigError);
}
