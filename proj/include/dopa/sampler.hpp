#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dopa/generators.hpp"

namespace dopa {

// One arm-sampling computation at cumulative reward estimate u.
struct ArmSamplingRequest {
  std::vector<double> u;
  MarginalFamily family;
  double epsilon = 1e-8;
  // Explicit bisection resolution for families whose generator carries no
  // closed-form Lipschitz bound (hybrids).
  std::optional<double> delta_override{};
};

struct ArmSamplingResult {
  std::vector<double> p_hat;  // simplex vector: nonnegative, sums to 1
  double tau_lo = 0.0;        // final lower bracket of the dual threshold
  int iterations = 0;
  std::string method;
};

// Bracket resolution: epsilon * min_k eta_k / (2 L sqrt(K)) for an
// L-Lipschitz generator, else the caller-supplied override. Throws
// ConfigError when neither is available.
double modulus_delta(const MarginalFamily& family, double epsilon,
                     std::optional<double> override_delta = std::nullopt);

// Numerical stand-in for a missing Lipschitz bound: maximizes
// F'(F^{-1}(t)) over a dense grid with golden-section refinement, then
// inflates slightly so the derived bracket resolution stays conservative.
double estimate_lipschitz(const MarginalGenerator& g);

// Bisection on the dual threshold; the production sampler. Output satisfies
// ||p_hat - grad Phi(u)||_2 <= epsilon.
ArmSamplingResult bisection_sample(const ArmSamplingRequest& req);

// Independent high-precision oracle: safeguarded Newton on the scalar root
// sum_k (1 - F_k(-u_k - tau)) = 1, solved to essentially machine precision.
ArmSamplingResult dual_root_newton(const ArmSamplingRequest& req);

// Softmax closed form matching the exponential generator at scale eta.
std::vector<double> exp3_closed_form(const std::vector<double>& u, double eta);

// Objective value sum_k u_k p_k - sum_k eta_k f(p_k) at a feasible p.
// Throws InputError if p strays from the simplex by more than 1e-9.
double potential_value(const ArmSamplingRequest& req,
                       const std::vector<double>& p);

// Deliberately generic solver used as the timing baseline: exponentiated
// gradient ascent on the simplex with a backtracking line search, stopping
// once the per-step probability change drops to 1e-10 and the stationarity
// residual certifies the solution. Throws ConvergenceError past 1e6
// iterations.
ArmSamplingResult generic_convex_baseline(const ArmSamplingRequest& req);

// Ceil of the theoretical iteration cap log2(2 L sqrt(K) (u_max - u_min) /
// (epsilon eta)) for a Lipschitz generator with uniform eta. nullopt when no
// bound applies; 0 when u is constant.
std::optional<int> theoretical_iteration_cap(const ArmSamplingRequest& req);

}  // namespace dopa
