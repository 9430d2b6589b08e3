#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dopa {

// A marginal generator: a strictly increasing differentiable scalar function
// F whose range covers (0,1) and whose quantile integrates to zero over the
// unit interval. Every per-arm noise CDF is derived from it by scaling and
// reflection, and its integrated quantile f doubles as the regularizer that
// makes the sampler equivalent to a follow-the-regularized-leader step.
//
// All implementations are immutable after construction and safe for
// unrestricted concurrent use.
class MarginalGenerator {
 public:
  virtual ~MarginalGenerator() = default;

  // Canonical spec-string form, e.g. "pareto(alpha=0.5)".
  virtual std::string name() const = 0;

  // F(s). Strictly increasing. Throws DomainError outside the effective
  // domain. The value may exceed 1 inside the domain; family-level clipping
  // takes care of that.
  virtual double cdf(double s) const = 0;

  // F^{-1}(t) for t in (0,1). Throws RangeError otherwise.
  virtual double quantile(double t) const = 0;

  // F'(s) >= 0. Throws DomainError outside the effective domain.
  virtual double density(double s) const = 0;

  // d/dt F^{-1}(t). Defaults to 1 / F'(F^{-1}(t)).
  virtual double quantile_slope(double t) const;

  // f(p) = integral of the quantile over [0, p], for p in [0, 1]. Convex,
  // f(0) = 0, and f(1) = 0 whenever the generator has zero mean. Endpoint
  // values are returned exactly, not by quadrature.
  virtual double integrated_quantile(double p) const = 0;

  // sup of F' over {s : F(s) in [0,1]} when known in closed form. Drives the
  // bisection resolution; absent for hybrids.
  virtual std::optional<double> lipschitz_bound() const { return std::nullopt; }

  // Upper end of the effective domain; F diverges or is undefined at or past
  // it. +infinity when F is defined on all of R.
  virtual double domain_sup() const;
};

using GeneratorPtr = std::shared_ptr<const MarginalGenerator>;

// F evaluated after clamping s into the effective domain (boundary minus a
// small margin). Never throws for finite s; may return values above 1 or
// +infinity, which the family-level min/max clipping absorbs.
double clamped_cdf(const MarginalGenerator& g, double s);

// Shifted Pareto generator F(s) = (1/a - s(1-a)/a)^(-1/(1-a)), a in (0,1),
// defined for s < 1/(1-a). Closed forms:
//   F^{-1}(t) = (1 - a t^(a-1)) / (1-a)
//   F'(F^{-1}(p)) = p^(2-a) / a
//   f(p) = (p - p^a) / (1-a)        (the Tsallis-entropy summand)
// Lipschitz bound 1/a.
class ParetoGenerator final : public MarginalGenerator {
 public:
  explicit ParetoGenerator(double alpha);
  std::string name() const override;
  double cdf(double s) const override;
  double quantile(double t) const override;
  double density(double s) const override;
  double quantile_slope(double t) const override;
  double integrated_quantile(double p) const override;
  std::optional<double> lipschitz_bound() const override;
  double domain_sup() const override;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

// Exponential generator F(s) = exp(s-1) with quantile 1 + log(t) and
// integrated quantile p log(p). The sampler's arm probabilities under this
// generator coincide with the Exp3 softmax. Lipschitz bound 1.
class ExponentialGenerator final : public MarginalGenerator {
 public:
  std::string name() const override;
  double cdf(double s) const override;
  double quantile(double t) const override;
  double density(double s) const override;
  double quantile_slope(double t) const override;
  double integrated_quantile(double p) const override;
  std::optional<double> lipschitz_bound() const override;
};

// Exponential law shifted to start at -1: F(s) = 1 - exp(-(s+1)), quantile
// -1 - log(1-t), integrated quantile (1-p) log(1-p). Zero mean; shows up as
// the first component of the hybrid regularizer.
class ShiftedExponentialGenerator final : public MarginalGenerator {
 public:
  std::string name() const override;
  double cdf(double s) const override;
  double quantile(double t) const override;
  double density(double s) const override;
  double quantile_slope(double t) const override;
  double integrated_quantile(double p) const override;
  std::optional<double> lipschitz_bound() const override;
};

// Inverse-square tail on the negative axis: F(s) = (-2s)^(-2) for s < 0,
// quantile -(2 sqrt(t))^(-1), integrated quantile -sqrt(p). Not zero-mean on
// its own (the quantile integrates to -1); intended as a hybrid component.
class InverseSquareGenerator final : public MarginalGenerator {
 public:
  std::string name() const override;
  double cdf(double s) const override;
  double quantile(double t) const override;
  double density(double s) const override;
  double quantile_slope(double t) const override;
  double integrated_quantile(double p) const override;
  std::optional<double> lipschitz_bound() const override;
  double domain_sup() const override;
};

// Weighted harmonic combination of generators: the quantile is the weighted
// sum of component quantiles, so F itself is evaluated by scalar bisection on
// that identity. The integrated quantile is the weighted sum of component
// integrated quantiles, i.e. the hybrid regularizer.
class HybridGenerator final : public MarginalGenerator {
 public:
  using Component = std::pair<double, GeneratorPtr>;

  explicit HybridGenerator(std::vector<Component> parts);
  std::string name() const override;
  double cdf(double s) const override;
  double quantile(double t) const override;
  double density(double s) const override;
  double quantile_slope(double t) const override;
  double integrated_quantile(double p) const override;
  const std::vector<Component>& components() const { return parts_; }

 private:
  std::vector<Component> parts_;
};

// Factory helpers.
GeneratorPtr make_pareto(double alpha);
GeneratorPtr make_exponential();
GeneratorPtr make_shifted_exponential();
GeneratorPtr make_inverse_square();

// Builds the generator whose quantile is sum_i weight_i * G_i^{-1}. Weights
// must be positive and at least one component is required (a single part
// degenerates to a rescaled copy of it). Zero mean is not enforced here; the
// combined f(1) reports how far off the combination is.
GeneratorPtr harmonic_combine(std::vector<HybridGenerator::Component> parts);

// Per-arm marginal CDF family F_k(s) = min{1, max{0, 1 - F(-s/eta_k)}} with
// positive per-arm scales eta_k. Immutable; cheap to copy.
class MarginalFamily {
 public:
  MarginalFamily(GeneratorPtr generator, std::vector<double> eta);
  MarginalFamily(GeneratorPtr generator, double eta, int arms);

  int arms() const { return static_cast<int>(eta_.size()); }
  double eta(int k) const;
  const std::vector<double>& eta() const { return eta_; }
  bool uniform_eta() const;
  double min_eta() const;
  const MarginalGenerator& generator() const { return *gen_; }
  const GeneratorPtr& generator_ptr() const { return gen_; }

  // F_k(s), clipped into [0, 1]; non-decreasing in s.
  double cdf(int k, double s) const;

  // F_k^{-1}(x) = -eta_k F^{-1}(1 - x) for x in (0, 1).
  double quantile(int k, double x) const;

  // F_k'(s); zero on the clipped regions.
  double density(int k, double s) const;

 private:
  void check_arm(int k) const;

  GeneratorPtr gen_;
  std::vector<double> eta_;
};

}  // namespace dopa
