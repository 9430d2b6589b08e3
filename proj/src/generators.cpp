#include "dopa/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dopa/errors.hpp"

namespace dopa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Margin used when clamping an argument onto the open domain boundary.
constexpr double kDomainMargin = 1e-12;
// Absolute tolerance (in t) for inverting a hybrid quantile.
constexpr double kHybridCdfTol = 1e-14;
// Smallest quantile argument a hybrid inversion will report.
constexpr double kTinyT = 1e-15;

void check_unit_open(double t, const char* who) {
  if (!(t > 0.0 && t < 1.0)) {
    throw RangeError(std::string(who) + ": argument " + std::to_string(t) +
                     " outside (0,1)");
  }
}

void check_unit_closed(double p, const char* who) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw RangeError(std::string(who) + ": argument " + std::to_string(p) +
                     " outside [0,1]");
  }
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

}  // namespace

double MarginalGenerator::quantile_slope(double t) const {
  return 1.0 / density(quantile(t));
}

double MarginalGenerator::domain_sup() const { return kInf; }

double clamped_cdf(const MarginalGenerator& g, double s) {
  const double sup = g.domain_sup();
  if (s >= sup) s = sup - kDomainMargin;
  return g.cdf(s);
}

// -- ParetoGenerator ----------------------------------------------------------

ParetoGenerator::ParetoGenerator(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("pareto: alpha must lie in (0,1), got " +
                      std::to_string(alpha));
  }
}

std::string ParetoGenerator::name() const {
  return "pareto(alpha=" + format_number(alpha_) + ")";
}

double ParetoGenerator::domain_sup() const { return 1.0 / (1.0 - alpha_); }

double ParetoGenerator::cdf(double s) const {
  const double base = 1.0 / alpha_ - s * (1.0 - alpha_) / alpha_;
  if (!(base > 0.0)) {
    throw DomainError(name() + ": cdf argument " + std::to_string(s) +
                      " at or beyond the domain boundary " +
                      std::to_string(domain_sup()));
  }
  return std::pow(base, -1.0 / (1.0 - alpha_));
}

double ParetoGenerator::quantile(double t) const {
  check_unit_open(t, "pareto quantile");
  return (1.0 - alpha_ * std::pow(t, alpha_ - 1.0)) / (1.0 - alpha_);
}

double ParetoGenerator::density(double s) const {
  const double base = 1.0 / alpha_ - s * (1.0 - alpha_) / alpha_;
  if (!(base > 0.0)) {
    throw DomainError(name() + ": density argument " + std::to_string(s) +
                      " at or beyond the domain boundary " +
                      std::to_string(domain_sup()));
  }
  // F'(s) = (1/a) base^{-(2-a)/(1-a)}
  return std::pow(base, -(2.0 - alpha_) / (1.0 - alpha_)) / alpha_;
}

double ParetoGenerator::quantile_slope(double t) const {
  check_unit_open(t, "pareto quantile_slope");
  return alpha_ * std::pow(t, alpha_ - 2.0);
}

double ParetoGenerator::integrated_quantile(double p) const {
  check_unit_closed(p, "pareto integrated_quantile");
  if (p == 0.0 || p == 1.0) return 0.0;
  return (p - std::pow(p, alpha_)) / (1.0 - alpha_);
}

std::optional<double> ParetoGenerator::lipschitz_bound() const {
  // sup_p F'(F^{-1}(p)) = sup_p p^{2-a}/a = 1/a.
  return 1.0 / alpha_;
}

// -- ExponentialGenerator -----------------------------------------------------

std::string ExponentialGenerator::name() const { return "exp3"; }

double ExponentialGenerator::cdf(double s) const { return std::exp(s - 1.0); }

double ExponentialGenerator::quantile(double t) const {
  check_unit_open(t, "exp3 quantile");
  return 1.0 + std::log(t);
}

double ExponentialGenerator::density(double s) const {
  return std::exp(s - 1.0);
}

double ExponentialGenerator::quantile_slope(double t) const {
  check_unit_open(t, "exp3 quantile_slope");
  return 1.0 / t;
}

double ExponentialGenerator::integrated_quantile(double p) const {
  check_unit_closed(p, "exp3 integrated_quantile");
  if (p == 0.0) return 0.0;
  return p * std::log(p);
}

std::optional<double> ExponentialGenerator::lipschitz_bound() const {
  // F' = F, and F <= 1 on the relevant region.
  return 1.0;
}

// -- ShiftedExponentialGenerator ----------------------------------------------

std::string ShiftedExponentialGenerator::name() const { return "shifted_exp"; }

double ShiftedExponentialGenerator::cdf(double s) const {
  return 1.0 - std::exp(-(s + 1.0));
}

double ShiftedExponentialGenerator::quantile(double t) const {
  check_unit_open(t, "shifted_exp quantile");
  return -1.0 - std::log1p(-t);
}

double ShiftedExponentialGenerator::density(double s) const {
  return std::exp(-(s + 1.0));
}

double ShiftedExponentialGenerator::quantile_slope(double t) const {
  check_unit_open(t, "shifted_exp quantile_slope");
  return 1.0 / (1.0 - t);
}

double ShiftedExponentialGenerator::integrated_quantile(double p) const {
  check_unit_closed(p, "shifted_exp integrated_quantile");
  if (p == 1.0) return 0.0;
  return (1.0 - p) * std::log1p(-p);
}

std::optional<double> ShiftedExponentialGenerator::lipschitz_bound() const {
  // F' = exp(-(s+1)) <= 1 on {s >= -1} = {F(s) >= 0}.
  return 1.0;
}

// -- InverseSquareGenerator ---------------------------------------------------

std::string InverseSquareGenerator::name() const { return "inv_square"; }

double InverseSquareGenerator::domain_sup() const { return 0.0; }

double InverseSquareGenerator::cdf(double s) const {
  if (!(s < 0.0)) {
    throw DomainError(name() + ": cdf argument " + std::to_string(s) +
                      " at or beyond the domain boundary 0");
  }
  return 1.0 / (4.0 * s * s);
}

double InverseSquareGenerator::quantile(double t) const {
  check_unit_open(t, "inv_square quantile");
  return -0.5 / std::sqrt(t);
}

double InverseSquareGenerator::density(double s) const {
  if (!(s < 0.0)) {
    throw DomainError(name() + ": density argument " + std::to_string(s) +
                      " at or beyond the domain boundary 0");
  }
  return -0.5 / (s * s * s);
}

double InverseSquareGenerator::quantile_slope(double t) const {
  check_unit_open(t, "inv_square quantile_slope");
  return 0.25 * std::pow(t, -1.5);
}

double InverseSquareGenerator::integrated_quantile(double p) const {
  check_unit_closed(p, "inv_square integrated_quantile");
  return -std::sqrt(p);
}

std::optional<double> InverseSquareGenerator::lipschitz_bound() const {
  // F'(F^{-1}(p)) = 4 p^{3/2} <= 4.
  return 4.0;
}

// -- HybridGenerator ----------------------------------------------------------

HybridGenerator::HybridGenerator(std::vector<Component> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) {
    throw ConfigError("hybrid: at least one weighted component required");
  }
  for (const auto& [w, g] : parts_) {
    if (!(w > 0.0)) {
      throw ConfigError("hybrid: component weight must be positive, got " +
                        std::to_string(w));
    }
    if (!g) throw ConfigError("hybrid: null component generator");
  }
}

std::string HybridGenerator::name() const {
  std::string out = "hybrid(";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i > 0) out += " + ";
    out += format_number(parts_[i].first) + "*" + parts_[i].second->name();
  }
  return out + ")";
}

double HybridGenerator::quantile(double t) const {
  check_unit_open(t, "hybrid quantile");
  double sum = 0.0;
  for (const auto& [w, g] : parts_) sum += w * g->quantile(t);
  return sum;
}

double HybridGenerator::quantile_slope(double t) const {
  check_unit_open(t, "hybrid quantile_slope");
  double sum = 0.0;
  for (const auto& [w, g] : parts_) sum += w * g->quantile_slope(t);
  return sum;
}

double HybridGenerator::cdf(double s) const {
  // Invert the quantile identity by bisection on t. The quantile is strictly
  // increasing, so the bracket is valid once the endpoints straddle s.
  double lo = kTinyT;
  double hi = 1.0 - kTinyT;
  if (s <= quantile(lo)) return lo;
  if (s >= quantile(hi)) return hi;
  while (hi - lo > kHybridCdfTol) {
    const double mid = 0.5 * (lo + hi);
    if (quantile(mid) < s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double HybridGenerator::density(double s) const {
  return 1.0 / quantile_slope(cdf(s));
}

double HybridGenerator::integrated_quantile(double p) const {
  check_unit_closed(p, "hybrid integrated_quantile");
  double sum = 0.0;
  for (const auto& [w, g] : parts_) sum += w * g->integrated_quantile(p);
  return sum;
}

// -- factories ----------------------------------------------------------------

GeneratorPtr make_pareto(double alpha) {
  return std::make_shared<ParetoGenerator>(alpha);
}

GeneratorPtr make_exponential() {
  return std::make_shared<ExponentialGenerator>();
}

GeneratorPtr make_shifted_exponential() {
  return std::make_shared<ShiftedExponentialGenerator>();
}

GeneratorPtr make_inverse_square() {
  return std::make_shared<InverseSquareGenerator>();
}

GeneratorPtr harmonic_combine(std::vector<HybridGenerator::Component> parts) {
  return std::make_shared<HybridGenerator>(std::move(parts));
}

// -- MarginalFamily -------------------------------------------------------------

MarginalFamily::MarginalFamily(GeneratorPtr generator, std::vector<double> eta)
    : gen_(std::move(generator)), eta_(std::move(eta)) {
  if (!gen_) throw ConfigError("family: null generator");
  if (eta_.empty()) throw ConfigError("family: needs at least one arm");
  for (double e : eta_) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw ConfigError("family: eta entries must be positive and finite");
    }
  }
}

MarginalFamily::MarginalFamily(GeneratorPtr generator, double eta, int arms)
    : MarginalFamily(std::move(generator),
                     std::vector<double>(static_cast<std::size_t>(
                                             arms > 0 ? arms : 0),
                                         eta)) {
  if (arms < 1) throw ConfigError("family: arms must be >= 1");
}

void MarginalFamily::check_arm(int k) const {
  if (k < 0 || k >= arms()) {
    throw IndexError("family: arm index " + std::to_string(k) +
                     " outside [0," + std::to_string(arms()) + ")");
  }
}

double MarginalFamily::eta(int k) const {
  check_arm(k);
  return eta_[k];
}

bool MarginalFamily::uniform_eta() const {
  for (double e : eta_) {
    if (e != eta_.front()) return false;
  }
  return true;
}

double MarginalFamily::min_eta() const {
  return *std::min_element(eta_.begin(), eta_.end());
}

double MarginalFamily::cdf(int k, double s) const {
  check_arm(k);
  const double v = 1.0 - clamped_cdf(*gen_, -s / eta_[k]);
  if (v <= 0.0) return 0.0;  // also absorbs -inf from an overflowed cdf
  if (v >= 1.0) return 1.0;
  return v;
}

double MarginalFamily::quantile(int k, double x) const {
  check_arm(k);
  check_unit_open(x, "family quantile");
  return -eta_[k] * gen_->quantile(1.0 - x);
}

double MarginalFamily::density(int k, double s) const {
  check_arm(k);
  const double arg = -s / eta_[k];
  if (arg >= gen_->domain_sup()) return 0.0;
  const double F = clamped_cdf(*gen_, arg);
  if (F <= 0.0 || F >= 1.0) return 0.0;  // clipped region
  return gen_->density(arg) / eta_[k];
}

}  // namespace dopa
