#include "dopa/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dopa/errors.hpp"
#include "dopa/sampler.hpp"

namespace dopa {

namespace {

// Minimal recursive-descent parser shared by the generator and environment
// grammars.
class Cursor {
 public:
  explicit Cursor(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) {
      fail(std::string("expected '") + c + "'");
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  // Everything up to the next ')' or ',', trimmed (used for file paths).
  std::string raw_value() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ')' && text_[pos_] != ',') {
      ++pos_;
    }
    std::size_t stop = pos_;
    while (stop > start &&
           std::isspace(static_cast<unsigned char>(text_[stop - 1]))) {
      --stop;
    }
    if (start == stop) fail("expected value");
    return text_.substr(start, stop - start);
  }

  std::vector<double> number_list() {
    expect('[');
    std::vector<double> out;
    if (!peek(']')) {
      out.push_back(number());
      while (eat(',')) out.push_back(number());
    }
    expect(']');
    return out;
  }

  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("parse error at position " + std::to_string(pos_) +
                      " in '" + text_ + "': " + what);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

GeneratorPtr parse_generator_expr(Cursor& cur);

GeneratorPtr parse_generator_atom(Cursor& cur) {
  const std::string head = cur.identifier();
  if (head == "pareto") {
    cur.expect('(');
    const std::string key = cur.identifier();
    if (key != "alpha") cur.fail("pareto takes alpha=<value>");
    cur.expect('=');
    const double alpha = cur.number();
    cur.expect(')');
    return make_pareto(alpha);
  }
  if (head == "exp3") return make_exponential();
  if (head == "shifted_exp") return make_shifted_exponential();
  if (head == "inv_square") return make_inverse_square();
  if (head == "hybrid") {
    cur.expect('(');
    std::vector<HybridGenerator::Component> parts;
    do {
      const double w = cur.number();
      cur.expect('*');
      parts.emplace_back(w, parse_generator_expr(cur));
    } while (cur.eat('+'));
    cur.expect(')');
    return harmonic_combine(std::move(parts));
  }
  cur.fail("unknown generator '" + head + "'");
}

GeneratorPtr parse_generator_expr(Cursor& cur) {
  return parse_generator_atom(cur);
}

std::uint64_t to_seed(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v < 0) throw ConfigError("config: seeds must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  throw ConfigError("config: seeds must be integers");
}

}  // namespace

GeneratorPtr parse_generator(const std::string& spec) {
  Cursor cur(spec);
  GeneratorPtr g = parse_generator_expr(cur);
  if (!cur.done()) cur.fail("trailing characters after generator expression");
  return g;
}

std::vector<std::vector<double>> load_reward_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("script: cannot open reward file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      throw ConfigError("script: non-numeric cell in '" + path + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ConfigError("script: no reward rows in '" + path + "'");
  }
  return rows;
}

namespace {

// Environment specs fail at parse time, not first use.
EnvFactory checked(EnvFactory factory) {
  factory();
  return factory;
}

}  // namespace

EnvFactory parse_environment(const std::string& spec, int arms_hint) {
  Cursor cur(spec);
  const std::string head = cur.identifier();
  if (head == "stochastic") {
    cur.expect('(');
    const std::string key = cur.identifier();
    if (key != "means") cur.fail("stochastic takes means=[..]");
    cur.expect('=');
    std::vector<double> means = cur.number_list();
    cur.expect(')');
    if (!cur.done()) cur.fail("trailing characters");
    return checked([means] { return std::make_unique<StochasticEnv>(means); });
  }
  if (head == "ftl_killer") {
    int arms = std::max(arms_hint, 2);
    if (cur.eat('(')) {
      const std::string key = cur.identifier();
      if (key != "arms") cur.fail("ftl_killer takes arms=<count>");
      cur.expect('=');
      arms = static_cast<int>(cur.number());
      cur.expect(')');
    }
    if (!cur.done()) cur.fail("trailing characters");
    return checked([arms] { return std::make_unique<FtlKillerEnv>(arms); });
  }
  if (head == "script") {
    cur.expect('(');
    const std::string key = cur.identifier();
    if (key != "file") cur.fail("script takes file=<path>");
    cur.expect('=');
    const std::string path = cur.raw_value();
    cur.expect(')');
    if (!cur.done()) cur.fail("trailing characters");
    auto rows = load_reward_table(path);  // fail fast on bad files
    return checked([path, rows] { return std::make_unique<TableEnv>(path, rows); });
  }
  if (head == "constrained") {
    cur.expect('(');
    std::vector<double> gaps;
    double budget = 0.0;
    bool saw_gaps = false, saw_budget = false;
    do {
      const std::string key = cur.identifier();
      cur.expect('=');
      if (key == "gaps") {
        gaps = cur.number_list();
        saw_gaps = true;
      } else if (key == "C") {
        budget = cur.number();
        saw_budget = true;
      } else {
        cur.fail("constrained takes gaps=[..] and C=<value>");
      }
    } while (cur.eat(','));
    cur.expect(')');
    if (!cur.done()) cur.fail("trailing characters");
    if (!saw_gaps || !saw_budget) {
      throw ConfigError("constrained: both gaps and C are required");
    }
    return checked([gaps, budget] {
      return std::make_unique<ConstrainedAdversaryEnv>(gaps, budget);
    });
  }
  cur.fail("unknown environment '" + head + "'");
}

Policy parse_policy_fields(const std::string& kind,
                           const std::string& generator_spec,
                           const std::string& eta_text, double epsilon,
                           double alpha) {
  Policy p;
  p.kind = policy_kind_from_name(kind);
  p.epsilon = epsilon;
  p.alpha = alpha;
  if (p.kind != PolicyKind::Ftl) {
    p.generator = parse_generator(generator_spec);
  }
  if (p.kind == PolicyKind::DopaAnytime) {
    p.schedule = EtaSchedule::AnytimeSqrt;
  } else if (eta_text == "tuned") {
    p.schedule = EtaSchedule::TunedHorizon;
  } else if (eta_text == "anytime") {
    p.schedule = EtaSchedule::AnytimeSqrt;
  } else if (eta_text == "gamma_sqrt") {
    p.schedule = EtaSchedule::GammaSqrt;
  } else {
    p.schedule = EtaSchedule::Constant;
    char* end = nullptr;
    p.eta = std::strtod(eta_text.c_str(), &end);
    if (end == eta_text.c_str() || !(p.eta > 0.0)) {
      throw ConfigError("policy: eta must be a positive number or one of "
                        "tuned/anytime/gamma_sqrt, got '" +
                        eta_text + "'");
    }
  }
  // Hybrids carry no closed-form Lipschitz bound; estimate one up front so
  // per-round sampling does not repeat the grid search.
  if (p.generator && !p.generator->lipschitz_bound() &&
      (p.kind == PolicyKind::DopaStatic || p.kind == PolicyKind::DopaAnytime)) {
    p.lipschitz_hint = estimate_lipschitz(*p.generator);
  }
  return p;
}

ExperimentConfig parse_config_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  if (j.contains("env")) cfg.env_spec = j.at("env").get<std::string>();
  if (j.contains("K")) cfg.arms = j.at("K").get<int>();
  if (j.contains("T")) cfg.horizon = j.at("T").get<int>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : j.at("seeds")) cfg.seeds.push_back(to_seed(s));
  }
  if (cfg.arms < 2) throw ConfigError("config: K must be >= 2 for bandit runs");
  if (cfg.horizon < 1) throw ConfigError("config: T must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("config: seeds must be nonempty");

  std::string kind = "dopa_anytime";
  std::string generator = "pareto(alpha=0.5)";
  std::string eta = "1";
  double epsilon = 1e-8;
  double alpha = 0.5;
  if (j.contains("policy")) {
    const auto& pj = j.at("policy");
    if (pj.contains("kind")) kind = pj.at("kind").get<std::string>();
    if (pj.contains("generator")) {
      generator = pj.at("generator").get<std::string>();
    }
    if (pj.contains("eta")) {
      const auto& ej = pj.at("eta");
      eta = ej.is_string() ? ej.get<std::string>()
                           : std::to_string(ej.get<double>());
    }
    if (pj.contains("epsilon")) epsilon = pj.at("epsilon").get<double>();
    if (pj.contains("alpha")) alpha = pj.at("alpha").get<double>();
  }
  cfg.policy = parse_policy_fields(kind, generator, eta, epsilon, alpha);
  return cfg;
}

}  // namespace dopa
