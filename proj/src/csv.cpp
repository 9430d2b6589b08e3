#include "dopa/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dopa/errors.hpp"

namespace dopa {

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

}  // namespace

std::string trace_csv(const RunTrace& trace) {
  std::string out = "seed,t,arm,reward,probability,cum_pseudo_regret\n";
  for (const RoundRecord& r : trace.rounds) {
    out += std::to_string(trace.seed);
    out += ',';
    out += std::to_string(r.t);
    out += ',';
    out += std::to_string(r.arm);
    out += ',';
    append_number(out, r.reward);
    out += ',';
    append_number(out, r.probability);
    out += ',';
    append_number(out, r.cum_regret);
    out += '\n';
  }
  return out;
}

std::string aggregate_csv(const AggregateStats& stats, int arms,
                          double alpha) {
  std::string out = "t,mean,min,max,stderr,bound_anytime,bound_tuned\n";
  for (int t = 1; t <= stats.horizon; ++t) {
    const double kt = static_cast<double>(arms) * t;
    out += std::to_string(t);
    out += ',';
    append_number(out, stats.mean[t - 1]);
    out += ',';
    append_number(out, stats.min[t - 1]);
    out += ',';
    append_number(out, stats.max[t - 1]);
    out += ',';
    append_number(out, stats.stderr_mean[t - 1]);
    out += ',';
    append_number(out, 4.0 * std::sqrt(kt) + 1.0);
    out += ',';
    append_number(out, std::sqrt(kt / (alpha * (1.0 - alpha))));
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace dopa
