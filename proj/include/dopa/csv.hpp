#pragma once

#include <optional>
#include <string>

#include "dopa/bandit.hpp"

namespace dopa {

// Per-round trace rows: "seed,t,arm,reward,probability,cum_pseudo_regret".
// Arm indices are zero-based. Deterministic given the trace.
std::string trace_csv(const RunTrace& trace);

// Aggregate rows across seeds:
// "t,mean,min,max,stderr,bound_anytime,bound_tuned" where the overlays are
// 4*sqrt(K t) + 1 and sqrt(K t / (alpha (1 - alpha))).
std::string aggregate_csv(const AggregateStats& stats, int arms, double alpha);

void write_file(const std::string& path, const std::string& content);

}  // namespace dopa
