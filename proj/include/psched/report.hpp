#pragma once

#include <map>
#include <string>
#include <vector>

namespace psched {

enum class SolveStatus { Optimal, Infeasible, Limit };

struct SolveLimits {
  double time = 300.0;  // seconds, 0 = unlimited
  long nodes = 0;       // 0 = unlimited
  double gap = 1e-6;
};

struct SolveReport {
  std::string method;  // "compact" | "dw"
  SolveStatus status = SolveStatus::Limit;
  double primal = 0.0;  // c_IMP; +inf when no incumbent
  double dual = 0.0;
  double gap = 0.0;
  long nodes = 0;
  long pricing_rounds = 0;
  long columns = 0;
  double wall_time = 0.0;
  // one line per node: id, depth, bound, rounds, columns (tab separated)
  std::vector<std::string> node_trace;
  // fractions of wall time: exact-pricing, integer-rmp, branching,
  // rmp-resolve, other; sums to ~1 for the dw method
  std::map<std::string, double> time_breakdown;
  // dw statistics: every Lagrangian/Farley/tightened bound emitted while
  // solving, and (node id, parent id, final node bound) per processed node
  std::vector<double> bound_events;
  struct NodeBound {
    long id = 0;
    long parent = -1;
    double bound = 0.0;
  };
  std::vector<NodeBound> node_bounds;
};

const char* to_string(SolveStatus s);
std::string report_to_json(const SolveReport& r);

}  // namespace psched
