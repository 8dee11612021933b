#include "psched/report.hpp"

#include <cmath>

#include <json.hpp>

namespace psched {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Limit:
      return "limit";
  }
  return "?";
}

std::string report_to_json(const SolveReport& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["status"] = to_string(r.status);
  j["primal"] = std::isfinite(r.primal) ? nlohmann::json(r.primal) : nlohmann::json(nullptr);
  j["dual"] = std::isfinite(r.dual) ? nlohmann::json(r.dual) : nlohmann::json(nullptr);
  j["gap"] = std::isfinite(r.gap) ? nlohmann::json(r.gap) : nlohmann::json(nullptr);
  j["nodes"] = r.nodes;
  j["pricing_rounds"] = r.pricing_rounds;
  j["columns"] = r.columns;
  j["wall_time"] = r.wall_time;
  j["node_trace"] = r.node_trace;
  j["time_breakdown"] = r.time_breakdown;
  return j.dump(2);
}

}  // namespace psched
