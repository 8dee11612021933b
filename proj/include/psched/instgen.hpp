#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psched/instance.hpp"
#include "psched/rng.hpp"

namespace psched {

enum class Layout { OneGroup20, TwoGroups10, Custom };
enum class Complexity { Low, High };

struct GenConfig {
  std::uint64_t seed = 0;
  int periods = 10;  // 10 or 20 in the reference experiments
  Layout layout = Layout::OneGroup20;
  std::vector<int> custom_multiplicities;  // used when layout == Custom
  Complexity complexity = Complexity::Low;
  double rho = 0.7;  // demand load factor, (0, 1.2]
};

void check_config(const GenConfig& cfg);

// Deterministic in cfg; draws component counts, costs, durations, condition
// and production ranges, random linear/polynomial/exponential degradation and
// limit functions (post-processed into the concave canonical forms) and the
// demand vector E_t = rho * aggregate capacity * U[0.6, 1.0].
// When out_coeff_draws is set, every raw U[0,3] coefficient draw is appended
// (used by the distribution-conformance tests).
Instance generate(const GenConfig& cfg, std::vector<double>* out_coeff_draws = nullptr);

// Random canonical function, exposed for the distribution tests.
FuncSpec make_random_degradation(Rng& rng, double r_max, double q_max,
                                 const std::vector<double>& peer_r, double peer_prob,
                                 std::vector<double>* out_coeff_draws);
FuncSpec make_random_limit(Rng& rng, double r_max, double q_max,
                           std::vector<double>* out_coeff_draws);

// The fixed two-component single-machine instance on which just-in-time
// maintenance provably wastes one maintenance action: component A (index 0)
// survives two full-load periods, B (index 1) three, maintaining B implies
// maintaining A, and the horizon ends one period after B's failure.
Instance make_jit_counterexample();

// Plans production proportional to demand share, then walks the horizon and
// maintains a component only when postponing further would make some later
// production period infeasible.  Honors implications and durations.
std::optional<Schedule> jit_maintenance_heuristic(const Instance& inst);

}  // namespace psched
