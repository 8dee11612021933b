#pragma once

#include <optional>
#include <vector>

#include "psched/master.hpp"
#include "psched/pricing.hpp"
#include "psched/report.hpp"

namespace psched {

struct BpConfig {
  bool early_branching = true;
  bool rmp_heuristic = true;
  bool farley = true;
  bool reduced_cost_cut = true;
  int parallel = 0;  // pricing fan-out threads; 0/1 = sequential
  int rmp_heuristic_trigger = 25;
  double rmp_heuristic_time = 5.0;
  int early_branching_min_rounds = 5;
};

// Partition of one group's support columns into equivalence classes by
// identical maintenance pattern; each entry lists column ids.
std::vector<std::vector<int>> pattern_classes(const MasterState& state,
                                              const std::vector<double>& lambda,
                                              int group);

// Returns the lowest group whose class sums are non-integral, or nullopt
// when the solution is repairable.
std::optional<int> check_integrality(const MasterState& state,
                                     const std::vector<double>& lambda);

// Direction rule: pick >= when that side is larger, tie-break on the larger
// sum of squared lambda values, defaulting to <=.
bool choose_threshold_direction(const std::vector<double>& lambda_le,
                                const std::vector<double>& lambda_ge);

struct BranchChoice {
  std::vector<BranchThreshold> beta;
  double v_beta = 0.0;  // membership sum over the whole pool, fractional
};

// Threshold-set refinement over the fractional support of `group`.
std::optional<BranchChoice> find_branching(const MasterState& state,
                                           const std::vector<double>& lambda, int group);

// Registers the down/up decisions for the choice; returns their indices.
std::pair<int, int> apply_branching(MasterState& state, int group, const BranchChoice& bc);

// Merges fractional same-pattern columns into integral ones and expands the
// result into one plan per machine; requires check_integrality == nullopt.
Schedule repair_step(const MasterState& state, const std::vector<double>& lambda);

SolveReport solve_bp(const Instance& inst, const SolveLimits& limits,
                     const BpConfig& config = {}, Schedule* out_schedule = nullptr);

// Greatest common divisor of the maintenance costs at 1e-6 resolution; used
// to tighten dual bounds to the cost lattice.  0 disables tightening.
double cost_lattice_step(const Instance& inst);
double tighten_to_lattice(double bound, double step);

}  // namespace psched
