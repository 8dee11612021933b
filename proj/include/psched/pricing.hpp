#pragma once

#include <optional>
#include <vector>

#include "psched/column.hpp"
#include "psched/master.hpp"
#include "psched/minlp.hpp"

namespace psched {

// Branching decision together with its dual, as seen by one pricing problem.
struct PricingDecision {
  BranchingDecision decision;
  double gamma = 0.0;
};

// Single-machine reduced-cost minimization for one group:
//   min C^T x - pi^T y - theta_z - sum_b gamma_b delta_b
// over constraints 1.2-1.6 plus the per-period demand cap on production.
struct PricingProblem {
  int group = 0;
  int K = 0, T = 0;
  ConvexMinlp model;
  std::vector<PricingDecision> decisions;  // delta variable b is delta_vars[b]
  std::vector<int> delta_vars;

  int var_x(int k, int t) const { return k * T + t; }
  int var_y(int t) const { return K * T + t; }
  int var_r(int k, int t) const { return (K + 1) * T + k * T + t; }

  // Constrains the pricing objective row C^T x - pi^T y - sum gamma delta
  // to <= rhs + theta_z; used for the single-subproblem early-stop cut.
  void add_reduced_cost_cap(double rhs_with_theta);
};

struct PricedColumn {
  Column column;
  double reduced_cost = 0.0;
  double dual_bound = 0.0;  // w_z, valid lower bound on the minimum reduced cost
};

struct PricingLimits {
  bool exact = true;
  double gap = 0.2;   // limited-mode relative gap
  int solutions = 3;  // limited-mode improving-solution cap
  long nodes = 500;   // limited-mode node cap
  double time = 0.0;
};

// decisions must be the active path decisions applying to group z.
PricingProblem build_pricing(const Instance& inst, int z, const DualBundle& duals,
                             const std::vector<PricingDecision>& decisions);

struct PricingOutcome {
  std::optional<PricedColumn> column;  // reduced cost < -1e-6 when present
  double dual_bound = -kInf;           // w_z; exact mode: optimum within gap
  bool infeasible = false;             // model infeasible (e.g. reduced-cost cap)
};

PricingOutcome solve_pricing(const Instance& inst, const PricingProblem& p,
                             const PricingLimits& limits);

// C^T x - pi^T y - theta_z - sum of gamma over satisfied decisions.  With
// farkas duals the cost term is dropped.
double reduced_cost(const Column& col, const DualBundle& duals,
                    const std::vector<PricingDecision>& decisions);

// c_rmp + sum_z Z_z * min(0, w_z)
double lagrangian_bound(double c_rmp, const std::vector<double>& w,
                        const std::vector<int>& multiplicities);

// Candidate Farley value (cost(col)/pi^T y(col)) * pi^T E; nullopt when the
// column sells nothing under pi.
std::optional<double> farley_bound(const DualBundle& duals, const Column& col,
                                   const std::vector<double>& demand);

// rhs of the early-stop reduced-cost cut, (c_imp - c_rmp)/Z_z; nullopt
// without a finite incumbent.
std::optional<double> early_stop_rhs(double c_imp, double c_rmp, int z_mult);

// Groups ordered most-promising-first by the greedy dual-value fixing
// heuristic; ties keep ascending group ids.
std::vector<int> jit_ordering(const Instance& inst, const DualBundle& duals);

// Heuristic reduced-cost estimate used by jit_ordering (exposed for tests).
double jit_estimate(const Instance& inst, int z, const DualBundle& duals);

}  // namespace psched
