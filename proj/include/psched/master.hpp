#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psched/column.hpp"
#include "psched/simplex.hpp"

namespace psched {

// Duals of the restricted master: pi per demand row (>= 0), theta per
// convexity row (<= 0), gamma per branching decision (sign given by side).
// When farkas is set the values come from an infeasibility certificate and
// pricing must use a zero cost vector.
struct DualBundle {
  std::vector<double> pi;
  std::vector<double> theta;
  std::vector<double> gamma;  // aligned with MasterState::decisions()
  bool farkas = false;
};

struct RmpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> lambda;
  DualBundle duals;
};

struct IntegerRmpLimits {
  double time = 5.0;
  int solutions = 1;                    // stop after this many improving incumbents
  std::optional<double> cutoff;         // only interested below this objective
};

struct IntegerRmpSolution {
  std::vector<double> lambda;  // integral
  double objective = 0.0;
};

// gap = (primal - dual) / max(1, primal)
double rmp_gap(double primal, double dual);

// Column pool plus demand/convexity/branching rows over it.  Branching rows
// are created once and switched on and off per node through their rhs.
class MasterState {
 public:
  explicit MasterState(const Instance& inst);

  // Validates the column, dedups against the pool (1e-9 on x and y) and
  // inserts it into every branching row whose thresholds it satisfies.
  // Returns the column id; throws ValidationError on invariant violations.
  int add_column(Column col);

  RmpSolution solve_rmp();

  // Price-and-Branch heuristic: the integer RMP over the current pool.
  std::optional<IntegerRmpSolution> solve_integer_rmp(const IntegerRmpLimits& limits);

  // Registers the decision and its master row (membership = every pool
  // column satisfying beta).  Returns the decision index.
  int add_decision(BranchingDecision d);
  void set_decision_active(int idx, bool active);
  bool decision_active(int idx) const { return active_[idx]; }

  const Instance& instance() const { return *inst_; }
  const std::vector<Column>& pool() const { return pool_; }
  const std::vector<BranchingDecision>& decisions() const { return decisions_; }
  const std::vector<int>& membership(int decision) const { return members_[decision]; }
  int num_groups() const { return static_cast<int>(inst_->groups.size()); }

  // test hook: recompute a decision's membership from thresholds over the pool
  std::vector<int> recompute_membership(int decision) const;

  std::string dump_pool_json() const;

 private:
  const Instance* inst_;
  std::vector<Column> pool_;
  std::vector<BranchingDecision> decisions_;
  std::vector<std::vector<int>> members_;
  std::vector<char> active_;
  int total_machines_ = 0;

  LpProblem lp_;  // mirror of the solver problem, used for the integer RMP
  std::unique_ptr<SimplexSolver> solver_;

  int demand_row(int t) const { return t; }
  int convexity_row(int z) const { return inst_->periods + z; }
  std::vector<std::pair<int, double>> column_entries(const Column& c) const;
  void check_column(const Column& c) const;
};

}  // namespace psched
