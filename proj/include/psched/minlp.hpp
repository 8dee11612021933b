#pragma once

#include <optional>
#include <vector>

#include "psched/funcspec.hpp"
#include "psched/simplex.hpp"

namespace psched {

// Argument of a nonlinear row: either a variable of the model or a constant
// (used for the pre-horizon condition R^k).
struct MinlpArg {
  int var = -1;
  double constant = 0.0;
  static MinlpArg of_var(int v) { return {v, 0.0}; }
  static MinlpArg of_const(double c) { return {-1, c}; }
};

// Encodes  target <= f(prev, production, peers) [+ big_m * relax_var].
// f is concave over its box, so first-order cuts are globally valid.
struct NonlinearRow {
  int target = -1;
  FuncSpec f;
  MinlpArg prev, production;
  std::vector<MinlpArg> peers;
  int relax_var = -1;
  double big_m = 0.0;
};

struct ConvexMinlp {
  LpProblem linear;
  std::vector<int> integer_vars;  // indices required integral (binaries included)
  std::vector<NonlinearRow> nonlinear;
};

enum class MinlpStatus { Optimal, Infeasible, Limit };

struct MinlpLimits {
  double gap = 1e-6;
  int solutions = 0;   // 0 = unlimited improving incumbents
  long nodes = 0;      // 0 = unlimited
  double time = 0.0;   // seconds, 0 = unlimited
};

struct MinlpResult {
  MinlpStatus status = MinlpStatus::Limit;
  std::vector<double> incumbent;  // empty when none
  double primal = kInf;
  double dual = -kInf;
  long nodes = 0;
  long cuts = 0;
  std::vector<double> dual_trace;  // global dual bound after each node
};

// Value of arg under an assignment.
double arg_value(const MinlpArg& a, const std::vector<double>& x);

// row residual target - (f(...) [+ M x]); positive means violated.
double nonlinear_violation(const NonlinearRow& row, const std::vector<double>& x);

// Appends the tangent cut of `row` taken at `point` to the relaxation and
// returns the new row index.  The cut is tight at `point` and valid for
// every feasible point by concavity of f.
int add_oa_cut(LpProblem& relaxation, const NonlinearRow& row,
               const std::vector<double>& point);

MinlpResult solve_minlp(const ConvexMinlp& m, const MinlpLimits& limits,
                        std::optional<double> objective_cutoff = std::nullopt);

}  // namespace psched
