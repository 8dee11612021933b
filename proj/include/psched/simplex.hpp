#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace psched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpError : std::runtime_error {
  explicit LpError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

// rel is one of 'L' (<=), 'G' (>=), 'E' (=).
struct LpRow {
  std::vector<std::pair<int, double>> coeffs;
  char rel = 'L';
  double rhs = 0.0;
};

struct LpProblem {
  std::vector<double> objective;  // minimization
  std::vector<double> lower, upper;
  std::vector<LpRow> rows;
  double objective_constant = 0.0;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int add_var(double lo, double up, double obj) {
    lower.push_back(lo);
    upper.push_back(up);
    objective.push_back(obj);
    return num_vars() - 1;
  }
  void add_row(std::vector<std::pair<int, double>> coeffs, char rel, double rhs) {
    rows.push_back({std::move(coeffs), rel, rhs});
  }
};

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> primal;      // structural variables
  double objective = 0.0;          // includes objective_constant
  std::vector<double> row_duals;   // y_i per row; >=0 on G rows, <=0 on L rows
  std::vector<double> farkas_ray;  // per row, set iff status == Infeasible
  long iterations = 0;
};

// Dense bounded-variable revised simplex.  An instance is stateful: it keeps
// the basis between solves, so column generation re-solves are warm.  Rows
// and columns may be added between solves; when the stored basis is no longer
// primal feasible the solver falls back to a fresh two-phase start.
class SimplexSolver {
 public:
  explicit SimplexSolver(LpProblem p);

  int add_column(double lo, double up, double obj,
                 const std::vector<std::pair<int, double>>& entries);
  int add_row(const LpRow& row);
  void set_row_rhs(int row, double rhs);
  void set_bounds(int var, double lo, double up);

  LpSolution solve(long iteration_limit = 2000000);

  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_structural() const { return num_structural_; }
  double rhs(int row) const { return rows_[row].rhs; }

  // Plain-text dump of the current problem for triage.
  std::string dump() const;

 private:
  struct VarInfo {
    enum Type { Structural, Slack, Artificial } type;
    int ref;  // structural index or row index
  };
  enum class VStat : char { Basic, AtLower, AtUpper, FreeZero };

  // problem data
  std::vector<LpRow> rows_;                                // structural coeffs only
  std::vector<std::vector<std::pair<int, double>>> cols_;  // structural columns
  int num_structural_ = 0;
  double objective_constant_ = 0.0;

  // variable table: structural, then slacks, artificials appended on demand
  std::vector<VarInfo> vars_;
  std::vector<double> lo_, up_, cost_;  // per variable in vars_ order
  std::vector<int> slack_of_row_, art_of_row_;
  std::vector<int> struct_pos_;  // structural index -> vars_ position

  // basis state
  bool basis_valid_ = false;
  std::vector<int> basis_;      // variable index per basis position (== row count)
  std::vector<VStat> stat_;     // per variable
  std::vector<double> binv_;    // dense row-major m*m
  std::vector<double> xb_;      // basic values
  long pivots_since_refactor_ = 0;
  long degenerate_streak_ = 0;

  int ensure_slack(int row);
  int ensure_artificial(int row);
  double nonbasic_value(int j) const;
  void column_of(int j, std::vector<std::pair<int, double>>& out) const;
  void compute_duals(const std::vector<double>& costs, std::vector<double>& y) const;
  void compute_basic_values();
  bool refactor();  // false if numerically singular
  void ftran(int j, std::vector<double>& w) const;

  enum class IterExit { Optimal, Unbounded, IterationLimit };
  IterExit iterate(const std::vector<double>& costs, long& iter_budget);

  void cold_basis();
  // Returns phase-1 objective; fills y with phase-1 duals when infeasible.
  double phase1(long& iter_budget, std::vector<double>& farkas_y, bool& hit_limit);
  bool warm_repair(long& iter_budget);

  LpSolution solve_attempt(long iteration_limit, bool force_cold);
  LpSolution extract(LpStatus st, long used_iterations);
};

// One-shot convenience wrapper.
LpSolution solve_lp(const LpProblem& p, long iteration_limit = 2000000);

}  // namespace psched
