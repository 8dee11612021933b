#pragma once

#include <string>

#include "psched/instance.hpp"
#include "psched/minlp.hpp"
#include "psched/report.hpp"

namespace psched {

// The assignment-based model: one block of (x, y, r) variables per machine,
// demand rows linking them, plus the late-start valid inequality.
struct CompactModel {
  ConvexMinlp minlp;
  int periods = 0;
  int machines = 0;
  std::vector<int> machine_offset;  // first variable of each machine block
  std::vector<int> machine_K;

  // block layout per machine: x(k,t), then y(t), then r(k,t)
  int var_x(int m, int k, int t) const {
    return machine_offset[m] + k * periods + t;
  }
  int var_y(int m, int t) const {
    return machine_offset[m] + machine_K[m] * periods + t;
  }
  int var_r(int m, int k, int t) const {
    return machine_offset[m] + (machine_K[m] + 1) * periods + k * periods + t;
  }

  long linear_rows = 0;      // rows of the linear part (before OA cuts)
  long nonlinear_rows = 0;

  std::string dump_rows() const;  // plain-text listing for audit
};

CompactModel build_compact(const Instance& inst);

// Expected variable count: |T| * sum_n (1 + 2|K_n|).
long compact_expected_vars(const Instance& inst);

// Solves the compact model; fills out_schedule (when non-null) with the
// incumbent, which always passes validate_schedule.
SolveReport solve_compact(const Instance& inst, const SolveLimits& limits,
                          Schedule* out_schedule = nullptr);

Schedule extract_compact_schedule(const CompactModel& model, const Instance& inst,
                                  const std::vector<double>& assignment);

}  // namespace psched
