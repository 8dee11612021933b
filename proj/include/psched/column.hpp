#pragma once

#include <vector>

#include "psched/instance.hpp"

namespace psched {

// One feasible single-machine schedule, the payload of a master variable.
struct Column {
  int group = 0;
  std::vector<std::vector<char>> x;    // K x T maintenance
  std::vector<double> y;               // T production
  std::vector<std::vector<double>> r;  // K x T condition
  double cost = 0.0;                   // sum of C^k x^k_t
  int id = -1;
};

MachinePlan column_plan(const Column& c);
Column column_from_plan(const Instance& inst, int group, const MachinePlan& p);

// Threshold on a binary maintenance variable, normalized to x <= 0 or x >= 1.
struct BranchThreshold {
  int k = 0;
  int t = 0;
  bool at_least = false;  // true: x[k][t] >= 1, false: x[k][t] <= 0
};

// A branching decision: a threshold set beta over one group's maintenance
// variables plus the side and bound of the master row it induces.
struct BranchingDecision {
  int group = 0;
  std::vector<BranchThreshold> beta;
  bool up = false;     // up: sum over members >= ceil(v);  down: <= floor(v)
  double v_beta = 0.0; // fractional membership sum at creation
  int row = -1;        // master LP row index, set by MasterState
};

bool satisfies(const std::vector<std::vector<char>>& x, const BranchThreshold& th);
bool column_satisfies(const Column& c, const BranchingDecision& d);

}  // namespace psched
