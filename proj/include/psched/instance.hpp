#pragma once

#include <string>
#include <utility>
#include <vector>

#include "psched/funcspec.hpp"

namespace psched {

struct ComponentSpec {
  double cost = 0.0;         // C^k, > 0
  int duration = 1;          // D^k, periods, >= 1
  double max_condition = 0;  // R^k
  double max_production = 0; // Q^k
  FuncSpec degradation;      // f: (prev condition, production, peer conditions)
  FuncSpec limit;            // g: condition -> production cap
};

struct MachineGroupSpec {
  std::vector<ComponentSpec> components;
  std::vector<std::pair<int, int>> implications;  // (k,k'): maintaining k requires k'
  int multiplicity = 1;                           // Z, identical machines aggregated

  int num_components() const { return static_cast<int>(components.size()); }
  // Production cap from pristine components: min_k Q^k.
  double production_cap() const;
};

struct Instance {
  int periods = 0;
  std::vector<MachineGroupSpec> groups;
  std::vector<double> demand;  // E_t, size == periods

  int num_machines() const;
};

// One machine's plan over the horizon.  x[k][t] in {0,1}, y[t] >= 0,
// r[k][t] in [0, R^k].  t is 0-based; the pre-horizon condition is R^k.
struct MachinePlan {
  std::vector<std::vector<char>> x;
  std::vector<double> y;
  std::vector<std::vector<double>> r;
};

// Full schedule: machine m belongs to the group given by machine_group(inst, m),
// groups laid out in order with their multiplicities.
struct Schedule {
  std::vector<MachinePlan> machines;
};

struct Violation {
  std::string family;  // demand | production_limit | duration | implication |
                       // downtime | degradation | bounds | dimension
  int machine = -1;
  int component = -1;
  int period = -1;
  double residual = 0.0;
  std::string describe() const;
};

// Structural sanity of an instance (dimensions, multiplicities, implication
// indices, function specs).  Throws ValidationError.
void check_instance(const Instance& inst);

// Group index of machine m under the flattened layout.
int machine_group(const Instance& inst, int machine);

// Safe big-M for the degradation row of a component:
//   M = R - min(0, f(0, Q; 0,...,0))
// so that r <= f(...) + M*x admits r = R whenever x = 1 for every point in
// the box domain.
double big_m(const ComponentSpec& comp);

// Checks constraint families 1.1-1.6, variable bounds and the initial
// condition r_0 = R.  Continuous tolerance 1e-6, binaries exact.
std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& s);

// Always-feasible single-machine plan: no maintenance, no production, r on
// the maximal trajectory.
MachinePlan idle_plan(const Instance& inst, int group);

// Maintenance cost of a plan under the group's component costs.
double plan_cost(const MachineGroupSpec& g, const MachinePlan& p);

}  // namespace psched
