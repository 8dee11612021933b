#pragma once

// Shared fixture builders for the unit and acceptance suites.

#include <vector>

#include "psched/instance.hpp"
#include "psched/instgen.hpp"
#include "psched/rng.hpp"

namespace psched::testing {

inline FuncSpec linear_func(double constant, double a_prev, double b_prod, double prev_max,
                            double prod_max) {
  FuncSpec f;
  f.kind = FuncKind::Linear;
  f.constant = constant;
  f.terms.push_back({Slot::PrevCondition, -1, {a_prev}});
  f.terms.push_back({Slot::Production, -1, {b_prod}});
  f.domain.prev_max = prev_max;
  f.domain.production_max = prod_max;
  return f;
}

inline FuncSpec identity_limit(double r_max) {
  FuncSpec g;
  g.kind = FuncKind::Linear;
  g.terms.push_back({Slot::PrevCondition, -1, {1.0}});
  g.domain.prev_max = r_max;
  return g;
}

inline ComponentSpec linear_component(double cost, int duration, double R, double Q,
                                      double decay_per_unit) {
  ComponentSpec c;
  c.cost = cost;
  c.duration = duration;
  c.max_condition = R;
  c.max_production = Q;
  c.degradation = linear_func(0.0, 1.0, decay_per_unit, R, Q);
  c.limit = identity_limit(R);
  return c;
}

// Small instance with the generator's canonical random functions but pinned
// machine count, component count and horizon.
inline Instance make_tiny_instance(std::uint64_t seed, int machines, int components,
                                   int periods, double rho) {
  Rng rng(seed);
  Instance inst;
  inst.periods = periods;
  MachineGroupSpec g;
  g.multiplicity = machines;
  std::vector<double> r_max(components), q_max(components);
  for (int k = 0; k < components; ++k) {
    r_max[k] = rng.uniform(5.0, 15.0);
    q_max[k] = rng.uniform(5.0, 20.0);
  }
  for (int k = 0; k < components; ++k) {
    ComponentSpec c;
    c.cost = double(rng.uniform_int(1, 10));
    c.duration = 1;
    c.max_condition = r_max[k];
    c.max_production = q_max[k];
    c.degradation = make_random_degradation(rng, r_max[k], q_max[k], r_max, 0.2, nullptr);
    c.limit = make_random_limit(rng, r_max[k], q_max[k], nullptr);
    g.components.push_back(std::move(c));
  }
  if (components == 2 && rng.chance(0.3)) g.implications.push_back({1, 0});
  inst.groups.push_back(std::move(g));
  double capacity = machines * inst.groups[0].production_cap();
  inst.demand.resize(periods);
  // slack periods leave room for maintenance spells
  for (int t = 0; t < periods; ++t)
    inst.demand[t] = rng.chance(0.35) ? 0.0 : rho * capacity * rng.uniform(0.6, 1.0);
  check_instance(inst);
  return inst;
}

}  // namespace psched::testing
