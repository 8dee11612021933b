#include "psched/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psched {

namespace {
constexpr double kFeasTol = 1e-6;
}

double MachineGroupSpec::production_cap() const {
  double cap = std::numeric_limits<double>::infinity();
  for (const auto& c : components) cap = std::min(cap, c.max_production);
  return components.empty() ? 0.0 : cap;
}

int Instance::num_machines() const {
  int n = 0;
  for (const auto& g : groups) n += g.multiplicity;
  return n;
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << family << " machine=" << machine << " component=" << component
     << " period=" << period << " residual=" << residual;
  return os.str();
}

void check_instance(const Instance& inst) {
  if (inst.periods <= 0) throw ValidationError("instance: periods must be positive");
  if (static_cast<int>(inst.demand.size()) != inst.periods)
    throw ValidationError("instance: demand size != periods");
  for (double e : inst.demand)
    if (!(e >= 0.0) || !std::isfinite(e))
      throw ValidationError("instance: demand must be finite and >= 0");
  if (inst.groups.empty()) throw ValidationError("instance: no machine groups");
  for (const auto& g : inst.groups) {
    if (g.multiplicity < 1) throw ValidationError("instance: group multiplicity < 1");
    if (g.components.empty()) throw ValidationError("instance: group without components");
    for (const auto& c : g.components) {
      if (!(c.cost > 0)) throw ValidationError("instance: component cost must be > 0");
      if (c.duration < 1) throw ValidationError("instance: duration must be >= 1");
      if (!(c.max_condition > 0)) throw ValidationError("instance: max condition must be > 0");
      if (!(c.max_production > 0)) throw ValidationError("instance: max production must be > 0");
      check_funcspec(c.degradation);
      check_funcspec(c.limit);
    }
    int nk = g.num_components();
    for (auto [k, kp] : g.implications) {
      if (k < 0 || k >= nk || kp < 0 || kp >= nk)
        throw ValidationError("instance: implication references invalid component");
      if (k == kp) throw ValidationError("instance: self-implication");
    }
  }
}

int machine_group(const Instance& inst, int machine) {
  int m = machine;
  for (std::size_t z = 0; z < inst.groups.size(); ++z) {
    if (m < inst.groups[z].multiplicity) return static_cast<int>(z);
    m -= inst.groups[z].multiplicity;
  }
  throw ValidationError("machine index out of range");
}

double big_m(const ComponentSpec& comp) {
  std::vector<double> zeros(comp.degradation.domain.peer_max.size(), 0.0);
  double worst = eval_func(comp.degradation, 0.0, comp.max_production, zeros);
  return comp.max_condition - std::min(0.0, worst);
}

namespace {

// Peer conditions of component k at period t-1 (R^k' for t == 0).
std::vector<double> peer_vector(const MachineGroupSpec& g, const MachinePlan& p,
                                int t) {
  std::vector<double> peers(g.components.size());
  for (std::size_t k2 = 0; k2 < g.components.size(); ++k2)
    peers[k2] = t == 0 ? g.components[k2].max_condition : p.r[k2][t - 1];
  return peers;
}

}  // namespace

std::vector<Violation> validate_schedule(const Instance& inst, const Schedule& s) {
  check_instance(inst);
  std::vector<Violation> out;
  const int T = inst.periods;
  if (static_cast<int>(s.machines.size()) != inst.num_machines()) {
    out.push_back({"dimension", -1, -1, -1,
                   double(s.machines.size()) - inst.num_machines()});
    return out;
  }
  for (int m = 0; m < inst.num_machines(); ++m) {
    const auto& g = inst.groups[machine_group(inst, m)];
    const auto& p = s.machines[m];
    const int K = g.num_components();
    if (static_cast<int>(p.y.size()) != T ||
        static_cast<int>(p.x.size()) != K ||
        static_cast<int>(p.r.size()) != K) {
      out.push_back({"dimension", m, -1, -1, 0.0});
      return out;
    }
    for (int k = 0; k < K; ++k)
      if (static_cast<int>(p.x[k].size()) != T ||
          static_cast<int>(p.r[k].size()) != T) {
        out.push_back({"dimension", m, k, -1, 0.0});
        return out;
      }
  }

  // 1.1 demand
  for (int t = 0; t < T; ++t) {
    double prod = 0.0;
    for (const auto& p : s.machines) prod += p.y[t];
    if (prod < inst.demand[t] - kFeasTol)
      out.push_back({"demand", -1, -1, t, inst.demand[t] - prod});
  }

  for (int m = 0; m < inst.num_machines(); ++m) {
    const auto& g = inst.groups[machine_group(inst, m)];
    const auto& p = s.machines[m];
    const int K = g.num_components();
    double ycap = g.production_cap();
    for (int t = 0; t < T; ++t) {
      if (p.y[t] < -kFeasTol || p.y[t] > ycap + kFeasTol)
        out.push_back({"bounds", m, -1, t, p.y[t]});
      for (int k = 0; k < K; ++k) {
        const auto& c = g.components[k];
        if (p.x[k][t] != 0 && p.x[k][t] != 1)
          out.push_back({"bounds", m, k, t, double(p.x[k][t])});
        if (p.r[k][t] < -kFeasTol || p.r[k][t] > c.max_condition + kFeasTol)
          out.push_back({"bounds", m, k, t, p.r[k][t]});

        // 1.2 production limit
        double cap = eval_func(c.limit, p.r[k][t], 0.0, {});
        if (p.y[t] > cap + kFeasTol)
          out.push_back({"production_limit", m, k, t, p.y[t] - cap});

        // 1.5 downtime
        if (p.x[k][t] && p.y[t] > kFeasTol)
          out.push_back({"downtime", m, k, t, p.y[t]});

        // 1.3 duration: a start at t forces the next D^k periods.
        char prev = t == 0 ? 0 : p.x[k][t - 1];
        if (p.x[k][t] == 1 && prev == 0) {
          for (int i = t + 1; i <= t + c.duration && i < T; ++i)
            if (!p.x[k][i]) {
              out.push_back({"duration", m, k, i, 1.0});
              break;
            }
        }

        // 1.6 degradation
        double prevr = t == 0 ? c.max_condition : p.r[k][t - 1];
        double bound = eval_func(c.degradation, prevr, p.y[t], peer_vector(g, p, t)) +
                       (p.x[k][t] ? big_m(c) : 0.0);
        if (p.r[k][t] > bound + kFeasTol)
          out.push_back({"degradation", m, k, t, p.r[k][t] - bound});
      }
      // 1.4 implications
      for (auto [k, kp] : g.implications)
        if (p.x[k][t] > p.x[kp][t])
          out.push_back({"implication", m, k, t, 1.0});
    }
  }
  return out;
}

MachinePlan idle_plan(const Instance& inst, int group) {
  const auto& g = inst.groups[group];
  const int T = inst.periods, K = g.num_components();
  MachinePlan p;
  p.x.assign(K, std::vector<char>(T, 0));
  p.y.assign(T, 0.0);
  p.r.assign(K, std::vector<double>(T, 0.0));
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) {
      const auto& c = g.components[k];
      double prevr = t == 0 ? c.max_condition : p.r[k][t - 1];
      double v = eval_func(c.degradation, prevr, 0.0, peer_vector(g, p, t));
      p.r[k][t] = std::clamp(v, 0.0, c.max_condition);
    }
  return p;
}

double plan_cost(const MachineGroupSpec& g, const MachinePlan& p) {
  double cost = 0.0;
  for (int k = 0; k < g.num_components(); ++k)
    for (char v : p.x[k]) cost += v ? g.components[k].cost : 0.0;
  return cost;
}

}  // namespace psched
