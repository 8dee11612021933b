#include "psched/compact.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace psched {

long compact_expected_vars(const Instance& inst) {
  long v = 0;
  for (const auto& g : inst.groups)
    v += static_cast<long>(g.multiplicity) * (1 + 2 * g.num_components());
  return v * inst.periods;
}

CompactModel build_compact(const Instance& inst) {
  check_instance(inst);
  CompactModel cm;
  const int T = inst.periods;
  cm.periods = T;
  cm.machines = inst.num_machines();
  LpProblem& lp = cm.minlp.linear;

  for (int m = 0; m < cm.machines; ++m) {
    const auto& g = inst.groups[machine_group(inst, m)];
    const int K = g.num_components();
    cm.machine_offset.push_back(lp.num_vars());
    cm.machine_K.push_back(K);
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) {
        int j = lp.add_var(0.0, 1.0, g.components[k].cost);
        cm.minlp.integer_vars.push_back(j);
      }
    double ycap = g.production_cap();
    for (int t = 0; t < T; ++t) lp.add_var(0.0, ycap, 0.0);
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) lp.add_var(0.0, g.components[k].max_condition, 0.0);
  }

  // 1.1 demand across machines
  for (int t = 0; t < T; ++t) {
    LpRow row;
    for (int m = 0; m < cm.machines; ++m) row.coeffs.push_back({cm.var_y(m, t), 1.0});
    row.rel = 'G';
    row.rhs = inst.demand[t];
    lp.rows.push_back(row);
  }

  for (int m = 0; m < cm.machines; ++m) {
    const auto& g = inst.groups[machine_group(inst, m)];
    const int K = g.num_components();
    for (int k = 0; k < K; ++k) {
      const auto& c = g.components[k];
      const int D = c.duration;
      for (int t = 0; t < T; ++t) {
        // 1.5 downtime: y_t + Q^k x^k_t <= Q^k
        lp.add_row({{cm.var_y(m, t), 1.0}, {cm.var_x(m, k, t), c.max_production}}, 'L',
                   c.max_production);
        // 1.3 duration, truncated at the horizon; x at t-1 is 0 for t = 0
        for (int i = t + 1; i <= t + D && i < T; ++i) {
          std::vector<std::pair<int, double>> coeffs = {{cm.var_x(m, k, i), 1.0},
                                                        {cm.var_x(m, k, t), -1.0}};
          if (t > 0) coeffs.push_back({cm.var_x(m, k, t - 1), 1.0});
          lp.add_row(std::move(coeffs), 'G', 0.0);
        }
      }
      // valid inequality: maintenance cannot start too late to finish
      int anchor = T - D - 1;  // 0-based period |T| - D^k
      for (int t = std::max(0, anchor + 1); t < T; ++t) {
        if (t == anchor) continue;
        if (anchor >= 0)
          lp.add_row({{cm.var_x(m, k, t), 1.0}, {cm.var_x(m, k, anchor), -1.0}}, 'L', 0.0);
        else
          lp.upper[cm.var_x(m, k, t)] = 0.0;  // no start can ever finish
      }
    }
    // 1.4 implications
    for (auto [k, kp] : g.implications)
      for (int t = 0; t < T; ++t)
        lp.add_row({{cm.var_x(m, k, t), 1.0}, {cm.var_x(m, kp, t), -1.0}}, 'L', 0.0);

    // 1.2 production limits and 1.6 degradation dynamics
    for (int k = 0; k < K; ++k) {
      const auto& c = g.components[k];
      for (int t = 0; t < T; ++t) {
        NonlinearRow lim;
        lim.target = cm.var_y(m, t);
        lim.f = c.limit;
        lim.prev = MinlpArg::of_var(cm.var_r(m, k, t));
        lim.production = MinlpArg::of_const(0.0);
        cm.minlp.nonlinear.push_back(lim);

        NonlinearRow deg;
        deg.target = cm.var_r(m, k, t);
        deg.f = c.degradation;
        deg.prev = t == 0 ? MinlpArg::of_const(c.max_condition)
                          : MinlpArg::of_var(cm.var_r(m, k, t - 1));
        deg.production = MinlpArg::of_var(cm.var_y(m, t));
        for (std::size_t k2 = 0; k2 < c.degradation.domain.peer_max.size(); ++k2) {
          deg.peers.push_back(t == 0
                                  ? MinlpArg::of_const(g.components[k2].max_condition)
                                  : MinlpArg::of_var(cm.var_r(m, static_cast<int>(k2), t - 1)));
        }
        deg.relax_var = cm.var_x(m, k, t);
        deg.big_m = big_m(c);
        cm.minlp.nonlinear.push_back(deg);
      }
    }
  }

  cm.linear_rows = static_cast<long>(lp.rows.size());
  cm.nonlinear_rows = static_cast<long>(cm.minlp.nonlinear.size());
  if (lp.num_vars() != compact_expected_vars(inst))
    throw ValidationError("compact: variable count disagrees with the sizing formula");
  return cm;
}

Schedule extract_compact_schedule(const CompactModel& model, const Instance& inst,
                                  const std::vector<double>& assignment) {
  Schedule s;
  const int T = model.periods;
  for (int m = 0; m < model.machines; ++m) {
    const int K = model.machine_K[m];
    MachinePlan p;
    p.x.assign(K, std::vector<char>(T, 0));
    p.y.assign(T, 0.0);
    p.r.assign(K, std::vector<double>(T, 0.0));
    for (int t = 0; t < T; ++t) {
      p.y[t] = std::max(0.0, assignment[model.var_y(m, t)]);
      for (int k = 0; k < K; ++k) {
        p.x[k][t] = assignment[model.var_x(m, k, t)] > 0.5 ? 1 : 0;
        double rmax = inst.groups[machine_group(inst, m)].components[k].max_condition;
        p.r[k][t] = std::clamp(assignment[model.var_r(m, k, t)], 0.0, rmax);
      }
    }
    s.machines.push_back(std::move(p));
  }
  return s;
}

SolveReport solve_compact(const Instance& inst, const SolveLimits& limits,
                          Schedule* out_schedule) {
  auto t0 = std::chrono::steady_clock::now();
  CompactModel cm = build_compact(inst);
  MinlpLimits ml;
  ml.time = limits.time;
  ml.nodes = limits.nodes;
  ml.gap = limits.gap;
  MinlpResult r = solve_minlp(cm.minlp, ml);

  SolveReport rep;
  rep.method = "compact";
  rep.nodes = r.nodes;
  rep.primal = r.primal;
  rep.dual = r.dual;
  switch (r.status) {
    case MinlpStatus::Optimal:
      rep.status = SolveStatus::Optimal;
      break;
    case MinlpStatus::Infeasible:
      rep.status = SolveStatus::Infeasible;
      break;
    case MinlpStatus::Limit:
      rep.status = SolveStatus::Limit;
      break;
  }
  rep.gap = std::isfinite(r.primal)
                ? (r.primal - std::min(r.dual, r.primal)) / std::max(1.0, r.primal)
                : std::numeric_limits<double>::infinity();
  if (rep.status == SolveStatus::Infeasible) rep.gap = 0.0;
  if (!r.incumbent.empty() && out_schedule)
    *out_schedule = extract_compact_schedule(cm, inst, r.incumbent);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::string CompactModel::dump_rows() const {
  std::ostringstream os;
  os << "vars " << minlp.linear.num_vars() << " linear-rows " << linear_rows
     << " nonlinear-rows " << nonlinear_rows << "\n";
  for (std::size_t i = 0; i < minlp.linear.rows.size(); ++i) {
    const auto& row = minlp.linear.rows[i];
    os << "r" << i << ":";
    for (auto [j, a] : row.coeffs) os << " " << a << "*v" << j;
    os << " " << row.rel << " " << row.rhs << "\n";
  }
  for (const auto& nr : minlp.nonlinear) {
    os << "nl: v" << nr.target << " <= f(...)";
    if (nr.relax_var >= 0) os << " + " << nr.big_m << "*v" << nr.relax_var;
    os << "\n";
  }
  return os.str();
}

}  // namespace psched
