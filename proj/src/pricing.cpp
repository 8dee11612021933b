#include "psched/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace psched {

namespace {
constexpr double kNegRcTol = -1e-6;
}

void PricingProblem::add_reduced_cost_cap(double rhs_with_theta) {
  LpRow row;
  for (int j = 0; j < model.linear.num_vars(); ++j) {
    double c = model.linear.objective[j];
    if (c != 0.0) row.coeffs.push_back({j, c});
  }
  row.rel = 'L';
  row.rhs = rhs_with_theta;
  model.linear.rows.push_back(row);
}

PricingProblem build_pricing(const Instance& inst, int z, const DualBundle& duals,
                             const std::vector<PricingDecision>& decisions) {
  const auto& g = inst.groups[z];
  PricingProblem p;
  p.group = z;
  p.K = g.num_components();
  p.T = inst.periods;
  LpProblem& lp = p.model.linear;
  const int T = p.T, K = p.K;
  const bool farkas = duals.farkas;

  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) {
      int j = lp.add_var(0.0, 1.0, farkas ? 0.0 : g.components[k].cost);
      p.model.integer_vars.push_back(j);
    }
  double ycap = g.production_cap();
  for (int t = 0; t < T; ++t)
    lp.add_var(0.0, std::min(ycap, inst.demand[t]), -duals.pi[t]);  // cap 4.3: y_t <= E_t
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) lp.add_var(0.0, g.components[k].max_condition, 0.0);
  lp.objective_constant = -duals.theta[z];

  for (int k = 0; k < K; ++k) {
    const auto& c = g.components[k];
    const int D = c.duration;
    for (int t = 0; t < T; ++t) {
      lp.add_row({{p.var_y(t), 1.0}, {p.var_x(k, t), c.max_production}}, 'L',
                 c.max_production);
      for (int i = t + 1; i <= t + D && i < T; ++i) {
        std::vector<std::pair<int, double>> coeffs = {{p.var_x(k, i), 1.0},
                                                      {p.var_x(k, t), -1.0}};
        if (t > 0) coeffs.push_back({p.var_x(k, t - 1), 1.0});
        lp.add_row(std::move(coeffs), 'G', 0.0);
      }
    }
  }
  for (auto [k, kp] : g.implications)
    for (int t = 0; t < T; ++t)
      lp.add_row({{p.var_x(k, t), 1.0}, {p.var_x(kp, t), -1.0}}, 'L', 0.0);

  for (int k = 0; k < K; ++k) {
    const auto& c = g.components[k];
    for (int t = 0; t < T; ++t) {
      NonlinearRow lim;
      lim.target = p.var_y(t);
      lim.f = c.limit;
      lim.prev = MinlpArg::of_var(p.var_r(k, t));
      lim.production = MinlpArg::of_const(0.0);
      p.model.nonlinear.push_back(lim);

      NonlinearRow deg;
      deg.target = p.var_r(k, t);
      deg.f = c.degradation;
      deg.prev = t == 0 ? MinlpArg::of_const(c.max_condition)
                        : MinlpArg::of_var(p.var_r(k, t - 1));
      deg.production = MinlpArg::of_var(p.var_y(t));
      for (std::size_t k2 = 0; k2 < c.degradation.domain.peer_max.size(); ++k2)
        deg.peers.push_back(t == 0 ? MinlpArg::of_const(g.components[k2].max_condition)
                                   : MinlpArg::of_var(p.var_r(static_cast<int>(k2), t - 1)));
      deg.relax_var = p.var_x(k, t);
      deg.big_m = big_m(c);
      p.model.nonlinear.push_back(deg);
    }
  }

  // Branching indicators.  gamma > 0: force delta to 0 unless every threshold
  // holds (delta <= 1-x for x<=0 thresholds, delta <= x for x>=1 thresholds).
  // gamma < 0: force delta to 1 when all thresholds hold,
  //   delta >= 1 - sum_{beta<=} x + sum_{beta>=} (x - 1).
  p.decisions = decisions;
  for (const auto& pd : decisions) {
    if (pd.decision.group != z)
      throw ValidationError("pricing: decision references another group");
    for (const auto& th : pd.decision.beta)
      if (th.k < 0 || th.k >= K || th.t < 0 || th.t >= T)
        throw ValidationError("pricing: threshold outside the group's index space");
    int d = lp.add_var(0.0, 1.0, -pd.gamma);
    p.delta_vars.push_back(d);
    p.model.integer_vars.push_back(d);
    if (pd.gamma > 0) {
      for (const auto& th : pd.decision.beta) {
        if (th.at_least)
          lp.add_row({{d, 1.0}, {p.var_x(th.k, th.t), -1.0}}, 'L', 0.0);
        else
          lp.add_row({{d, 1.0}, {p.var_x(th.k, th.t), 1.0}}, 'L', 1.0);
      }
    } else if (pd.gamma < 0) {
      LpRow row;
      row.coeffs.push_back({d, 1.0});
      double rhs = 1.0;
      for (const auto& th : pd.decision.beta) {
        if (th.at_least) {
          row.coeffs.push_back({p.var_x(th.k, th.t), -1.0});
          rhs -= 1.0;
        } else {
          row.coeffs.push_back({p.var_x(th.k, th.t), 1.0});
        }
      }
      row.rel = 'G';
      row.rhs = rhs;
      lp.rows.push_back(row);
    } else {
      lp.upper[d] = 0.0;  // zero dual: indicator is irrelevant
    }
  }
  return p;
}

PricingOutcome solve_pricing(const Instance& inst, const PricingProblem& p,
                             const PricingLimits& limits) {
  MinlpLimits ml;
  if (limits.exact) {
    ml.gap = 0.0;
  } else {
    ml.gap = limits.gap;
    ml.solutions = limits.solutions;
    ml.nodes = limits.nodes;
  }
  ml.time = limits.time;
  MinlpResult r = solve_minlp(p.model, ml);

  PricingOutcome out;
  out.dual_bound = r.dual;
  if (r.status == MinlpStatus::Infeasible) {
    out.infeasible = true;
    out.dual_bound = kInf;
    return out;
  }
  if (!r.incumbent.empty() && r.primal < kNegRcTol) {
    Column col;
    col.group = p.group;
    const auto& g = inst.groups[p.group];
    col.x.assign(p.K, std::vector<char>(p.T, 0));
    col.y.assign(p.T, 0.0);
    col.r.assign(p.K, std::vector<double>(p.T, 0.0));
    for (int k = 0; k < p.K; ++k)
      for (int t = 0; t < p.T; ++t) {
        col.x[k][t] = r.incumbent[p.var_x(k, t)] > 0.5 ? 1 : 0;
        col.r[k][t] = std::clamp(r.incumbent[p.var_r(k, t)], 0.0,
                                 g.components[k].max_condition);
      }
    for (int t = 0; t < p.T; ++t) col.y[t] = std::max(0.0, r.incumbent[p.var_y(t)]);
    col.cost = plan_cost(g, column_plan(col));
    out.column = PricedColumn{std::move(col), r.primal, r.dual};
  }
  return out;
}

double reduced_cost(const Column& col, const DualBundle& duals,
                    const std::vector<PricingDecision>& decisions) {
  double rc = duals.farkas ? 0.0 : col.cost;
  for (std::size_t t = 0; t < col.y.size(); ++t) rc -= duals.pi[t] * col.y[t];
  rc -= duals.theta[col.group];
  for (const auto& pd : decisions)
    if (column_satisfies(col, pd.decision)) rc -= pd.gamma;
  return rc;
}

double lagrangian_bound(double c_rmp, const std::vector<double>& w,
                        const std::vector<int>& multiplicities) {
  double b = c_rmp;
  for (std::size_t z = 0; z < w.size(); ++z)
    b += multiplicities[z] * std::min(0.0, w[z]);
  return b;
}

std::optional<double> farley_bound(const DualBundle& duals, const Column& col,
                                   const std::vector<double>& demand) {
  double sold = 0.0, value = 0.0;
  for (std::size_t t = 0; t < demand.size(); ++t) {
    sold += duals.pi[t] * col.y[t];
    value += duals.pi[t] * demand[t];
  }
  if (sold <= 1e-12) return std::nullopt;
  return (col.cost / sold) * value;
}

std::optional<double> early_stop_rhs(double c_imp, double c_rmp, int z_mult) {
  if (!std::isfinite(c_imp)) return std::nullopt;
  return (c_imp - c_rmp) / z_mult;
}

double jit_estimate(const Instance& inst, int z, const DualBundle& duals) {
  const auto& g = inst.groups[z];
  const int T = inst.periods, K = g.num_components();
  double cap = g.production_cap();

  std::vector<int> order(T);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return duals.pi[a] > duals.pi[b]; });

  std::vector<double> y(T, 0.0);
  auto recursion_ok = [&] {
    std::vector<double> r(K), rp(K);
    for (int k = 0; k < K; ++k) rp[k] = g.components[k].max_condition;
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < K; ++k) {
        const auto& c = g.components[k];
        std::vector<double> peers(c.degradation.domain.peer_max.size());
        for (std::size_t k2 = 0; k2 < peers.size(); ++k2) peers[k2] = rp[k2];
        double v = eval_func(c.degradation, rp[k], y[t], peers);
        if (v < 0.0) return false;
        r[k] = std::min(v, c.max_condition);
      }
      rp = r;
    }
    return true;
  };

  // greedily sell into the highest-priced periods while the machine survives
  for (int t : order) {
    if (duals.pi[t] <= 0.0) break;
    double trial = std::min(cap, inst.demand[t]);
    if (trial <= 0.0) continue;
    y[t] = trial;
    if (!recursion_ok()) y[t] = 0.0;
  }
  double estimate = -duals.theta[z];
  for (int t = 0; t < T; ++t) estimate -= duals.pi[t] * y[t];
  return estimate;
}

std::vector<int> jit_ordering(const Instance& inst, const DualBundle& duals) {
  std::vector<int> order(inst.groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> est(inst.groups.size());
  for (std::size_t z = 0; z < inst.groups.size(); ++z)
    est[z] = jit_estimate(inst, static_cast<int>(z), duals);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return est[a] < est[b]; });
  return order;
}

}  // namespace psched
