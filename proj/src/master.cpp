#include "psched/master.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "psched/minlp.hpp"

namespace psched {

namespace {
constexpr double kColTol = 1e-6;
constexpr double kDedupTol = 1e-9;
}  // namespace

MachinePlan column_plan(const Column& c) {
  MachinePlan p;
  p.x = c.x;
  p.y = c.y;
  p.r = c.r;
  return p;
}

Column column_from_plan(const Instance& inst, int group, const MachinePlan& p) {
  Column c;
  c.group = group;
  c.x = p.x;
  c.y = p.y;
  c.r = p.r;
  c.cost = plan_cost(inst.groups[group], p);
  return c;
}

bool satisfies(const std::vector<std::vector<char>>& x, const BranchThreshold& th) {
  return th.at_least ? x[th.k][th.t] >= 1 : x[th.k][th.t] <= 0;
}

bool column_satisfies(const Column& c, const BranchingDecision& d) {
  if (c.group != d.group) return false;
  for (const auto& th : d.beta)
    if (!satisfies(c.x, th)) return false;
  return true;
}

double rmp_gap(double primal, double dual) {
  return (primal - dual) / std::max(1.0, primal);
}

MasterState::MasterState(const Instance& inst) : inst_(&inst) {
  check_instance(inst);
  total_machines_ = inst.num_machines();
  for (int t = 0; t < inst.periods; ++t) lp_.add_row({}, 'G', inst.demand[t]);
  for (const auto& g : inst.groups) lp_.add_row({}, 'L', double(g.multiplicity));
  solver_ = std::make_unique<SimplexSolver>(lp_);
}

void MasterState::check_column(const Column& c) const {
  if (c.group < 0 || c.group >= num_groups())
    throw ValidationError("column: bad group id");
  const auto& g = inst_->groups[c.group];
  const int T = inst_->periods, K = g.num_components();
  if (static_cast<int>(c.y.size()) != T || static_cast<int>(c.x.size()) != K ||
      static_cast<int>(c.r.size()) != K)
    throw ValidationError("column: dimension mismatch");

  // single-machine feasibility = validator on a one-machine instance with
  // zero demand (constraint 1.1 does not apply to a column)
  Instance single;
  single.periods = T;
  single.demand.assign(T, 0.0);
  single.groups.push_back(g);
  single.groups[0].multiplicity = 1;
  Schedule s;
  s.machines.push_back(column_plan(c));
  for (const auto& v : validate_schedule(single, s))
    if (v.family != "demand")
      throw ValidationError("column: " + v.describe());

  // The per-period demand cap (y_t <= E_t) is a pricing-side restriction of
  // the search space, not a validity condition: schedules that oversupply a
  // period are still feasible machine plans and stay accepted here.
  double cost = plan_cost(g, column_plan(c));
  if (std::fabs(cost - c.cost) > kColTol)
    throw ValidationError("column: cost inconsistent with x");
}

std::vector<std::pair<int, double>> MasterState::column_entries(const Column& c) const {
  std::vector<std::pair<int, double>> entries;
  for (int t = 0; t < inst_->periods; ++t)
    if (std::fabs(c.y[t]) > 1e-12) entries.push_back({demand_row(t), c.y[t]});
  entries.push_back({convexity_row(c.group), 1.0});
  for (std::size_t b = 0; b < decisions_.size(); ++b)
    if (column_satisfies(c, decisions_[b])) entries.push_back({decisions_[b].row, 1.0});
  return entries;
}

int MasterState::add_column(Column col) {
  check_column(col);
  for (const auto& existing : pool_) {
    if (existing.group != col.group) continue;
    bool same = true;
    for (int k = 0; k < static_cast<int>(col.x.size()) && same; ++k)
      for (int t = 0; t < inst_->periods && same; ++t)
        if (existing.x[k][t] != col.x[k][t]) same = false;
    for (int t = 0; t < inst_->periods && same; ++t)
      if (std::fabs(existing.y[t] - col.y[t]) > kDedupTol) same = false;
    if (same) return existing.id;
  }
  col.id = static_cast<int>(pool_.size());
  double zmax = inst_->groups[col.group].multiplicity;
  auto entries = column_entries(col);
  solver_->add_column(0.0, zmax, col.cost, entries);
  int j = lp_.add_var(0.0, zmax, col.cost);
  (void)j;
  for (auto [r, a] : entries) lp_.rows[r].coeffs.push_back({col.id, a});
  for (std::size_t b = 0; b < decisions_.size(); ++b)
    if (column_satisfies(col, decisions_[b])) members_[b].push_back(col.id);
  pool_.push_back(std::move(col));
  return pool_.back().id;
}

RmpSolution MasterState::solve_rmp() {
  LpSolution s = solver_->solve();
  RmpSolution out;
  out.status = s.status;
  if (s.status == LpStatus::Optimal) {
    out.objective = s.objective;
    out.lambda = s.primal;
    out.duals.pi.assign(inst_->periods, 0.0);
    for (int t = 0; t < inst_->periods; ++t)
      out.duals.pi[t] = std::max(0.0, s.row_duals[demand_row(t)]);
    out.duals.theta.assign(num_groups(), 0.0);
    for (int z = 0; z < num_groups(); ++z)
      out.duals.theta[z] = std::min(0.0, s.row_duals[convexity_row(z)]);
    out.duals.gamma.assign(decisions_.size(), 0.0);
    for (std::size_t b = 0; b < decisions_.size(); ++b)
      out.duals.gamma[b] = active_[b] ? s.row_duals[decisions_[b].row] : 0.0;
  } else if (s.status == LpStatus::Infeasible) {
    out.duals.farkas = true;
    out.duals.pi.assign(inst_->periods, 0.0);
    for (int t = 0; t < inst_->periods; ++t)
      out.duals.pi[t] = std::max(0.0, s.farkas_ray[demand_row(t)]);
    out.duals.theta.assign(num_groups(), 0.0);
    for (int z = 0; z < num_groups(); ++z)
      out.duals.theta[z] = std::min(0.0, s.farkas_ray[convexity_row(z)]);
    out.duals.gamma.assign(decisions_.size(), 0.0);
    for (std::size_t b = 0; b < decisions_.size(); ++b)
      out.duals.gamma[b] = active_[b] ? s.farkas_ray[decisions_[b].row] : 0.0;
  }
  return out;
}

std::optional<IntegerRmpSolution> MasterState::solve_integer_rmp(
    const IntegerRmpLimits& limits) {
  if (pool_.empty()) return std::nullopt;
  ConvexMinlp ip;
  ip.linear = lp_;
  for (int j = 0; j < static_cast<int>(pool_.size()); ++j) ip.integer_vars.push_back(j);
  MinlpLimits ml;
  ml.time = limits.time;
  ml.solutions = limits.solutions;
  MinlpResult r = solve_minlp(ip, ml, limits.cutoff);
  if (r.incumbent.empty()) return std::nullopt;
  if (limits.cutoff && r.primal >= *limits.cutoff - 1e-9) return std::nullopt;
  IntegerRmpSolution sol;
  sol.lambda = r.incumbent;
  sol.objective = r.primal;
  return sol;
}

int MasterState::add_decision(BranchingDecision d) {
  int idx = static_cast<int>(decisions_.size());
  std::vector<int> mem;
  LpRow row;
  row.rel = d.up ? 'G' : 'L';
  row.rhs = d.up ? std::ceil(d.v_beta) : std::floor(d.v_beta);
  for (const auto& c : pool_)
    if (column_satisfies(c, d)) {
      mem.push_back(c.id);
      row.coeffs.push_back({c.id, 1.0});
    }
  d.row = solver_->add_row(row);
  lp_.rows.push_back(row);
  decisions_.push_back(d);
  members_.push_back(std::move(mem));
  active_.push_back(1);
  set_decision_active(idx, false);  // nodes switch rows on explicitly
  return idx;
}

void MasterState::set_decision_active(int idx, bool active) {
  if (active_[idx] == static_cast<char>(active)) return;
  const BranchingDecision& d = decisions_[idx];
  double rhs;
  if (active)
    rhs = d.up ? std::ceil(d.v_beta) : std::floor(d.v_beta);
  else
    rhs = d.up ? 0.0 : double(total_machines_);  // trivially satisfied
  solver_->set_row_rhs(d.row, rhs);
  lp_.rows[d.row].rhs = rhs;
  active_[idx] = static_cast<char>(active);
}

std::vector<int> MasterState::recompute_membership(int decision) const {
  std::vector<int> mem;
  for (const auto& c : pool_)
    if (column_satisfies(c, decisions_[decision])) mem.push_back(c.id);
  return mem;
}

std::string MasterState::dump_pool_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : pool_) {
    nlohmann::json jc;
    jc["id"] = c.id;
    jc["group"] = c.group;
    jc["cost"] = c.cost;
    nlohmann::json xs = nlohmann::json::array();
    for (const auto& row : c.x) {
      nlohmann::json jr = nlohmann::json::array();
      for (char v : row) jr.push_back(int(v));
      xs.push_back(jr);
    }
    jc["x"] = xs;
    jc["y"] = c.y;
    cols.push_back(jc);
  }
  return cols.dump(2);
}

}  // namespace psched
