#include "psched/minlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>

namespace psched {

namespace {
constexpr double kIntTol = 1e-6;
constexpr double kOaViolTol = 1e-6;
constexpr int kMaxCutsPerRow = 200;
constexpr int kMaxOaRoundsPerNode = 60;
}  // namespace

double arg_value(const MinlpArg& a, const std::vector<double>& x) {
  return a.var >= 0 ? x[a.var] : a.constant;
}

namespace {

double row_rhs_value(const NonlinearRow& row, const std::vector<double>& x) {
  std::vector<double> peers(row.peers.size());
  for (std::size_t i = 0; i < row.peers.size(); ++i) peers[i] = arg_value(row.peers[i], x);
  double v = eval_func(row.f, arg_value(row.prev, x), arg_value(row.production, x), peers);
  if (row.relax_var >= 0) v += row.big_m * x[row.relax_var];
  return v;
}

}  // namespace

double nonlinear_violation(const NonlinearRow& row, const std::vector<double>& x) {
  return x[row.target] - row_rhs_value(row, x);
}

int add_oa_cut(LpProblem& relaxation, const NonlinearRow& row,
               const std::vector<double>& point) {
  FuncPoint p;
  p.prev = arg_value(row.prev, point);
  p.production = arg_value(row.production, point);
  for (const auto& a : row.peers) p.peers.push_back(arg_value(a, point));
  double fval = eval_func(row.f, p.prev, p.production, p.peers);
  std::vector<double> grad = grad_func(row.f, p);

  // target - sum g_s * x_s - M*xb <= f(p) - sum g_s * p_s  (var args only;
  // constant args fold into the right-hand side automatically).
  std::map<int, double> coeff;
  coeff[row.target] += 1.0;
  double rhs = fval;
  auto fold = [&](const MinlpArg& a, double g, double pv) {
    if (a.var >= 0) {
      coeff[a.var] -= g;
      rhs -= g * pv;
    }
  };
  fold(row.prev, grad[0], p.prev);
  fold(row.production, grad[1], p.production);
  for (std::size_t i = 0; i < row.peers.size(); ++i)
    fold(row.peers[i], grad[2 + i], p.peers[i]);
  if (row.relax_var >= 0) coeff[row.relax_var] -= row.big_m;

  LpRow cut;
  for (auto [j, a] : coeff)
    if (a != 0.0) cut.coeffs.push_back({j, a});
  cut.rel = 'L';
  cut.rhs = rhs;
  relaxation.rows.push_back(cut);
  return static_cast<int>(relaxation.rows.size()) - 1;
}

namespace {

struct BbNode {
  long id = 0;
  int parent = -1;
  int branch_var = -1;
  double lo = 0.0, up = 0.0;  // bound override for branch_var
  double bound = -kInf;
  int depth = 0;
};

struct NodeOrder {
  bool operator()(const std::pair<double, long>& a, const std::pair<double, long>& b) const {
    if (a.first != b.first) return a.first > b.first;  // min bound first
    return a.second > b.second;                        // then FIFO
  }
};

}  // namespace

MinlpResult solve_minlp(const ConvexMinlp& m, const MinlpLimits& limits,
                        std::optional<double> objective_cutoff) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto out_of_time = [&] {
    return limits.time > 0 &&
           std::chrono::duration<double>(clock::now() - t0).count() > limits.time;
  };

  MinlpResult res;
  LpProblem relax = m.linear;  // grows with OA cuts, shared across nodes
  std::vector<std::vector<int>> cuts_of_row(m.nonlinear.size());
  std::vector<int> cut_age(m.nonlinear.size(), 0);

  std::vector<BbNode> arena;
  std::priority_queue<std::pair<double, long>, std::vector<std::pair<double, long>>, NodeOrder>
      open;
  arena.push_back({0, -1, -1, 0, 0, -kInf, 0});
  open.push({-kInf, 0});

  double primal = kInf;
  std::vector<double> incumbent;
  double pruned_min = kInf;  // min bound among nodes pruned by the cutoff
  int improving_found = 0;
  bool hit_limit = false;

  auto gap_of = [&](double p, double d) {
    if (!std::isfinite(p)) return kInf;
    return (p - d) / std::max(1.0, std::fabs(p));
  };

  auto node_bounds = [&](long idx, std::vector<double>& lo, std::vector<double>& up) {
    lo = m.linear.lower;
    up = m.linear.upper;
    for (long i = idx; i >= 0; i = arena[i].parent) {
      const BbNode& n = arena[i];
      if (n.branch_var >= 0) {
        lo[n.branch_var] = std::max(lo[n.branch_var], n.lo);
        up[n.branch_var] = std::min(up[n.branch_var], n.up);
      }
    }
  };

  std::vector<double> lo, up;
  while (!open.empty()) {
    if (out_of_time() || (limits.nodes > 0 && res.nodes >= limits.nodes)) {
      hit_limit = true;
      break;
    }
    auto [bnd, idx] = open.top();
    double cutoff_line = objective_cutoff ? std::min(primal, *objective_cutoff) : primal;
    if (std::isfinite(cutoff_line) && bnd >= cutoff_line - 1e-9) {
      // best-bound frontier is dominated, so everything left is prunable
      bool by_cutoff = objective_cutoff && cutoff_line == *objective_cutoff;
      while (!open.empty()) {
        if (by_cutoff) pruned_min = std::min(pruned_min, std::max(open.top().first, cutoff_line));
        open.pop();
      }
      break;
    }
    open.pop();
    ++res.nodes;

    node_bounds(idx, lo, up);
    bool infeasible_bounds = false;
    for (std::size_t j = 0; j < lo.size(); ++j)
      if (lo[j] > up[j] + 1e-12) infeasible_bounds = true;
    if (infeasible_bounds) continue;

    LpProblem node_lp = relax;
    node_lp.lower = lo;
    node_lp.upper = up;
    SimplexSolver solver(std::move(node_lp));

    double node_bound = std::isfinite(bnd) ? bnd : -kInf;
    bool pruned = false, converged = false;
    LpSolution sol;
    for (int round = 0; round < kMaxOaRoundsPerNode; ++round) {
      if (out_of_time()) {
        // abandon this node mid-refinement; only its best-known bound holds
        pruned_min = std::min(pruned_min, node_bound);
        hit_limit = true;
        pruned = true;
        break;
      }
      sol = solver.solve();
      if (sol.status == LpStatus::Infeasible) {
        pruned = true;
        break;
      }
      if (sol.status == LpStatus::Unbounded) throw LpError("minlp: relaxation unbounded");
      if (sol.status == LpStatus::IterationLimit) throw LpError("minlp: lp iteration limit");
      node_bound = std::max(node_bound, sol.objective);
      if (std::isfinite(cutoff_line) && node_bound >= cutoff_line - 1e-9) {
        if (objective_cutoff && node_bound >= *objective_cutoff - 1e-9)
          pruned_min = std::min(pruned_min, node_bound);
        pruned = true;
        break;
      }
      // separate violated nonlinear rows at the LP point
      double maxviol = 0.0;
      for (std::size_t ri = 0; ri < m.nonlinear.size(); ++ri) {
        double viol = nonlinear_violation(m.nonlinear[ri], sol.primal);
        maxviol = std::max(maxviol, viol);
        if (viol > kOaViolTol) {
          int cut_idx = add_oa_cut(relax, m.nonlinear[ri], sol.primal);
          ++res.cuts;
          if (static_cast<int>(cuts_of_row[ri].size()) >= kMaxCutsPerRow) {
            // recycle the oldest cut slot for this row
            int victim = cuts_of_row[ri][cut_age[ri] % kMaxCutsPerRow];
            relax.rows[victim] = relax.rows.back();
            relax.rows.pop_back();
            ++cut_age[ri];
            cut_idx = victim;
          } else {
            cuts_of_row[ri].push_back(cut_idx);
          }
          solver.add_row(relax.rows[cut_idx]);
        }
      }
      if (maxviol <= kOaViolTol) {
        converged = true;
        break;
      }
    }
    if (pruned) continue;
    if (!converged) throw LpError("minlp: outer approximation failed to converge at node");

    // branching candidate: most fractional integral variable, ties by index
    int bvar = -1;
    double bestfrac = kIntTol;
    for (int j : m.integer_vars) {
      double v = sol.primal[j];
      double frac = std::fabs(v - std::round(v));
      if (frac > bestfrac + 1e-12) {
        bestfrac = frac;
        bvar = j;
      }
    }

    if (bvar < 0) {
      if (sol.objective < primal - 1e-9) {
        primal = sol.objective;
        incumbent = sol.primal;
        for (int j : m.integer_vars) incumbent[j] = std::round(incumbent[j]);
        ++improving_found;
        if (limits.solutions > 0 && improving_found >= limits.solutions) hit_limit = true;
      }
    } else {
      double v = sol.primal[bvar];
      long id_down = static_cast<long>(arena.size());
      arena.push_back({id_down, static_cast<int>(idx), bvar, -kInf, std::floor(v),
                       node_bound, arena[idx].depth + 1});
      open.push({node_bound, id_down});
      long id_up = static_cast<long>(arena.size());
      arena.push_back({id_up, static_cast<int>(idx), bvar, std::ceil(v), kInf, node_bound,
                       arena[idx].depth + 1});
      open.push({node_bound, id_up});
    }

    double frontier = open.empty() ? kInf : std::max(-kInf, open.top().first);
    res.dual = std::min({primal, pruned_min, frontier});
    res.dual_trace.push_back(res.dual);
    if (hit_limit) break;
    if (std::isfinite(primal) && limits.gap > 1e-9 && gap_of(primal, res.dual) <= limits.gap) {
      hit_limit = true;  // gap-limited run, not a proven optimum
      break;
    }
  }

  double frontier = kInf;
  while (!open.empty()) {
    frontier = std::min(frontier, open.top().first);
    open.pop();
  }
  res.dual = std::min({primal, pruned_min, frontier});
  res.primal = primal;
  res.incumbent = incumbent;

  bool exhausted = !hit_limit && frontier == kInf;
  if (exhausted && !std::isfinite(primal) && pruned_min == kInf) {
    res.status = MinlpStatus::Infeasible;
    res.dual = kInf;
  } else if (std::isfinite(primal) && gap_of(primal, res.dual) <= 1e-6) {
    res.status = MinlpStatus::Optimal;
  } else {
    res.status = MinlpStatus::Limit;
  }
  return res;
}

}  // namespace psched
