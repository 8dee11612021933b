#include "psched/branch_price.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <iomanip>

namespace psched {

namespace {
constexpr double kFracTol = 1e-6;
constexpr double kNegRcTol = -1e-6;

double frac_part(double v) { return std::fabs(v - std::round(v)); }

std::vector<int> group_support(const MasterState& state, const std::vector<double>& lambda,
                               int group, bool fractional_only) {
  std::vector<int> ids;
  for (const auto& c : state.pool()) {
    if (c.group != group) continue;
    double v = lambda[c.id];
    if (std::fabs(v) < 1e-9) continue;
    if (fractional_only && frac_part(v) <= kFracTol) continue;
    ids.push_back(c.id);
  }
  return ids;
}

}  // namespace

std::vector<std::vector<int>> pattern_classes(const MasterState& state,
                                              const std::vector<double>& lambda,
                                              int group) {
  std::vector<int> support = group_support(state, lambda, group, false);
  std::map<std::vector<std::vector<char>>, std::vector<int>> classes;
  for (int id : support) classes[state.pool()[id].x].push_back(id);
  std::vector<std::vector<int>> out;
  for (auto& [pat, ids] : classes) out.push_back(ids);
  return out;
}

std::optional<int> check_integrality(const MasterState& state,
                                     const std::vector<double>& lambda) {
  for (int z = 0; z < state.num_groups(); ++z) {
    for (const auto& cls : pattern_classes(state, lambda, z)) {
      double sum = 0.0;
      for (int id : cls) sum += lambda[id];
      if (frac_part(sum) > kFracTol) return z;
    }
  }
  return std::nullopt;
}

bool choose_threshold_direction(const std::vector<double>& lambda_le,
                                const std::vector<double>& lambda_ge) {
  if (lambda_ge.size() != lambda_le.size()) return lambda_ge.size() > lambda_le.size();
  double sq_le = 0.0, sq_ge = 0.0;
  for (double v : lambda_le) sq_le += v * v;
  for (double v : lambda_ge) sq_ge += v * v;
  return sq_ge > sq_le + 1e-12;
}

std::optional<BranchChoice> find_branching(const MasterState& state,
                                           const std::vector<double>& lambda, int group) {
  const auto& pool = state.pool();
  std::vector<int> F0 = group_support(state, lambda, group, true);
  if (F0.empty()) return std::nullopt;
  const int K = state.instance().groups[group].num_components();
  const int T = state.instance().periods;

  // Work queue of threshold sets.  When a set's sum is integral it splits on
  // a new coordinate into two refinements; exploring the direction-rule side
  // first walks the preferred chain, and the siblings cover the case where
  // that chain strands on a single-pattern subset with an integral sum.
  struct Item {
    std::vector<BranchThreshold> beta;
    std::vector<int> F;
  };
  std::vector<Item> queue = {{{}, F0}};
  while (!queue.empty()) {
    Item item = std::move(queue.back());
    queue.pop_back();
    double sum = 0.0;
    for (int id : item.F) sum += lambda[id];
    if (frac_part(sum) > kFracTol) {
      // the master row covers every pool column satisfying beta
      BranchChoice bc;
      bc.beta = std::move(item.beta);
      BranchingDecision probe{group, bc.beta, false, 0.0, -1};
      double full = 0.0;
      for (const auto& c : pool)
        if (column_satisfies(c, probe)) full += lambda[c.id];
      bc.v_beta = full;
      return bc;
    }
    // refine: coordinate with support on both sides, preferring frequently
    // maintained coordinates, then the side with less fractional mass
    int bk = -1, bt = -1;
    std::size_t best_ones = 0;
    double best_mass = 0.0;
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < K; ++k) {
        std::size_t ones = 0;
        double mass = 0.0;
        for (int id : item.F)
          if (pool[id].x[k][t]) {
            ++ones;
            mass += lambda[id];
          }
        if (ones == 0 || ones == item.F.size()) continue;
        bool better = false;
        if (ones > best_ones)
          better = true;
        else if (ones == best_ones && mass < best_mass - 1e-12)
          better = true;
        if (better) {
          bk = k;
          bt = t;
          best_ones = ones;
          best_mass = mass;
        }
      }
    if (bk < 0) continue;  // identical patterns, integral sum: a dead end

    std::vector<double> lam_le, lam_ge;
    for (int id : item.F)
      (pool[id].x[bk][bt] ? lam_ge : lam_le).push_back(lambda[id]);
    bool at_least = choose_threshold_direction(lam_le, lam_ge);

    Item chosen, sibling;
    chosen.beta = item.beta;
    chosen.beta.push_back({bk, bt, at_least});
    sibling.beta = std::move(item.beta);
    sibling.beta.push_back({bk, bt, !at_least});
    for (int id : item.F)
      (satisfies(pool[id].x, {bk, bt, at_least}) ? chosen.F : sibling.F).push_back(id);
    queue.push_back(std::move(sibling));
    queue.push_back(std::move(chosen));  // explored first
  }
  return std::nullopt;
}

std::pair<int, int> apply_branching(MasterState& state, int group, const BranchChoice& bc) {
  BranchingDecision down{group, bc.beta, false, bc.v_beta, -1};
  BranchingDecision up{group, bc.beta, true, bc.v_beta, -1};
  int d = state.add_decision(down);
  int u = state.add_decision(up);
  return {d, u};
}

Schedule repair_step(const MasterState& state, const std::vector<double>& lambda) {
  const Instance& inst = state.instance();
  Schedule s;
  for (int z = 0; z < state.num_groups(); ++z) {
    const auto& g = inst.groups[z];
    int slots = g.multiplicity;
    std::vector<MachinePlan> plans;
    for (const auto& cls : pattern_classes(state, lambda, z)) {
      double sum = 0.0;
      for (int id : cls) sum += lambda[id];
      long count = std::lround(sum);
      if (frac_part(sum) > kFracTol)
        throw ValidationError("repair: non-integral class sum");
      if (count <= 0) continue;
      // normalized convex combination of the class members
      const Column& first = state.pool()[cls.front()];
      MachinePlan merged;
      merged.x = first.x;
      merged.y.assign(inst.periods, 0.0);
      merged.r.assign(g.num_components(), std::vector<double>(inst.periods, 0.0));
      for (int id : cls) {
        const Column& c = state.pool()[id];
        double w = lambda[id] / sum;
        for (int t = 0; t < inst.periods; ++t) {
          merged.y[t] += w * c.y[t];
          for (int k = 0; k < g.num_components(); ++k) merged.r[k][t] += w * c.r[k][t];
        }
      }
      for (long i = 0; i < count && static_cast<int>(plans.size()) < slots; ++i)
        plans.push_back(merged);
    }
    while (static_cast<int>(plans.size()) < slots) plans.push_back(idle_plan(inst, z));
    for (auto& p : plans) s.machines.push_back(std::move(p));
  }
  return s;
}

double cost_lattice_step(const Instance& inst) {
  long long g = 0;
  for (const auto& grp : inst.groups)
    for (const auto& c : grp.components) {
      long long v = llround(c.cost * 1e6);
      if (v <= 0 || std::fabs(v - c.cost * 1e6) > 1e-3) return 0.0;
      g = g == 0 ? v : std::gcd(g, v);
    }
  double step = double(g) / 1e6;
  return step >= 1e-3 ? step : 0.0;
}

double tighten_to_lattice(double bound, double step) {
  if (step <= 0.0 || !std::isfinite(bound)) return bound;
  return step * std::ceil((bound - 1e-9) / step);
}

namespace {

struct BpNode {
  long id = 0;
  int parent = -1;
  int depth = 0;
  std::vector<int> decisions;  // active decision indices on the path
  double bound = -kInf;
};

struct Timers {
  double exact_pricing = 0, integer_rmp = 0, branching = 0, rmp_resolve = 0;
};

class Stopwatch {
 public:
  explicit Stopwatch(double& sink) : sink_(sink), t0_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  double& sink_;
  std::chrono::steady_clock::time_point t0_;
};

std::vector<PricingDecision> decisions_for_group(const MasterState& master,
                                                 const BpNode& node,
                                                 const DualBundle& duals, int z) {
  std::vector<PricingDecision> out;
  for (int idx : node.decisions) {
    const BranchingDecision& d = master.decisions()[idx];
    if (d.group != z) continue;
    out.push_back({d, duals.gamma.empty() ? 0.0 : duals.gamma[idx]});
  }
  return out;
}

}  // namespace

SolveReport solve_bp(const Instance& inst, const SolveLimits& limits,
                     const BpConfig& config, Schedule* out_schedule) {
  using clock = std::chrono::steady_clock;
  auto t_start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t_start).count(); };
  auto out_of_time = [&] { return limits.time > 0 && elapsed() > limits.time; };

  check_instance(inst);
  MasterState master(inst);
  std::vector<int> mult;
  for (const auto& g : inst.groups) mult.push_back(g.multiplicity);
  const int G = static_cast<int>(inst.groups.size());
  const double lattice = cost_lattice_step(inst);

  SolveReport rep;
  rep.method = "dw";
  Timers timers;

  double c_imp = kInf;
  Schedule best_schedule;
  long cols_since_heuristic = 0;

  auto record_incumbent = [&](const Schedule& s, double cost) {
    if (cost < c_imp - 1e-9) {
      auto violations = validate_schedule(inst, s);
      if (!violations.empty())
        throw ValidationError("bp: incumbent fails validation: " +
                              violations.front().describe());
      c_imp = cost;
      best_schedule = s;
    }
  };

  auto expand_lambda = [&](const std::vector<double>& lambda) {
    return repair_step(master, lambda);
  };

  auto run_rmp_heuristic = [&]() {
    if (!config.rmp_heuristic || master.pool().empty()) return;
    Stopwatch sw(timers.integer_rmp);
    IntegerRmpLimits il;
    il.time = config.rmp_heuristic_time;
    il.solutions = 1;
    if (std::isfinite(c_imp)) il.cutoff = c_imp;
    auto sol = master.solve_integer_rmp(il);
    cols_since_heuristic = 0;
    if (sol) record_incumbent(expand_lambda(sol->lambda), sol->objective);
  };

  // solve one group's pricing; returns outcome
  auto price_group = [&](const BpNode& node, const DualBundle& duals, int z,
                         bool exact, double c_rmp) {
    PricingProblem p = build_pricing(inst, z, duals, decisions_for_group(master, node, duals, z));
    if (exact && config.reduced_cost_cut && G == 1 && std::isfinite(c_imp) &&
        !duals.farkas) {
      if (auto rhs = early_stop_rhs(c_imp, c_rmp, mult[z]))
        p.add_reduced_cost_cap(*rhs + duals.theta[z]);
    }
    PricingLimits pl;
    pl.exact = exact;
    if (limits.time > 0) pl.time = std::max(1.0, limits.time - elapsed());
    return solve_pricing(inst, p, pl);
  };

  // Dinkelbach check: l is a valid lambda price iff min cost - l*pi^T y >= 0
  // over the group's schedule space.
  auto validated_farley = [&](const DualBundle& duals) -> double {
    if (!config.farley || G != 1 || duals.farkas) return -kInf;
    double pi_e = 0.0;
    for (int t = 0; t < inst.periods; ++t) pi_e += duals.pi[t] * inst.demand[t];
    if (pi_e <= 1e-12) return -kInf;
    double l_cand = kInf;
    for (const auto& c : master.pool()) {
      double sold = 0.0;
      for (int t = 0; t < inst.periods; ++t) sold += duals.pi[t] * c.y[t];
      if (sold > 1e-12) l_cand = std::min(l_cand, c.cost / sold);
    }
    if (!std::isfinite(l_cand)) return -kInf;
    for (int round = 0; round < 3; ++round) {
      DualBundle scaled;
      scaled.pi.assign(inst.periods, 0.0);
      for (int t = 0; t < inst.periods; ++t) scaled.pi[t] = l_cand * duals.pi[t];
      scaled.theta.assign(G, 0.0);
      PricingProblem p = build_pricing(inst, 0, scaled, {});
      PricingLimits pl;
      pl.exact = true;
      if (limits.time > 0) pl.time = std::max(1.0, limits.time - elapsed());
      PricingOutcome o = solve_pricing(inst, p, pl);
      double zmin = o.column ? o.column->reduced_cost : o.dual_bound;
      if (zmin >= -1e-9) return l_cand * pi_e;  // validated
      if (!o.column) break;
      double sold = 0.0;
      for (int t = 0; t < inst.periods; ++t) sold += duals.pi[t] * o.column->column.y[t];
      if (sold <= 1e-12) break;
      l_cand = o.column->column.cost / sold;
    }
    return -kInf;
  };

  std::vector<BpNode> arena;
  using Entry = std::pair<double, long>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> open(cmp);
  arena.push_back({0, -1, 0, {}, -kInf});
  open.push({-kInf, 0});

  double pruned_or_open_min = kInf;  // floor over abandoned frontier parts
  bool hit_limit = false;
  bool root_infeasible = false;

  while (!open.empty()) {
    if (out_of_time() || (limits.nodes > 0 && rep.nodes >= limits.nodes)) {
      hit_limit = true;
      break;
    }
    auto [bnd, id] = open.top();
    open.pop();
    if (std::isfinite(c_imp) && bnd >= c_imp - 1e-9) continue;  // dominated
    BpNode node = arena[id];
    ++rep.nodes;

    // switch the branching rows for this node
    for (std::size_t b = 0; b < master.decisions().size(); ++b)
      master.set_decision_active(static_cast<int>(b), false);
    for (int b : node.decisions) master.set_decision_active(b, true);

    double node_dual = std::isfinite(node.bound) ? node.bound : -kInf;
    long rounds_at_node = 0;
    long node_columns = 0;
    bool node_closed = false;
    std::string close_kind = "open";

    while (!node_closed) {
      if (out_of_time() || (limits.nodes > 0 && rep.nodes > limits.nodes)) {
        hit_limit = true;
        pruned_or_open_min = std::min(pruned_or_open_min, node_dual);
        close_kind = "limit";
        break;
      }
      RmpSolution rmp;
      {
        Stopwatch sw(timers.rmp_resolve);
        rmp = master.solve_rmp();
      }
      ++rep.pricing_rounds;
      ++rounds_at_node;

      if (rmp.status == LpStatus::Infeasible) {
        // Farkas pricing: look for a column that breaks the certificate.
        bool resolved = false;
        std::vector<int> order = jit_ordering(inst, rmp.duals);
        for (int z : order) {
          PricingOutcome o;
          {
            Stopwatch sw(timers.exact_pricing);
            o = price_group(node, rmp.duals, z, true, 0.0);
          }
          if (o.column) {
            int before = static_cast<int>(master.pool().size());
            master.add_column(o.column->column);
            if (static_cast<int>(master.pool().size()) > before) {
              ++rep.columns;
              ++node_columns;
              ++cols_since_heuristic;
              resolved = true;
              break;
            }
          }
        }
        if (!resolved) {
          node_closed = true;
          close_kind = "infeasible";
          if (node.id == 0) root_infeasible = true;
        }
        continue;
      }
      if (rmp.status != LpStatus::Optimal)
        throw LpError("bp: restricted master did not solve");

      double c_rmp = rmp.objective;
      const std::vector<double>& lambda = rmp.lambda;
      std::vector<int> order = jit_ordering(inst, rmp.duals);

      // limited pricing pass
      bool added = false;
      if (config.parallel > 1) {
        std::vector<std::future<PricingOutcome>> futs;
        for (int z : order)
          futs.push_back(std::async(std::launch::async, [&, z] {
            return price_group(node, rmp.duals, z, false, c_rmp);
          }));
        for (std::size_t i = 0; i < order.size(); ++i) {
          PricingOutcome o = futs[i].get();
          if (o.column) {
            int before = static_cast<int>(master.pool().size());
            master.add_column(o.column->column);
            if (static_cast<int>(master.pool().size()) > before) {
              ++rep.columns;
              ++node_columns;
              ++cols_since_heuristic;
              added = true;
            }
          }
        }
      } else {
        for (int z : order) {
          PricingOutcome o = price_group(node, rmp.duals, z, false, c_rmp);
          if (o.column) {
            int before = static_cast<int>(master.pool().size());
            master.add_column(o.column->column);
            if (static_cast<int>(master.pool().size()) > before) {
              ++rep.columns;
              ++node_columns;
              ++cols_since_heuristic;
              added = true;
              break;  // re-solve the RMP with fresh duals
            }
          }
        }
      }

      if (!added) {
        // exact pass with dual bounds
        std::vector<double> w(G, 0.0);
        std::vector<char> have_w(G, 0);
        bool exact_added = false;
        bool pruned_by_cut = false;
        for (int z : order) {
          PricingOutcome o;
          {
            Stopwatch sw(timers.exact_pricing);
            o = price_group(node, rmp.duals, z, true, c_rmp);
          }
          if (o.infeasible) {
            // reduced-cost cap empty: no column can pull this node under the
            // incumbent, so the node is done
            node_dual = std::max(node_dual, tighten_to_lattice(std::min(c_rmp, c_imp), lattice));
            pruned_by_cut = true;
            break;
          }
          w[z] = o.dual_bound;
          have_w[z] = 1;
          if (o.column) {
            int before = static_cast<int>(master.pool().size());
            master.add_column(o.column->column);
            if (static_cast<int>(master.pool().size()) > before) {
              ++rep.columns;
              ++node_columns;
              ++cols_since_heuristic;
              exact_added = true;
              break;
            }
          }
        }
        if (pruned_by_cut) {
          node_closed = true;
          close_kind = "pruned";
          break;
        }
        bool all_w = std::all_of(have_w.begin(), have_w.end(), [](char c) { return c; });
        if (all_w) {
          double lag = lagrangian_bound(c_rmp, w, mult);
          rep.bound_events.push_back(lag);
          double tightened = tighten_to_lattice(lag, lattice);
          rep.bound_events.push_back(tightened);
          node_dual = std::max(node_dual, tightened);
        }
        if (std::isfinite(c_imp) && node_dual >= c_imp - 1e-9) {
          node_closed = true;
          close_kind = "pruned";
          break;
        }

        if (!exact_added) {
          // node LP converged: c_rmp is the master optimum here
          double farley = validated_farley(rmp.duals);
          if (std::isfinite(farley)) rep.bound_events.push_back(farley);
          double tightened = tighten_to_lattice(std::max(c_rmp, farley), lattice);
          rep.bound_events.push_back(tightened);
          node_dual = std::max(node_dual, tightened);
          if (std::isfinite(c_imp) && node_dual >= c_imp - 1e-9) {
            node_closed = true;
            close_kind = "pruned";
            break;
          }
          if (node.id == 0 || cols_since_heuristic >= config.rmp_heuristic_trigger)
            run_rmp_heuristic();
          auto viol = check_integrality(master, lambda);
          if (!viol) {
            Schedule s = expand_lambda(lambda);
            record_incumbent(s, c_rmp);
            node_closed = true;
            close_kind = "integral";
          } else {
            Stopwatch sw(timers.branching);
            auto bc = find_branching(master, lambda, *viol);
            if (!bc) {
              std::ostringstream os;
              os << "bp: violating group yielded no branching set; lambda:";
              for (const auto& c : master.pool())
                if (c.group == *viol && std::fabs(lambda[c.id]) > 1e-12)
                  os << " [" << c.id << "]=" << std::setprecision(12) << lambda[c.id];
              throw ValidationError(os.str());
            }
            auto [dn, up] = apply_branching(master, *viol, *bc);
            long id_dn = static_cast<long>(arena.size());
            BpNode child_dn{id_dn, static_cast<int>(node.id), node.depth + 1,
                            node.decisions, node_dual};
            child_dn.decisions.push_back(dn);
            arena.push_back(child_dn);
            open.push({node_dual, id_dn});
            long id_up = static_cast<long>(arena.size());
            BpNode child_up{id_up, static_cast<int>(node.id), node.depth + 1,
                            node.decisions, node_dual};
            child_up.decisions.push_back(up);
            arena.push_back(child_up);
            open.push({node_dual, id_up});
            node_closed = true;
            close_kind = "branched";
          }
          break;
        }
      }

      // heuristic trigger mid-node
      if (cols_since_heuristic >= config.rmp_heuristic_trigger) run_rmp_heuristic();

      // early branching against tailing off
      if (config.early_branching && rounds_at_node >= config.early_branching_min_rounds &&
          std::isfinite(node_dual) &&
          tighten_to_lattice(c_rmp, lattice) <= node_dual + 1e-9) {
        auto viol = check_integrality(master, lambda);
        if (viol) {
          Stopwatch sw(timers.branching);
          auto bc = find_branching(master, lambda, *viol);
          if (bc) {
            auto [dn, up] = apply_branching(master, *viol, *bc);
            for (int decision : {dn, up}) {
              long cid = static_cast<long>(arena.size());
              BpNode child{cid, static_cast<int>(node.id), node.depth + 1, node.decisions,
                           node_dual};
              child.decisions.push_back(decision);
              arena.push_back(child);
              open.push({node_dual, cid});
            }
            node_closed = true;
            close_kind = "early-branched";
          }
        }
      }
    }

    std::ostringstream trace;
    trace << node.id << "\t" << node.depth << "\t"
          << (std::isfinite(node_dual) ? node_dual : -1.0) << "\t" << rounds_at_node << "\t"
          << node_columns;
    rep.node_trace.push_back(trace.str());
    rep.node_bounds.push_back({node.id, node.parent, node_dual});
    if (hit_limit) {
      pruned_or_open_min = std::min(pruned_or_open_min, node_dual);
      break;
    }
  }

  // global dual bound: open frontier, abandoned nodes and the incumbent
  double frontier = kInf;
  while (!open.empty()) {
    frontier = std::min(frontier, open.top().first);
    open.pop();
  }
  double dual = std::min({frontier, pruned_or_open_min, c_imp});

  rep.primal = c_imp;
  rep.dual = dual;
  bool exhausted = !hit_limit && frontier == kInf && pruned_or_open_min == kInf;
  if ((root_infeasible || exhausted) && !std::isfinite(c_imp)) {
    rep.status = SolveStatus::Infeasible;
    rep.gap = 0.0;
  } else if (!hit_limit && frontier == kInf && std::isfinite(c_imp)) {
    rep.status = SolveStatus::Optimal;
    rep.dual = c_imp;
    rep.gap = 0.0;
  } else {
    rep.status = SolveStatus::Limit;
    rep.gap = std::isfinite(c_imp) ? rmp_gap(c_imp, std::isfinite(dual) ? dual : 0.0)
                                   : kInf;
  }
  if (out_schedule && std::isfinite(c_imp)) *out_schedule = best_schedule;

  rep.wall_time = elapsed();
  double accounted = timers.exact_pricing + timers.integer_rmp + timers.branching +
                     timers.rmp_resolve;
  double total = std::max(rep.wall_time, accounted);
  if (total > 0) {
    rep.time_breakdown["exact-pricing"] = timers.exact_pricing / total;
    rep.time_breakdown["integer-rmp"] = timers.integer_rmp / total;
    rep.time_breakdown["branching"] = timers.branching / total;
    rep.time_breakdown["rmp-resolve"] = timers.rmp_resolve / total;
    rep.time_breakdown["other"] = std::max(0.0, total - accounted) / total;
  }
  return rep;
}

}  // namespace psched
