#include "psched/instgen.hpp"

#include <algorithm>
#include <cmath>

namespace psched {

namespace {

double draw_coeff(Rng& rng, std::vector<double>* out) {
  double c = rng.uniform(0.0, 3.0);
  if (out) out->push_back(c);
  return c;
}

FuncKind draw_kind(Rng& rng) {
  switch (rng.uniform_int(0, 2)) {
    case 0:
      return FuncKind::Linear;
    case 1:
      return FuncKind::Polynomial;
    default:
      return FuncKind::Exponential;
  }
}

// Raw increasing-convex coefficients for one slot of the given kind.  The
// exponential exponent is normalized by the slot range so 2^(c u) stays tame.
std::vector<double> draw_term_coeffs(Rng& rng, FuncKind kind, double range,
                                     std::vector<double>* out) {
  switch (kind) {
    case FuncKind::Linear:
      return {draw_coeff(rng, out)};
    case FuncKind::Polynomial:
      return {draw_coeff(rng, out), draw_coeff(rng, out), draw_coeff(rng, out)};
    case FuncKind::Exponential:
      return {draw_coeff(rng, out), draw_coeff(rng, out) / std::max(range, 1e-9)};
  }
  return {};
}

double term_value_at(FuncKind kind, const std::vector<double>& coeffs, double u,
                     bool production_slot) {
  switch (kind) {
    case FuncKind::Linear:
      return coeffs[0] * u;
    case FuncKind::Polynomial: {
      double v = 0, p = u;
      for (double c : coeffs) {
        v += c * p;
        p *= u;
      }
      return v;
    }
    case FuncKind::Exponential:
      return production_slot ? coeffs[0] * (std::exp2(coeffs[1] * u) - 1.0)
                             : coeffs[0] * (1.0 - std::exp2(-coeffs[1] * u));
  }
  return 0;
}

double term_slope_at_zero(FuncKind kind, const std::vector<double>& coeffs) {
  switch (kind) {
    case FuncKind::Linear:
      return coeffs[0];
    case FuncKind::Polynomial:
      return coeffs[0];
    case FuncKind::Exponential:
      return coeffs[0] * coeffs[1] * 0.6931471805599453;
  }
  return 0;
}

void scale_term(FuncKind kind, std::vector<double>& coeffs, double s) {
  // multiplying the amplitude scales the whole term for every family;
  // the exponential keeps its exponent so concavity is untouched
  if (kind == FuncKind::Exponential)
    coeffs[0] *= s;
  else
    for (double& c : coeffs) c *= s;
}

// Concavity of a raw polynomial u..u^3 with positive coefficients fails, so
// reflect it: h(u) = H(range) - H(range - u) is concave increasing on
// [0, range] whenever H is convex increasing.  Returns plain power-basis
// coefficients of h plus the implied constant (zero).
std::vector<double> reflect_polynomial(const std::vector<double>& c, double range) {
  double a = c[0], b = c[1], d = c[2], R = range;
  // H(v) = a v + b v^2 + d v^3;  h(u) = H(R) - H(R-u)
  // expand: h(u) = (a + 2bR + 3dR^2) u - (b + 3dR) u^2 + d u^3
  return {a + 2 * b * R + 3 * d * R * R, -(b + 3 * d * R), d};
}

}  // namespace

FuncSpec make_random_degradation(Rng& rng, double r_max, double q_max,
                                 const std::vector<double>& peer_r, double peer_prob,
                                 std::vector<double>* out) {
  FuncSpec f;
  f.kind = draw_kind(rng);
  f.constant = 0.0;  // keeps f(r, 0, .) <= r: idle machines never self-heal
  f.domain.prev_max = r_max;
  f.domain.production_max = q_max;
  f.domain.peer_max = peer_r;

  FuncTerm prev{Slot::PrevCondition, -1, draw_term_coeffs(rng, f.kind, r_max, out)};
  if (f.kind == FuncKind::Polynomial) prev.coeffs = reflect_polynomial(prev.coeffs, r_max);
  f.terms.push_back(prev);

  FuncTerm prod{Slot::Production, -1, draw_term_coeffs(rng, f.kind, q_max, out)};
  f.terms.push_back(prod);

  for (std::size_t k2 = 0; k2 < peer_r.size(); ++k2) {
    if (!rng.chance(peer_prob)) continue;
    FuncTerm peer{Slot::PeerCondition, static_cast<int>(k2),
                  draw_term_coeffs(rng, f.kind, peer_r[k2], out)};
    if (f.kind == FuncKind::Polynomial) peer.coeffs = reflect_polynomial(peer.coeffs, peer_r[k2]);
    // peers nudge the recursion rather than dominate it
    scale_term(f.kind, peer.coeffs, 0.15);
    f.terms.push_back(peer);
  }

  // normalize the condition part so f(r, 0, r..) <= r on the whole box:
  // zero constant + concavity + slope at most 1 at the origin
  double slope0 = 0.0;
  for (auto& t : f.terms)
    if (t.slot != Slot::Production) slope0 += term_slope_at_zero(f.kind, t.coeffs);
  if (slope0 > 1.0)
    for (auto& t : f.terms)
      if (t.slot != Slot::Production) scale_term(f.kind, t.coeffs, 1.0 / slope0);

  // peers with larger condition ranges can still push the idle value above
  // R; clamp the whole condition part so f(R, 0; R', ...) <= R exactly
  auto idle_top = [&] {
    double v = 0.0;
    for (auto& t : f.terms) {
      if (t.slot == Slot::Production) continue;
      double cap = t.slot == Slot::PrevCondition ? r_max : peer_r[t.peer];
      v += term_value_at(f.kind, t.coeffs, cap, false);
    }
    return v;
  };
  double top = idle_top();
  if (top > r_max)
    for (auto& t : f.terms)
      if (t.slot != Slot::Production) scale_term(f.kind, t.coeffs, r_max / top);

  // full-load production for one period costs between 10% and 45% of R
  double drop = term_value_at(f.kind, f.terms[1].coeffs, q_max, true);
  double target = rng.uniform(0.10, 0.45) * r_max;
  if (drop > 1e-9) scale_term(f.kind, f.terms[1].coeffs, target / drop);

  return f;
}

FuncSpec make_random_limit(Rng& rng, double r_max, double q_max,
                           std::vector<double>* out) {
  FuncSpec g;
  g.kind = draw_kind(rng);
  g.domain.prev_max = r_max;
  g.domain.production_max = 0.0;
  FuncTerm term{Slot::PrevCondition, -1, draw_term_coeffs(rng, g.kind, r_max, out)};
  if (g.kind == FuncKind::Polynomial) term.coeffs = reflect_polynomial(term.coeffs, r_max);
  g.terms.push_back(term);
  g.constant = rng.uniform(0.0, 0.15) * q_max;

  // scale so a pristine component supports most of its production range
  double at_top = term_value_at(g.kind, g.terms[0].coeffs, r_max, false);
  double target = rng.uniform(0.8, 1.1) * q_max - g.constant;
  if (at_top > 1e-9 && target > 0) scale_term(g.kind, g.terms[0].coeffs, target / at_top);
  return g;
}

void check_config(const GenConfig& cfg) {
  if (cfg.periods <= 0) throw ValidationError("gen: periods must be positive");
  if (!(cfg.rho > 0.0) || cfg.rho > 1.2)
    throw ValidationError("gen: rho must lie in (0, 1.2]");
  if (cfg.layout == Layout::Custom) {
    if (cfg.custom_multiplicities.empty())
      throw ValidationError("gen: custom layout without multiplicities");
    for (int m : cfg.custom_multiplicities)
      if (m < 1) throw ValidationError("gen: multiplicity must be >= 1");
  }
}

Instance generate(const GenConfig& cfg, std::vector<double>* out_coeff_draws) {
  check_config(cfg);
  Rng rng(cfg.seed);
  Instance inst;
  inst.periods = cfg.periods;

  std::vector<int> mults;
  switch (cfg.layout) {
    case Layout::OneGroup20:
      mults = {20};
      break;
    case Layout::TwoGroups10:
      mults = {10, 10};
      break;
    case Layout::Custom:
      mults = cfg.custom_multiplicities;
      break;
  }

  bool low = cfg.complexity == Complexity::Low;
  double dep_prob = low ? 0.10 : 0.15;
  for (int mult : mults) {
    MachineGroupSpec g;
    g.multiplicity = mult;
    int K = low ? rng.uniform_int(1, 3) : rng.uniform_int(3, 7);
    std::vector<double> r_max(K), q_max(K);
    for (int k = 0; k < K; ++k) {
      r_max[k] = rng.uniform(5.0, 15.0);
      q_max[k] = rng.uniform(5.0, 20.0);
    }
    for (int k = 0; k < K; ++k) {
      ComponentSpec c;
      c.cost = double(rng.uniform_int(1, 10));
      c.duration = rng.uniform_int(1, 2);
      c.max_condition = r_max[k];
      c.max_production = q_max[k];
      c.degradation = make_random_degradation(rng, r_max[k], q_max[k], r_max, dep_prob,
                                              out_coeff_draws);
      c.limit = make_random_limit(rng, r_max[k], q_max[k], out_coeff_draws);
      g.components.push_back(std::move(c));
    }
    for (int k = 0; k < K; ++k)
      for (int k2 = 0; k2 < K; ++k2) {
        if (k == k2) continue;
        if (rng.chance(dep_prob)) g.implications.push_back({k, k2});
      }
    inst.groups.push_back(std::move(g));
  }

  double capacity = 0.0;
  for (const auto& g : inst.groups) capacity += g.multiplicity * g.production_cap();
  inst.demand.resize(cfg.periods);
  for (int t = 0; t < cfg.periods; ++t)
    inst.demand[t] = cfg.rho * capacity * rng.uniform(0.6, 1.0);

  check_instance(inst);
  return inst;
}

Instance make_jit_counterexample() {
  auto linear_f = [](double slope_r, double decay_y, double R, double Q) {
    FuncSpec f;
    f.kind = FuncKind::Linear;
    f.terms.push_back({Slot::PrevCondition, -1, {slope_r}});
    f.terms.push_back({Slot::Production, -1, {decay_y}});
    f.domain.prev_max = R;
    f.domain.production_max = Q;
    return f;
  };
  auto identity_g = [](double R) {
    FuncSpec g;
    g.kind = FuncKind::Linear;
    g.terms.push_back({Slot::PrevCondition, -1, {1.0}});
    g.domain.prev_max = R;
    return g;
  };

  Instance inst;
  inst.periods = 11;
  // production periods 0, 3, 6, 9; the horizon ends one period after B fails
  inst.demand = {6, 0, 0, 6, 0, 0, 6, 0, 0, 6, 0};
  MachineGroupSpec g;
  g.multiplicity = 1;

  ComponentSpec a;  // fails after two full-load periods
  a.cost = 3.0;
  a.duration = 1;
  a.max_condition = 10.0;
  a.max_production = 10.0;
  a.degradation = linear_f(1.0, 0.3, 10.0, 10.0);
  a.limit = identity_g(10.0);

  ComponentSpec b = a;  // fails after three full-load periods
  b.cost = 5.0;
  b.degradation = linear_f(1.0, 0.2, 10.0, 10.0);

  g.components = {a, b};
  g.implications = {{1, 0}};  // maintaining B requires maintaining A
  inst.groups.push_back(g);
  check_instance(inst);
  return inst;
}

namespace {

// Maximal condition trajectory under a fixed plan; returns false when some
// period is infeasible (production above a cap or a forced-negative r).
bool simulate(const Instance& inst, const MachineGroupSpec& g, const MachinePlan& p,
              int* fail_period, int* fail_component) {
  const int T = inst.periods, K = g.num_components();
  std::vector<double> rp(K), r(K);
  for (int k = 0; k < K; ++k) rp[k] = g.components[k].max_condition;
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      const auto& c = g.components[k];
      if (p.x[k][t]) {
        r[k] = c.max_condition;
        continue;
      }
      std::vector<double> peers(c.degradation.domain.peer_max.size());
      for (std::size_t k2 = 0; k2 < peers.size(); ++k2) peers[k2] = rp[k2];
      double v = eval_func(c.degradation, rp[k], p.y[t], peers);
      if (v < -1e-9) {
        if (fail_period) *fail_period = t;
        if (fail_component) *fail_component = k;
        return false;
      }
      r[k] = std::min(v, c.max_condition);
    }
    for (int k = 0; k < K; ++k) {
      const auto& c = g.components[k];
      if (p.x[k][t] && p.y[t] > 1e-9) {
        if (fail_period) *fail_period = t;
        if (fail_component) *fail_component = k;
        return false;
      }
      double cap = eval_func(c.limit, r[k], 0.0, {});
      if (p.y[t] > cap + 1e-9) {
        if (fail_period) *fail_period = t;
        if (fail_component) *fail_component = k;
        return false;
      }
    }
    rp = r;
  }
  return true;
}

void fill_conditions(const Instance& inst, const MachineGroupSpec& g, MachinePlan& p) {
  const int T = inst.periods, K = g.num_components();
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) {
      const auto& c = g.components[k];
      if (p.x[k][t]) {
        p.r[k][t] = c.max_condition;
        continue;
      }
      double prev = t == 0 ? c.max_condition : p.r[k][t - 1];
      std::vector<double> peers(c.degradation.domain.peer_max.size());
      for (std::size_t k2 = 0; k2 < peers.size(); ++k2)
        peers[k2] = t == 0 ? g.components[k2].max_condition : p.r[k2][t - 1];
      p.r[k][t] = std::clamp(eval_func(c.degradation, prev, p.y[t], peers), 0.0,
                             c.max_condition);
    }
}

// transitive closure of maintenance implications starting from k
std::vector<int> implied_set(const MachineGroupSpec& g, int k) {
  std::vector<int> out = {k};
  std::vector<char> seen(g.components.size(), 0);
  seen[k] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto [from, to] : g.implications)
      if (from == out[i] && !seen[to]) {
        seen[to] = 1;
        out.push_back(to);
      }
  return out;
}

}  // namespace

std::optional<Schedule> jit_maintenance_heuristic(const Instance& inst) {
  check_instance(inst);
  const int T = inst.periods;
  const int M = inst.num_machines();

  // production fixed proportional to capacity share
  double total_cap = 0.0;
  for (const auto& g : inst.groups) total_cap += g.multiplicity * g.production_cap();
  if (total_cap <= 0) return std::nullopt;

  Schedule s;
  for (int m = 0; m < M; ++m) {
    const auto& g = inst.groups[machine_group(inst, m)];
    MachinePlan p;
    p.x.assign(g.num_components(), std::vector<char>(T, 0));
    p.y.assign(T, 0.0);
    p.r.assign(g.num_components(), std::vector<double>(T, 0.0));
    double share = g.production_cap() / total_cap;
    for (int t = 0; t < T; ++t) p.y[t] = inst.demand[t] * share;
    s.machines.push_back(std::move(p));
  }

  for (int m = 0; m < M; ++m) {
    const auto& g = inst.groups[machine_group(inst, m)];
    MachinePlan& p = s.machines[m];
    for (int t = 0; t < T; ++t) {
      // keep scheduling at t while some future period needs it now
      for (int guard = 0; guard < 4 * g.num_components(); ++guard) {
        int fail_t = -1, fail_k = -1;
        if (simulate(inst, g, p, &fail_t, &fail_k)) break;
        if (fail_t <= t) return std::nullopt;  // failure is no longer fixable
        const int D = g.components[fail_k].duration;
        // latest start whose spell ends before the failing period and whose
        // downtime does not collide with planned production
        int latest = -1;
        for (int st = fail_t - D - 1; st >= t; --st) {
          bool quiet = true;
          for (int i = st; i <= st + D && i < T; ++i)
            if (s.machines[m].y[i] > 1e-9) quiet = false;
          if (quiet) {
            latest = st;
            break;
          }
        }
        if (latest < 0) return std::nullopt;
        if (latest > t) break;  // just in time means waiting
        for (int comp : implied_set(g, fail_k))
          for (int i = latest; i <= latest + g.components[comp].duration && i < T; ++i)
            p.x[comp][i] = 1;
      }
    }
    int fail_t = -1, fail_k = -1;
    if (!simulate(inst, g, p, &fail_t, &fail_k)) return std::nullopt;
    fill_conditions(inst, g, p);
  }

  // the fixed proportional plan must cover demand
  auto violations = validate_schedule(inst, s);
  if (!violations.empty()) return std::nullopt;
  return s;
}

}  // namespace psched
