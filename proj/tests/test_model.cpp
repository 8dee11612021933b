#include <doctest.h>

#include <cmath>

#include "psched/instance.hpp"
#include "psched/json_io.hpp"
#include "psched/rng.hpp"

using namespace psched;

namespace {

FuncSpec linear_f(double constant, double a_prev, double b_prod, double prev_max,
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

FuncSpec identity_limit(double r_max) {
  FuncSpec g;
  g.kind = FuncKind::Linear;
  g.constant = 0.0;
  g.terms.push_back({Slot::PrevCondition, -1, {1.0}});
  g.domain.prev_max = r_max;
  return g;
}

ComponentSpec simple_component(double cost, int duration, double R, double Q,
                               double decay_per_unit) {
  ComponentSpec c;
  c.cost = cost;
  c.duration = duration;
  c.max_condition = R;
  c.max_production = Q;
  c.degradation = linear_f(0.0, 1.0, decay_per_unit, R, Q);
  c.limit = identity_limit(R);
  return c;
}

Instance one_machine_instance() {
  Instance inst;
  inst.periods = 3;
  inst.demand = {0.0, 0.0, 0.0};
  MachineGroupSpec g;
  g.multiplicity = 1;
  g.components.push_back(simple_component(2.0, 1, 10.0, 8.0, 0.25));
  inst.groups.push_back(g);
  return inst;
}

// Central finite differences, the independent check for grad_func.
double fd_partial(const FuncSpec& f, FuncPoint p, int coord, double h) {
  auto shift = [&](double s) {
    FuncPoint q = p;
    if (coord == 0)
      q.prev += s;
    else if (coord == 1)
      q.production += s;
    else
      q.peers[coord - 2] += s;
    return eval_func(f, q.prev, q.production, q.peers);
  };
  return (shift(h) - shift(-h)) / (2 * h);
}

}  // namespace

TEST_CASE("eval_func worked examples") {
  // f(u) = 2 + 0.5*u_prev - 0.25*y at (4, 8) -> 2
  FuncSpec f = linear_f(2.0, 0.5, 0.25, 10.0, 10.0);
  CHECK(eval_func(f, 4.0, 8.0, {}) == doctest::Approx(2.0));

  // zero constant, zero point
  FuncSpec z = linear_f(0.0, 0.7, 0.3, 5.0, 5.0);
  CHECK(eval_func(z, 0.0, 0.0, {}) == doctest::Approx(0.0));

  // saturating exponential a*(1 - 2^(-c u)) with a=3, c=1 at u=1 -> 1.5
  FuncSpec e;
  e.kind = FuncKind::Exponential;
  e.terms.push_back({Slot::PrevCondition, -1, {3.0, 1.0}});
  e.domain.prev_max = 4.0;
  CHECK(eval_func(e, 1.0, 0.0, {}) == doctest::Approx(1.5));
}

TEST_CASE("eval_func clamps to the box") {
  FuncSpec f = linear_f(0.0, 1.0, 1.0, 10.0, 5.0);
  // production 9 clamps to 5, prev 12 clamps to 10
  CHECK(eval_func(f, 12.0, 9.0, {}) == doctest::Approx(10.0 - 5.0));
  // negative inputs clamp to 0
  CHECK(eval_func(f, -3.0, -1.0, {}) == doctest::Approx(0.0));
}

TEST_CASE("eval_func rejects malformed specs") {
  FuncSpec f;
  f.kind = FuncKind::Linear;
  CHECK_THROWS_AS(eval_func(f, 0, 0, {}), ValidationError);  // empty terms
  f.terms.push_back({Slot::PrevCondition, -1, {1.0, 2.0}});
  CHECK_THROWS_AS(eval_func(f, 0, 0, {}), ValidationError);  // bad arity
  FuncSpec p;
  p.kind = FuncKind::Polynomial;
  p.terms.push_back({Slot::PeerCondition, 3, {1.0}});
  p.domain.peer_max = {1.0};
  CHECK_THROWS_AS(eval_func(p, 0, 0, {0.0}), ValidationError);  // peer out of range
}

TEST_CASE("grad_func worked examples") {
  FuncSpec f = linear_f(2.0, 0.5, 0.25, 10.0, 10.0);
  auto g = grad_func(f, {4.0, 8.0, {}});
  CHECK(g[0] == doctest::Approx(0.5));
  CHECK(g[1] == doctest::Approx(-0.25));

  // polynomial c*u^2 with c = -0.1 at u = 3 -> -0.6
  FuncSpec p;
  p.kind = FuncKind::Polynomial;
  p.terms.push_back({Slot::PrevCondition, -1, {0.0, -0.1}});
  p.domain.prev_max = 5.0;
  CHECK(grad_func(p, {3.0, 0.0, {}})[0] == doctest::Approx(-0.6));

  // exponential a*(1 - 2^(-c u)) at u = 0 -> a*c*ln2, checked by differences
  FuncSpec e;
  e.kind = FuncKind::Exponential;
  e.terms.push_back({Slot::PrevCondition, -1, {3.0, 0.8}});
  e.domain.prev_max = 4.0;
  double analytic = grad_func(e, {1.0, 0.0, {}})[0];
  CHECK(analytic == doctest::Approx(fd_partial(e, {1.0, 0.0, {}}, 0, 1e-6)).epsilon(1e-5));
  CHECK(grad_func(e, {0.0, 0.0, {}})[0] == doctest::Approx(3.0 * 0.8 * std::log(2.0)));
}

TEST_CASE("grad_func matches central finite differences at random interior points") {
  Rng rng(991);
  for (int rep = 0; rep < 100; ++rep) {
    FuncSpec f;
    int kind = rng.uniform_int(0, 2);
    f.kind = kind == 0 ? FuncKind::Linear : kind == 1 ? FuncKind::Polynomial : FuncKind::Exponential;
    f.constant = rng.uniform(0, 2);
    f.domain.prev_max = rng.uniform(4, 12);
    f.domain.production_max = rng.uniform(4, 12);
    f.domain.peer_max = {rng.uniform(4, 12)};
    auto coeffs = [&](Slot) {
      switch (f.kind) {
        case FuncKind::Linear:
          return std::vector<double>{rng.uniform(0, 3)};
        case FuncKind::Polynomial:
          return std::vector<double>{rng.uniform(0, 1), rng.uniform(0, 0.1),
                                     rng.uniform(0, 0.01)};
        default:
          return std::vector<double>{rng.uniform(0.2, 3), rng.uniform(0.05, 0.5)};
      }
    };
    f.terms.push_back({Slot::PrevCondition, -1, coeffs(Slot::PrevCondition)});
    f.terms.push_back({Slot::Production, -1, coeffs(Slot::Production)});
    f.terms.push_back({Slot::PeerCondition, 0, coeffs(Slot::PeerCondition)});

    // interior point (margin keeps central differences inside the box)
    FuncPoint pt;
    pt.prev = rng.uniform(0.1, f.domain.prev_max - 0.1);
    pt.production = rng.uniform(0.1, f.domain.production_max - 0.1);
    pt.peers = {rng.uniform(0.1, f.domain.peer_max[0] - 0.1)};
    auto g = grad_func(f, pt);
    for (int c = 0; c < 3; ++c) {
      double fd = fd_partial(f, pt, c, 1e-6);
      double scale = std::max(1.0, std::fabs(fd));
      CHECK(std::fabs(g[c] - fd) / scale < 1e-5);
    }
  }
}

TEST_CASE("big_m worked examples") {
  // f == R (no degradation): constant R, so f(0,Q) = R >= 0 and M = R
  FuncSpec fr;
  fr.kind = FuncKind::Linear;
  fr.constant = 5.0;
  fr.terms.push_back({Slot::PrevCondition, -1, {0.0}});
  fr.domain.prev_max = 5.0;
  fr.domain.production_max = 7.0;
  ComponentSpec c;
  c.cost = 1;
  c.duration = 1;
  c.max_condition = 5.0;
  c.max_production = 7.0;
  c.degradation = fr;
  c.limit = identity_limit(5.0);
  CHECK(big_m(c) == doctest::Approx(5.0));

  // f(0,Q) = -2 with R = 5 -> M = 7
  c.degradation = linear_f(0.0, 1.0, 0.25, 5.0, 8.0);
  c.max_production = 8.0;
  c.degradation.domain.production_max = 8.0;
  CHECK(eval_func(c.degradation, 0, 8, {}) == doctest::Approx(-2.0));
  CHECK(big_m(c) == doctest::Approx(7.0));
}

TEST_CASE("big_m dominates the degradation bound over a grid of the box") {
  Rng rng(1234);
  for (int rep = 0; rep < 20; ++rep) {
    ComponentSpec c = simple_component(1.0, 1, rng.uniform(3, 12), rng.uniform(3, 12),
                                       rng.uniform(0, 2));
    c.degradation.constant = rng.uniform(0, 1);
    double M = big_m(c);
    for (int i = 0; i <= 50; ++i)
      for (int j = 0; j <= 50; ++j) {
        double rp = c.max_condition * i / 50.0;
        double y = c.max_production * j / 50.0;
        CHECK(eval_func(c.degradation, rp, y, {}) + M >= c.max_condition - 1e-9);
      }
  }
}

TEST_CASE("concavity and monotonicity certificates accept canonical forms") {
  FuncSpec f;
  f.kind = FuncKind::Exponential;
  f.constant = 0.5;
  f.terms.push_back({Slot::PrevCondition, -1, {2.0, 0.4}});
  f.terms.push_back({Slot::Production, -1, {1.0, 0.2}});
  f.domain.prev_max = 8.0;
  f.domain.production_max = 6.0;
  CHECK(is_concave_on_box(f, 100, 7));
  CHECK(is_monotone_on_box(f, 100, 7));

  // convex bump in a condition slot must be rejected
  FuncSpec bad;
  bad.kind = FuncKind::Polynomial;
  bad.terms.push_back({Slot::PrevCondition, -1, {0.0, 1.0}});
  bad.domain.prev_max = 4.0;
  CHECK_FALSE(is_concave_on_box(bad, 100, 7));
}

TEST_CASE("validate_schedule accepts an idle machine against zero demand") {
  Instance inst = one_machine_instance();
  Schedule s;
  s.machines.push_back(idle_plan(inst, 0));
  CHECK(validate_schedule(inst, s).empty());
}

TEST_CASE("validate_schedule flags constructed violations") {
  Instance inst = one_machine_instance();
  inst.demand = {4.0, 0.0, 0.0};
  Schedule s;
  s.machines.push_back(idle_plan(inst, 0));

  SUBCASE("demand shortfall") {
    auto v = validate_schedule(inst, s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].family == "demand");
    CHECK(v[0].period == 0);
    CHECK(v[0].residual == doctest::Approx(4.0));
  }

  SUBCASE("production during maintenance") {
    auto& p = s.machines[0];
    p.y[0] = 4.0;
    p.x[0][0] = 1;
    p.x[0][1] = 1;  // duration D=1 forces the follow-up period
    // condition stays maximal thanks to the big-M lift
    p.r[0][0] = 10.0;
    p.r[0][1] = 10.0;
    p.r[0][2] = 10.0;
    auto v = validate_schedule(inst, s);
    bool downtime = false;
    for (auto& viol : v) downtime |= viol.family == "downtime";
    CHECK(downtime);
  }

  SUBCASE("broken duration") {
    auto& p = s.machines[0];
    inst.demand = {0, 0, 0};
    p.x[0][0] = 1;  // start, but no follow-up period
    p.r[0][0] = 10.0;
    p.r[0][1] = 10.0;
    p.r[0][2] = 10.0;
    auto v = validate_schedule(inst, s);
    bool duration = false;
    for (auto& viol : v) duration |= viol.family == "duration";
    CHECK(duration);
  }

  SUBCASE("degradation overshoot") {
    auto& p = s.machines[0];
    inst.demand = {0, 0, 0};
    p.r[0][2] = 10.0;  // idle trajectory keeps r at 10 here, still fine
    p.y[2] = 0.0;
    p.r[0][1] = 3.0;
    // r jumps back up without maintenance: bound is f(3, 0) = 3
    auto v = validate_schedule(inst, s);
    bool degr = false;
    for (auto& viol : v) degr |= viol.family == "degradation";
    CHECK(degr);
  }
}

TEST_CASE("instance json round trip and strictness") {
  Instance inst = one_machine_instance();
  inst.groups[0].implications.push_back({0, 0});  // invalid: self-implication
  CHECK_THROWS_AS(check_instance(inst), ValidationError);
  inst.groups[0].implications.clear();

  std::string doc = instance_to_json(inst);
  Instance back = instance_from_json(doc);
  CHECK(back.periods == inst.periods);
  CHECK(instance_to_json(back) == doc);

  // unknown fields rejected
  std::string corrupted = doc;
  corrupted.insert(corrupted.find("\"periods\""), "\"bogus\": 1, ");
  CHECK_THROWS_AS(instance_from_json(corrupted), ValidationError);
}

TEST_CASE("schedule json round trip") {
  Instance inst = one_machine_instance();
  Schedule s;
  s.machines.push_back(idle_plan(inst, 0));
  Schedule back = schedule_from_json(schedule_to_json(s));
  REQUIRE(back.machines.size() == 1);
  CHECK(back.machines[0].y == s.machines[0].y);
  CHECK(back.machines[0].r == s.machines[0].r);
}
