#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "psched/minlp.hpp"
#include "psched/pricing.hpp"
#include "psched/rng.hpp"
#include "test_util.hpp"

using namespace psched;
using namespace psched::testing;

TEST_CASE("fixed binaries and linear rows degenerate to the lp") {
  ConvexMinlp m;
  m.linear.add_var(0, 10, 1.0);
  m.linear.add_var(1, 1, 0.0);  // binary fixed by bounds
  m.linear.add_row({{0, 1.0}, {1, 1.0}}, 'G', 4.0);
  m.integer_vars.push_back(1);
  MinlpResult r = solve_minlp(m, {});
  REQUIRE(r.status == MinlpStatus::Optimal);
  CHECK(r.primal == doctest::Approx(3.0));
  LpSolution lp = solve_lp(m.linear);
  CHECK(lp.objective == doctest::Approx(r.primal));
  CHECK(r.nodes == 1);
}

TEST_CASE("single fractional binary forces one branching") {
  // min x with x >= 0.5 in the relaxation; branching fixes x = 1
  ConvexMinlp m;
  m.linear.add_var(0, 1, 1.0);
  m.linear.add_row({{0, 1.0}}, 'G', 0.5);
  m.integer_vars.push_back(0);
  MinlpResult r = solve_minlp(m, {});
  REQUIRE(r.status == MinlpStatus::Optimal);
  CHECK(r.primal == doctest::Approx(1.0));
  CHECK(r.incumbent[0] == doctest::Approx(1.0));
  CHECK(r.nodes >= 2);
}

TEST_CASE("oa cut of a linear function reproduces the row") {
  // r <= 2 + 0.5 rp - 0.25 y  becomes exactly that inequality
  FuncSpec f = linear_func(2.0, 0.5, 0.25, 10.0, 10.0);
  NonlinearRow row;
  row.target = 0;  // r
  row.f = f;
  row.prev = MinlpArg::of_var(1);
  row.production = MinlpArg::of_var(2);
  LpProblem lp;
  lp.add_var(0, 10, 0);
  lp.add_var(0, 10, 0);
  lp.add_var(0, 10, 0);
  add_oa_cut(lp, row, {0.0, 4.0, 8.0});
  REQUIRE(lp.rows.size() == 1);
  // r - 0.5 rp + 0.25 y <= 2
  double c_r = 0, c_rp = 0, c_y = 0;
  for (auto [j, a] : lp.rows[0].coeffs) {
    if (j == 0) c_r = a;
    if (j == 1) c_rp = a;
    if (j == 2) c_y = a;
  }
  CHECK(c_r == doctest::Approx(1.0));
  CHECK(c_rp == doctest::Approx(-0.5));
  CHECK(c_y == doctest::Approx(0.25));
  CHECK(lp.rows[0].rhs == doctest::Approx(2.0));
}

TEST_CASE("oa cut of a concave quadratic is the tangent") {
  // f(y) = 4 - y^2 at y = 1: r <= 3 - 2(y - 1) = 5 - 2y
  FuncSpec f;
  f.kind = FuncKind::Polynomial;
  f.constant = 4.0;
  f.terms.push_back({Slot::Production, -1, {0.0, 1.0}});  // subtracted y^2
  f.domain.production_max = 2.0;
  NonlinearRow row;
  row.target = 0;
  row.f = f;
  row.prev = MinlpArg::of_const(0.0);
  row.production = MinlpArg::of_var(1);
  LpProblem lp;
  lp.add_var(0, 10, 0);
  lp.add_var(0, 2, 0);
  add_oa_cut(lp, row, {0.0, 1.0});
  double c_r = 0, c_y = 0;
  for (auto [j, a] : lp.rows[0].coeffs) {
    if (j == 0) c_r = a;
    if (j == 1) c_y = a;
  }
  CHECK(c_r == doctest::Approx(1.0));
  CHECK(c_y == doctest::Approx(2.0));
  CHECK(lp.rows[0].rhs == doctest::Approx(5.0));
}

TEST_CASE("random concave cuts are valid at random feasible points") {
  Rng rng(555);
  for (int rep = 0; rep < 20; ++rep) {
    double R = rng.uniform(4, 12), Q = rng.uniform(4, 12);
    std::vector<double> peers = {rng.uniform(4, 12)};
    FuncSpec f = make_random_degradation(rng, R, Q, peers, 1.0, nullptr);
    NonlinearRow row;
    row.target = 0;
    row.f = f;
    row.prev = MinlpArg::of_var(1);
    row.production = MinlpArg::of_var(2);
    row.peers = {MinlpArg::of_var(3)};
    LpProblem lp;
    lp.add_var(0, R, 0);
    lp.add_var(0, R, 0);
    lp.add_var(0, Q, 0);
    lp.add_var(0, peers[0], 0);
    std::vector<double> point = {0.0, rng.uniform(0, R), rng.uniform(0, Q),
                                 rng.uniform(0, peers[0])};
    add_oa_cut(lp, row, point);
    const LpRow& cut = lp.rows.back();
    for (int s = 0; s < 100; ++s) {
      std::vector<double> p = {0.0, rng.uniform(0, R), rng.uniform(0, Q),
                               rng.uniform(0, peers[0])};
      p[0] = eval_func(f, p[1], p[2], {p[3]});  // feasible boundary point
      double lhs = 0;
      for (auto [j, a] : cut.coeffs) lhs += a * p[j];
      CHECK(lhs <= cut.rhs + 1e-9);
    }
  }
}

TEST_CASE("oa converges on a pure continuous concave instance") {
  // maximize y s.t. y <= g(r) = 10(1 - 2^(-0.3 r)), r <= 8: nonlinear cap
  FuncSpec g;
  g.kind = FuncKind::Exponential;
  g.terms.push_back({Slot::PrevCondition, -1, {10.0, 0.3}});
  g.domain.prev_max = 8.0;
  ConvexMinlp m;
  m.linear.add_var(0, 20, -1.0);  // y
  m.linear.add_var(0, 8, 0.0);    // r
  NonlinearRow row;
  row.target = 0;
  row.f = g;
  row.prev = MinlpArg::of_var(1);
  row.production = MinlpArg::of_const(0.0);
  m.nonlinear.push_back(row);
  MinlpResult r = solve_minlp(m, {});
  REQUIRE(r.status == MinlpStatus::Optimal);
  double expect = 10.0 * (1.0 - std::exp2(-0.3 * 8.0));
  CHECK(r.primal == doctest::Approx(-expect).epsilon(1e-6));
  // the converged point satisfies the true constraint
  CHECK(nonlinear_violation(row, r.incumbent) <= 1e-6);
}

namespace {

// one-component three-period pricing model built through build_pricing
Instance tiny_pricing_instance() {
  Instance inst;
  inst.periods = 3;
  inst.demand = {5.0, 5.0, 5.0};
  MachineGroupSpec g;
  g.multiplicity = 1;
  g.components.push_back(linear_component(4.0, 1, 10.0, 8.0, 0.9));
  inst.groups.push_back(g);
  return inst;
}

}  // namespace

TEST_CASE("pricing minlp matches the pattern-and-grid enumeration oracle") {
  Instance inst = tiny_pricing_instance();
  DualBundle duals;
  duals.pi = {1.1, 0.2, 0.9};
  duals.theta = {-0.5};
  PricingProblem p = build_pricing(inst, 0, duals, {});
  MinlpResult r = solve_minlp(p.model, {});
  REQUIRE(r.status == MinlpStatus::Optimal);
  double oracle = pricing_oracle_min_rc(inst, 0, duals, 1000);
  // the grid understates the best revenue, so oracle >= exact optimum
  CHECK(r.primal <= oracle + 1e-9);
  double slack = (duals.pi[0] + duals.pi[1] + duals.pi[2]) * 8.0 / 1000 * 3;
  CHECK(r.primal >= oracle - slack);
}

TEST_CASE("premature node-limit stops keep the dual bound valid") {
  Instance inst = tiny_pricing_instance();
  DualBundle duals;
  duals.pi = {2.0, 2.0, 2.0};
  duals.theta = {0.0};
  PricingProblem p = build_pricing(inst, 0, duals, {});
  double exact = solve_minlp(p.model, {}).primal;
  for (long nodes : {1L, 2L, 3L, 5L, 8L}) {
    MinlpLimits lim;
    lim.nodes = nodes;
    MinlpResult r = solve_minlp(p.model, lim);
    CHECK(r.dual <= exact + 1e-9);
    if (!r.incumbent.empty()) CHECK(r.primal >= exact - 1e-9);
  }
}

TEST_CASE("objective cutoff never invalidates the dual bound") {
  Instance inst = tiny_pricing_instance();
  DualBundle duals;
  duals.pi = {2.0, 2.0, 2.0};
  duals.theta = {0.0};
  PricingProblem p = build_pricing(inst, 0, duals, {});
  double exact = solve_minlp(p.model, {}).primal;
  MinlpResult cut = solve_minlp(p.model, {}, exact);  // optimum as cutoff
  CHECK(cut.dual <= exact + 1e-9);
  MinlpResult loose = solve_minlp(p.model, {}, exact + 10.0);
  CHECK(loose.dual <= exact + 1e-9);
  CHECK(loose.primal == doctest::Approx(exact));
}

TEST_CASE("block toy problem: integer optimum is 8 at (0,2,1,1)") {
  ConvexMinlp m;
  m.linear.add_var(0, 2, 1);
  m.linear.add_var(0, 2, 2);
  m.linear.add_var(0, 2, 1);
  m.linear.add_var(0, 2, 3);
  m.linear.add_row({{0, 1}, {1, 1}, {2, 1}, {3, 1}}, 'G', 4);
  m.linear.add_row({{0, 3}, {1, 1}}, 'L', 3);
  m.linear.add_row({{2, 2}, {3, 1}}, 'L', 3);
  for (int j = 0; j < 4; ++j) m.integer_vars.push_back(j);

  // independent check: enumerate {0,1,2}^4
  double best = kInf;
  int best_pt[4] = {0, 0, 0, 0};
  for (int v1 = 0; v1 <= 2; ++v1)
    for (int v2 = 0; v2 <= 2; ++v2)
      for (int w1 = 0; w1 <= 2; ++w1)
        for (int w2 = 0; w2 <= 2; ++w2) {
          if (v1 + v2 + w1 + w2 < 4) continue;
          if (3 * v1 + v2 > 3) continue;
          if (2 * w1 + w2 > 3) continue;
          double c = v1 + 2 * v2 + w1 + 3 * w2;
          if (c < best) {
            best = c;
            best_pt[0] = v1;
            best_pt[1] = v2;
            best_pt[2] = w1;
            best_pt[3] = w2;
          }
        }
  CHECK(best == doctest::Approx(8.0));
  CHECK(best_pt[0] == 0);
  CHECK(best_pt[1] == 2);
  CHECK(best_pt[2] == 1);
  CHECK(best_pt[3] == 1);

  MinlpResult r = solve_minlp(m, {});
  REQUIRE(r.status == MinlpStatus::Optimal);
  CHECK(r.primal == doctest::Approx(8.0));
}

TEST_CASE("general integer variables branch on bound splits") {
  // min 3a + 2b, a + b >= 5, a in {0..3}, b in {0..4}, lp optimum fractional-free
  ConvexMinlp m;
  m.linear.add_var(0, 3, 3);
  m.linear.add_var(0, 4, 2);
  m.linear.add_row({{0, 1}, {1, 0.8}}, 'G', 4.0);  // forces a mix
  m.integer_vars = {0, 1};
  MinlpResult r = solve_minlp(m, {});
  REQUIRE(r.status == MinlpStatus::Optimal);
  // enumerate
  double best = kInf;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 4; ++b)
      if (a + 0.8 * b >= 4.0) best = std::min(best, 3.0 * a + 2.0 * b);
  CHECK(r.primal == doctest::Approx(best));
}

TEST_CASE("infeasible integer model reports infeasible") {
  ConvexMinlp m;
  m.linear.add_var(0, 1, 1);
  m.linear.add_row({{0, 1.0}}, 'G', 2.0);
  m.integer_vars = {0};
  MinlpResult r = solve_minlp(m, {});
  CHECK(r.status == MinlpStatus::Infeasible);
}
