#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "psched/rng.hpp"
#include "psched/simplex.hpp"

using namespace psched;

namespace {

// Independent oracle: enumerate all basic points (intersections of n active
// constraints chosen from rows-as-equalities and bound hyperplanes), keep the
// feasible ones, return the best objective.  Exponential, test-only.
struct VertexOracle {
  const LpProblem& p;
  explicit VertexOracle(const LpProblem& prob) : p(prob) {}

  bool solve_square(std::vector<std::vector<double>> A, std::vector<double> b,
                    std::vector<double>& x) const {
    int n = static_cast<int>(b.size());
    x.assign(n, 0.0);
    for (int c = 0; c < n; ++c) {
      int piv = -1;
      double best = 1e-9;
      for (int r = c; r < n; ++r)
        if (std::fabs(A[r][c]) > best) {
          best = std::fabs(A[r][c]);
          piv = r;
        }
      if (piv < 0) return false;
      std::swap(A[piv], A[c]);
      std::swap(b[piv], b[c]);
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        double f = A[r][c] / A[c][c];
        for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
        b[r] -= f * b[c];
      }
    }
    for (int i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return true;
  }

  bool feasible(const std::vector<double>& x) const {
    for (int j = 0; j < p.num_vars(); ++j)
      if (x[j] < p.lower[j] - 1e-7 || x[j] > p.upper[j] + 1e-7) return false;
    for (const auto& row : p.rows) {
      double v = 0;
      for (auto [j, a] : row.coeffs) v += a * x[j];
      if (row.rel == 'L' && v > row.rhs + 1e-7) return false;
      if (row.rel == 'G' && v < row.rhs - 1e-7) return false;
      if (row.rel == 'E' && std::fabs(v - row.rhs) > 1e-7) return false;
    }
    return true;
  }

  // returns +inf when no feasible vertex exists
  double best_value() const {
    int n = p.num_vars();
    // candidate hyperplanes: each row as equality, each finite bound
    std::vector<std::pair<std::vector<double>, double>> planes;
    for (const auto& row : p.rows) {
      std::vector<double> a(n, 0.0);
      for (auto [j, c] : row.coeffs) a[j] += c;
      planes.push_back({a, row.rhs});
    }
    for (int j = 0; j < n; ++j) {
      std::vector<double> a(n, 0.0);
      a[j] = 1.0;
      if (std::isfinite(p.lower[j])) planes.push_back({a, p.lower[j]});
      if (std::isfinite(p.upper[j])) planes.push_back({a, p.upper[j]});
    }
    int np = static_cast<int>(planes.size());
    double best = kInf;
    std::vector<int> idx(n);
    std::vector<bool> sel(np, false);
    // iterate all n-subsets
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == n) {
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (int i = 0; i < n; ++i) {
          A.push_back(planes[idx[i]].first);
          b.push_back(planes[idx[i]].second);
        }
        std::vector<double> x;
        if (!solve_square(A, b, x)) return;
        if (!feasible(x)) return;
        double v = p.objective_constant;
        for (int j = 0; j < n; ++j) v += p.objective[j] * x[j];
        best = std::min(best, v);
        return;
      }
      for (int i = start; i < np; ++i) {
        idx[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
    return best;
  }
};

// Dual objective for a bounded-variable LP, used for strong-duality checks.
double dual_objective(const LpProblem& p, const LpSolution& s) {
  double v = 0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) v += s.row_duals[i] * p.rows[i].rhs;
  for (int j = 0; j < p.num_vars(); ++j) {
    double d = p.objective[j];
    for (std::size_t i = 0; i < p.rows.size(); ++i)
      for (auto [jj, a] : p.rows[i].coeffs)
        if (jj == j) d -= s.row_duals[i] * a;
    if (d > 1e-9 && std::isfinite(p.lower[j])) v += d * p.lower[j];
    if (d < -1e-9 && std::isfinite(p.upper[j])) v += d * p.upper[j];
  }
  return v + p.objective_constant;
}

// Farkas certificate check: the ray-weighted row aggregate must admit no
// solution inside the variable box; returns the positive margin.
double farkas_margin(const LpProblem& p, const std::vector<double>& ray) {
  REQUIRE(ray.size() == p.rows.size());
  double rhs = 0.0;
  std::vector<double> kappa(p.num_vars(), 0.0);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    if (p.rows[i].rel == 'G') CHECK(ray[i] >= -1e-7);
    if (p.rows[i].rel == 'L') CHECK(ray[i] <= 1e-7);
    rhs += ray[i] * p.rows[i].rhs;
    for (auto [j, a] : p.rows[i].coeffs) kappa[j] += ray[i] * a;
  }
  double sup = 0.0;
  for (int j = 0; j < p.num_vars(); ++j) {
    if (kappa[j] > 0)
      sup += kappa[j] * p.upper[j];
    else if (kappa[j] < 0)
      sup += kappa[j] * p.lower[j];
  }
  return rhs - sup;  // > 0 means the implied inequality is contradictory
}

LpProblem example21_relaxation() {
  LpProblem p;
  p.add_var(0, 2, 1);  // v1
  p.add_var(0, 2, 2);  // v2
  p.add_var(0, 2, 1);  // w1
  p.add_var(0, 2, 3);  // w2
  p.add_row({{0, 1}, {1, 1}, {2, 1}, {3, 1}}, 'G', 4);
  p.add_row({{0, 3}, {1, 1}}, 'L', 3);
  p.add_row({{2, 2}, {3, 1}}, 'L', 3);
  return p;
}

}  // namespace

TEST_CASE("single-constraint lp") {
  LpProblem p;
  p.add_var(0, 10, 1);
  p.add_row({{0, 1.0}}, 'G', 3.0);
  LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.primal[0] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.row_duals[0] == doctest::Approx(1.0));
}

TEST_CASE("toy block lp matches the vertex enumeration oracle") {
  LpProblem p = example21_relaxation();
  double oracle = VertexOracle(p).best_value();
  LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(s.objective == doctest::Approx(dual_objective(p, s)).epsilon(1e-6));
}

TEST_CASE("contradictory bounds produce a farkas certificate") {
  LpProblem p;
  p.add_var(0, 10, 0);
  p.add_row({{0, 1.0}}, 'G', 2.0);
  p.add_row({{0, 1.0}}, 'L', 1.0);
  LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Infeasible);
  REQUIRE(s.farkas_ray.size() == 2);
  CHECK(farkas_margin(p, s.farkas_ray) > 1e-9);
}

TEST_CASE("equality rows and free-ish variables") {
  LpProblem p;
  p.add_var(0, kInf, 2);
  p.add_var(0, kInf, 3);
  p.add_row({{0, 1}, {1, 1}}, 'E', 4);
  p.add_row({{0, 1}, {1, -1}}, 'L', 2);
  LpSolution s = solve_lp(p);
  REQUIRE(s.status == LpStatus::Optimal);
  // cheapest split with x0 - x1 <= 2: x0 = 3, x1 = 1
  CHECK(s.primal[0] == doctest::Approx(3.0));
  CHECK(s.primal[1] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(9.0));
}

TEST_CASE("unbounded detection") {
  LpProblem p;
  p.add_var(0, kInf, -1);
  p.add_row({{0, -1.0}}, 'L', 0.0);
  LpSolution s = solve_lp(p);
  CHECK(s.status == LpStatus::Unbounded);
}

TEST_CASE("beale cycling example terminates at the optimum") {
  // min -0.75 x1 + 150 x2 - 0.02 x3 + 6 x4
  LpProblem p;
  p.add_var(0, kInf, -0.75);
  p.add_var(0, kInf, 150);
  p.add_var(0, kInf, -0.02);
  p.add_var(0, kInf, 6);
  p.add_row({{0, 0.25}, {1, -60}, {2, -0.04}, {3, 9}}, 'L', 0);
  p.add_row({{0, 0.5}, {1, -90}, {2, -0.02}, {3, 3}}, 'L', 0);
  p.add_row({{2, 1.0}}, 'L', 1);
  LpSolution s = solve_lp(p, 100000);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-0.05));
}

TEST_CASE("marshall-suurballe cycling example terminates") {
  LpProblem p;
  p.add_var(0, kInf, -2);
  p.add_var(0, kInf, -3);
  p.add_var(0, kInf, 1);
  p.add_var(0, kInf, 12);
  p.add_row({{0, -2}, {1, -9}, {2, 1}, {3, 9}}, 'L', 0);
  p.add_row({{0, 1.0 / 3.0}, {1, 1}, {2, -1.0 / 3.0}, {3, -2}}, 'L', 0);
  LpSolution s = solve_lp(p, 100000);
  CHECK(s.status == LpStatus::Unbounded);
}

TEST_CASE("strong duality and complementary slackness on random lps") {
  Rng rng(4242);
  int optimal_seen = 0;
  for (int rep = 0; rep < 200; ++rep) {
    int n = rng.uniform_int(2, 6), m = rng.uniform_int(1, 5);
    LpProblem p;
    for (int j = 0; j < n; ++j) {
      double lo = rng.uniform(-3, 0), up = lo + rng.uniform(0.5, 6);
      p.add_var(lo, up, rng.uniform(-5, 5));
    }
    for (int i = 0; i < m; ++i) {
      LpRow row;
      for (int j = 0; j < n; ++j)
        if (rng.chance(0.7)) row.coeffs.push_back({j, rng.uniform(-4, 4)});
      row.rel = "LGE"[rng.uniform_int(0, 2)];
      row.rhs = rng.uniform(-4, 4);
      if (row.coeffs.empty()) row.coeffs.push_back({0, 1.0});
      p.rows.push_back(row);
    }
    LpSolution s = solve_lp(p);
    if (s.status == LpStatus::Optimal) {
      ++optimal_seen;
      // primal feasibility
      for (int j = 0; j < n; ++j) {
        CHECK(s.primal[j] >= p.lower[j] - 1e-6);
        CHECK(s.primal[j] <= p.upper[j] + 1e-6);
      }
      for (const auto& row : p.rows) {
        double v = 0;
        for (auto [j, a] : row.coeffs) v += a * s.primal[j];
        if (row.rel == 'L') CHECK(v <= row.rhs + 1e-6);
        if (row.rel == 'G') CHECK(v >= row.rhs - 1e-6);
        if (row.rel == 'E') CHECK(v == doctest::Approx(row.rhs).epsilon(1e-6));
      }
      // dual signs and strong duality
      for (std::size_t i = 0; i < p.rows.size(); ++i) {
        if (p.rows[i].rel == 'G') CHECK(s.row_duals[i] >= -1e-7);
        if (p.rows[i].rel == 'L') CHECK(s.row_duals[i] <= 1e-7);
      }
      double dv = dual_objective(p, s);
      CHECK(std::fabs(dv - s.objective) <= 1e-6 * std::max(1.0, std::fabs(s.objective)));
      // oracle agreement on the smallest instances
      if (n <= 4 && m <= 3) {
        double oracle = VertexOracle(p).best_value();
        if (std::isfinite(oracle))
          CHECK(s.objective == doctest::Approx(oracle).epsilon(1e-6));
      }
    } else if (s.status == LpStatus::Infeasible) {
      CHECK(farkas_margin(p, s.farkas_ray) > 1e-9);
    }
  }
  CHECK(optimal_seen > 50);  // the generator must actually exercise the solver
}

TEST_CASE("warm restarts after adding columns and rows match fresh solves") {
  LpProblem p = example21_relaxation();
  SimplexSolver solver(p);
  LpSolution s0 = solver.solve();
  REQUIRE(s0.status == LpStatus::Optimal);

  // add a cheap column covering the linking row
  solver.add_column(0, 2, 0.5, {{0, 1.0}});
  LpSolution s1 = solver.solve();
  LpProblem pf = p;
  pf.add_var(0, 2, 0.5);
  pf.rows[0].coeffs.push_back({4, 1.0});
  LpSolution s1f = solve_lp(pf);
  REQUIRE(s1.status == LpStatus::Optimal);
  CHECK(s1.objective == doctest::Approx(s1f.objective));

  // add a row that cuts the current optimum
  solver.add_row({{{4, 1.0}}, 'L', 0.25});
  LpSolution s2 = solver.solve();
  pf.add_row({{4, 1.0}}, 'L', 0.25);
  LpSolution s2f = solve_lp(pf);
  REQUIRE(s2.status == LpStatus::Optimal);
  CHECK(s2.objective == doctest::Approx(s2f.objective));

  // rhs tightening via set_row_rhs
  solver.set_row_rhs(3, 0.0);
  pf.rows[3].rhs = 0.0;
  CHECK(solver.solve().objective == doctest::Approx(solve_lp(pf).objective));
}

TEST_CASE("iteration limit reports without certificates") {
  LpProblem p = example21_relaxation();
  LpSolution s = solve_lp(p, 1);
  CHECK(s.status == LpStatus::IterationLimit);
}
