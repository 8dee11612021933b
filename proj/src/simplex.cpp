#include "psched/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psched {

namespace {
constexpr double kDualTol = 1e-9;    // entering threshold
constexpr double kPivotTol = 1e-9;   // minimum pivot magnitude
constexpr double kFeasTol = 1e-7;    // bound violation accepted as feasible
constexpr double kDegenStep = 1e-11;
constexpr long kBlandAfter = 1000;   // degenerate pivots before Bland's rule
constexpr long kRefactorEvery = 128;

// internal: basis went numerically singular; the solve retries cold
struct SingularBasis {};
}  // namespace

SimplexSolver::SimplexSolver(LpProblem p) {
  num_structural_ = p.num_vars();
  objective_constant_ = p.objective_constant;
  cols_.resize(num_structural_);
  for (int j = 0; j < num_structural_; ++j) {
    struct_pos_.push_back(static_cast<int>(vars_.size()));
    vars_.push_back({VarInfo::Structural, j});
    lo_.push_back(p.lower[j]);
    up_.push_back(p.upper[j]);
    cost_.push_back(p.objective[j]);
    stat_.push_back(VStat::AtLower);
    if (lo_[j] > up_[j]) throw LpError("lp: lower > upper");
  }
  for (const auto& row : p.rows) add_row(row);
}

int SimplexSolver::ensure_slack(int row) {
  if (row < static_cast<int>(slack_of_row_.size()) && slack_of_row_[row] >= 0)
    return slack_of_row_[row];
  if (row >= static_cast<int>(slack_of_row_.size())) slack_of_row_.resize(row + 1, -1);
  int j = static_cast<int>(vars_.size());
  vars_.push_back({VarInfo::Slack, row});
  switch (rows_[row].rel) {
    case 'L':
      lo_.push_back(0.0);
      up_.push_back(kInf);
      break;
    case 'G':
      lo_.push_back(-kInf);
      up_.push_back(0.0);
      break;
    case 'E':
      lo_.push_back(0.0);
      up_.push_back(0.0);
      break;
    default:
      throw LpError("lp: bad row relation");
  }
  cost_.push_back(0.0);
  stat_.push_back(rows_[row].rel == 'G' ? VStat::AtUpper : VStat::AtLower);
  slack_of_row_[row] = j;
  return j;
}

int SimplexSolver::ensure_artificial(int row) {
  if (row < static_cast<int>(art_of_row_.size()) && art_of_row_[row] >= 0)
    return art_of_row_[row];
  if (row >= static_cast<int>(art_of_row_.size())) art_of_row_.resize(row + 1, -1);
  int j = static_cast<int>(vars_.size());
  vars_.push_back({VarInfo::Artificial, row});
  lo_.push_back(0.0);
  up_.push_back(0.0);  // inactive until phase 1 opens it
  cost_.push_back(0.0);
  stat_.push_back(VStat::AtLower);
  art_of_row_[row] = j;
  return j;
}

int SimplexSolver::add_column(double lo, double up, double obj,
                              const std::vector<std::pair<int, double>>& entries) {
  if (lo > up) throw LpError("lp: lower > upper");
  int j = num_structural_++;
  // Structural variable ids must stay in a contiguous block only in cols_;
  // the vars_ table can interleave them with slacks.
  cols_.emplace_back();
  for (auto [r, a] : entries) {
    if (r < 0 || r >= num_rows()) throw LpError("lp: column entry row out of range");
    cols_[j].push_back({r, a});
    rows_[r].coeffs.push_back({j, a});
  }
  struct_pos_.push_back(static_cast<int>(vars_.size()));
  vars_.push_back({VarInfo::Structural, j});
  lo_.push_back(lo);
  up_.push_back(up);
  cost_.push_back(obj);
  if (std::isfinite(lo))
    stat_.push_back(VStat::AtLower);
  else if (std::isfinite(up))
    stat_.push_back(VStat::AtUpper);
  else
    stat_.push_back(VStat::FreeZero);
  return j;
}

int SimplexSolver::add_row(const LpRow& row) {
  int r = static_cast<int>(rows_.size());
  rows_.push_back(row);
  for (auto [j, a] : row.coeffs) {
    if (j < 0 || j >= num_structural_) throw LpError("lp: row entry var out of range");
    cols_[j].push_back({r, a});
  }
  int s = ensure_slack(r);
  if (basis_valid_) {
    // Extend the basis with the new slack: B' = [[B,0],[a_B,1]], so the new
    // inverse row is -a_B^T Binv and the new column is e_new.
    int m = static_cast<int>(basis_.size());
    std::vector<double> newbinv((m + 1) * (m + 1), 0.0);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) newbinv[i * (m + 1) + k] = binv_[i * m + k];
    std::vector<double> arow(m, 0.0);  // new row coeffs on basic vars
    for (auto [j, a] : row.coeffs) {
      for (int i = 0; i < m; ++i) {
        const VarInfo& v = vars_[basis_[i]];
        if (v.type == VarInfo::Structural && v.ref == j) arow[i] += a;
      }
    }
    for (int k = 0; k < m; ++k) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += arow[i] * binv_[i * m + k];
      newbinv[m * (m + 1) + k] = -acc;
    }
    newbinv[m * (m + 1) + m] = 1.0;
    binv_ = std::move(newbinv);
    basis_.push_back(s);
    stat_[s] = VStat::Basic;
    compute_basic_values();
  }
  return r;
}

void SimplexSolver::set_row_rhs(int row, double rhs) {
  rows_[row].rhs = rhs;
  if (basis_valid_) compute_basic_values();
}

void SimplexSolver::set_bounds(int var, double lo, double up) {
  if (lo > up) throw LpError("lp: lower > upper");
  if (var < 0 || var >= num_structural_) throw LpError("lp: unknown variable");
  int j = struct_pos_[var];
  lo_[j] = lo;
  up_[j] = up;
  if (stat_.size() > static_cast<std::size_t>(j) && stat_[j] != VStat::Basic) {
    if (stat_[j] == VStat::AtLower && !std::isfinite(lo))
      stat_[j] = std::isfinite(up) ? VStat::AtUpper : VStat::FreeZero;
    if (stat_[j] == VStat::AtUpper && !std::isfinite(up))
      stat_[j] = std::isfinite(lo) ? VStat::AtLower : VStat::FreeZero;
  }
  if (basis_valid_) compute_basic_values();
}

double SimplexSolver::nonbasic_value(int j) const {
  switch (stat_[j]) {
    case VStat::AtLower:
      return lo_[j];
    case VStat::AtUpper:
      return up_[j];
    default:
      return 0.0;
  }
}

void SimplexSolver::column_of(int j, std::vector<std::pair<int, double>>& out) const {
  out.clear();
  const VarInfo& v = vars_[j];
  if (v.type == VarInfo::Structural) {
    out = cols_[v.ref];
  } else {
    out.push_back({v.ref, 1.0});
  }
}

void SimplexSolver::compute_duals(const std::vector<double>& costs,
                                  std::vector<double>& y) const {
  int m = num_rows();
  y.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double cb = costs[basis_[i]];
    if (cb == 0.0) continue;
    const double* row = &binv_[static_cast<std::size_t>(i) * m];
    for (int k = 0; k < m; ++k) y[k] += cb * row[k];
  }
}

void SimplexSolver::compute_basic_values() {
  int m = num_rows();
  std::vector<double> v(m);
  for (int i = 0; i < m; ++i) v[i] = rows_[i].rhs;
  std::vector<std::pair<int, double>> col;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    if (stat_[j] == VStat::Basic) continue;
    double xj = nonbasic_value(j);
    if (xj == 0.0) continue;
    column_of(static_cast<int>(j), col);
    for (auto [r, a] : col) v[r] -= a * xj;
  }
  xb_.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double* row = &binv_[static_cast<std::size_t>(i) * m];
    double acc = 0.0;
    for (int k = 0; k < m; ++k) acc += row[k] * v[k];
    xb_[i] = acc;
  }
}

bool SimplexSolver::refactor() {
  int m = num_rows();
  std::vector<double> B(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<std::pair<int, double>> col;
  for (int i = 0; i < m; ++i) {
    column_of(basis_[i], col);
    for (auto [r, a] : col) B[static_cast<std::size_t>(r) * m + i] = a;
  }
  // Gauss-Jordan inversion with partial pivoting.
  std::vector<double> inv(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;
  for (int c = 0; c < m; ++c) {
    int p = c;
    for (int r = c + 1; r < m; ++r)
      if (std::fabs(B[static_cast<std::size_t>(r) * m + c]) >
          std::fabs(B[static_cast<std::size_t>(p) * m + c]))
        p = r;
    double piv = B[static_cast<std::size_t>(p) * m + c];
    if (std::fabs(piv) < 1e-12) return false;
    if (p != c) {
      for (int k = 0; k < m; ++k) {
        std::swap(B[static_cast<std::size_t>(p) * m + k], B[static_cast<std::size_t>(c) * m + k]);
        std::swap(inv[static_cast<std::size_t>(p) * m + k],
                  inv[static_cast<std::size_t>(c) * m + k]);
      }
    }
    double s = 1.0 / piv;
    for (int k = 0; k < m; ++k) {
      B[static_cast<std::size_t>(c) * m + k] *= s;
      inv[static_cast<std::size_t>(c) * m + k] *= s;
    }
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      double f = B[static_cast<std::size_t>(r) * m + c];
      if (f == 0.0) continue;
      for (int k = 0; k < m; ++k) {
        B[static_cast<std::size_t>(r) * m + k] -= f * B[static_cast<std::size_t>(c) * m + k];
        inv[static_cast<std::size_t>(r) * m + k] -= f * inv[static_cast<std::size_t>(c) * m + k];
      }
    }
  }
  // inv is now (P B)^-1-ish composed correctly by the row swaps: B^-1.
  binv_ = std::move(inv);
  pivots_since_refactor_ = 0;
  return true;
}

void SimplexSolver::ftran(int j, std::vector<double>& w) const {
  int m = num_rows();
  w.assign(m, 0.0);
  std::vector<std::pair<int, double>> col;
  column_of(j, col);
  for (int i = 0; i < m; ++i) {
    const double* row = &binv_[static_cast<std::size_t>(i) * m];
    double acc = 0.0;
    for (auto [r, a] : col) acc += row[r] * a;
    w[i] = acc;
  }
}

SimplexSolver::IterExit SimplexSolver::iterate(const std::vector<double>& costs,
                                               long& iter_budget) {
  int m = num_rows();
  std::vector<double> y, w, d(vars_.size());
  bool confirmed = false;
  while (true) {
    if (iter_budget <= 0) return IterExit::IterationLimit;
    if (pivots_since_refactor_ >= kRefactorEvery) {
      if (!refactor()) throw SingularBasis{};
      compute_basic_values();
    }
    compute_duals(costs, y);

    // Price every nonbasic variable.
    for (std::size_t j = 0; j < vars_.size(); ++j) d[j] = costs[j];
    for (int r = 0; r < m; ++r) {
      if (y[r] == 0.0) continue;
      for (auto [j, a] : rows_[r].coeffs) {
        // structural index j -> vars_ position: structural vars occupy the
        // position recorded in cols order; find via linear map below.
        d[struct_pos_[j]] -= y[r] * a;
      }
    }
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const VarInfo& v = vars_[j];
      if (v.type != VarInfo::Structural) d[j] -= y[v.ref];
    }

    bool bland = degenerate_streak_ >= kBlandAfter;
    int enter = -1;
    double best_score = kDualTol;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      if (stat_[j] == VStat::Basic) continue;
      if (lo_[j] == up_[j]) continue;  // fixed
      double score = 0.0;
      if (stat_[j] == VStat::AtLower && d[j] < -kDualTol)
        score = -d[j];
      else if (stat_[j] == VStat::AtUpper && d[j] > kDualTol)
        score = d[j];
      else if (stat_[j] == VStat::FreeZero && std::fabs(d[j]) > kDualTol)
        score = std::fabs(d[j]);
      if (score <= 0.0) continue;
      if (bland) {
        enter = static_cast<int>(j);
        break;
      }
      if (score > best_score) {
        best_score = score;
        enter = static_cast<int>(j);
      }
    }
    if (enter < 0) {
      if (confirmed) return IterExit::Optimal;
      // Guard against drift: refactor, recompute and re-price once.
      if (!refactor()) throw SingularBasis{};
      compute_basic_values();
      confirmed = true;
      continue;
    }
    confirmed = false;

    int dir = 1;
    if (stat_[enter] == VStat::AtUpper || (stat_[enter] == VStat::FreeZero && d[enter] > 0))
      dir = -1;
    ftran(enter, w);

    double tmax = up_[enter] - lo_[enter];  // bound-flip distance (inf if one-sided)
    double best_t = tmax;
    int leave = -1;
    double leave_delta = 0.0;
    if (bland) {
      // plain textbook test with lowest-index ties: anti-cycling guarantee
      for (int i = 0; i < m; ++i) {
        double delta = -dir * w[i];
        int bj = basis_[i];
        double t;
        if (delta > kPivotTol) {
          if (!std::isfinite(up_[bj])) continue;
          t = (up_[bj] - xb_[i]) / delta;
        } else if (delta < -kPivotTol) {
          if (!std::isfinite(lo_[bj])) continue;
          t = (xb_[i] - lo_[bj]) / (-delta);
        } else {
          continue;
        }
        if (t < 0) t = 0;
        bool better = leave < 0 ? t < best_t - 1e-12
                                : t < best_t - 1e-12 ||
                                      (t <= best_t + 1e-12 && bj < basis_[leave]);
        if (better) {
          best_t = std::min(best_t, t);
          leave = i;
          leave_delta = delta;
        }
      }
    } else {
      // Harris-style two passes: a small bound tolerance buys the freedom to
      // pick a large pivot, which keeps the product-form inverse stable.
      constexpr double kHarrisEps = 1e-7;
      double t_relax = tmax;
      for (int i = 0; i < m; ++i) {
        double delta = -dir * w[i];
        int bj = basis_[i];
        if (delta > kPivotTol && std::isfinite(up_[bj]))
          t_relax = std::min(t_relax, (up_[bj] - xb_[i] + kHarrisEps) / delta);
        else if (delta < -kPivotTol && std::isfinite(lo_[bj]))
          t_relax = std::min(t_relax, (xb_[i] - lo_[bj] + kHarrisEps) / (-delta));
      }
      if (t_relax < 0) t_relax = 0;  // a basic already beyond its bound blocks at 0
      for (int i = 0; i < m; ++i) {
        double delta = -dir * w[i];
        int bj = basis_[i];
        double t;
        if (delta > kPivotTol && std::isfinite(up_[bj]))
          t = (up_[bj] - xb_[i]) / delta;
        else if (delta < -kPivotTol && std::isfinite(lo_[bj]))
          t = (xb_[i] - lo_[bj]) / (-delta);
        else
          continue;
        if (t < 0) t = 0;
        if (t > t_relax) continue;
        if (leave < 0 || std::fabs(delta) > std::fabs(leave_delta)) {
          leave = i;
          leave_delta = delta;
          best_t = t;
        }
      }
      if (leave >= 0 && std::isfinite(tmax) && tmax <= best_t) leave = -1;  // flip wins
      if (leave < 0) best_t = tmax;
    }

    if (!std::isfinite(best_t) && leave < 0) return IterExit::Unbounded;

    --iter_budget;
    if (leave < 0) {
      // bound flip
      for (int i = 0; i < m; ++i) xb_[i] -= dir * best_t * w[i];
      stat_[enter] = stat_[enter] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
      degenerate_streak_ = 0;
      continue;
    }

    double enter_val = nonbasic_value(enter) + dir * best_t;
    int leaving_var = basis_[leave];
    for (int i = 0; i < m; ++i)
      if (i != leave) xb_[i] -= dir * best_t * w[i];
    xb_[leave] = enter_val;

    stat_[leaving_var] = leave_delta > 0 ? VStat::AtUpper : VStat::AtLower;
    basis_[leave] = enter;
    stat_[enter] = VStat::Basic;

    // Binv update: eliminate w in all rows except the pivot row.
    double wp = w[leave];
    double* prow = &binv_[static_cast<std::size_t>(leave) * m];
    for (int k = 0; k < m; ++k) prow[k] /= wp;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      double f = w[i];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(i) * m];
      for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
    }
    ++pivots_since_refactor_;
    degenerate_streak_ = best_t < kDegenStep ? degenerate_streak_ + 1 : 0;
  }
}

void SimplexSolver::cold_basis() {
  int m = num_rows();
  stat_.resize(vars_.size());
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    if (std::isfinite(lo_[j]))
      stat_[j] = VStat::AtLower;
    else if (std::isfinite(up_[j]))
      stat_[j] = VStat::AtUpper;
    else
      stat_[j] = VStat::FreeZero;
  }
  basis_.resize(m);
  for (int r = 0; r < m; ++r) {
    int s = ensure_slack(r);
    basis_[r] = s;
    stat_[s] = VStat::Basic;
  }
  // deactivate any artificials from earlier solves
  for (std::size_t j = 0; j < vars_.size(); ++j)
    if (vars_[j].type == VarInfo::Artificial) {
      lo_[j] = up_[j] = 0.0;
      cost_[j] = 0.0;
    }
  binv_.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) binv_[static_cast<std::size_t>(i) * m + i] = 1.0;
  pivots_since_refactor_ = 0;
  compute_basic_values();
  basis_valid_ = true;
}

double SimplexSolver::phase1(long& iter_budget, std::vector<double>& farkas_y,
                             bool& hit_limit) {
  int m = num_rows();
  hit_limit = false;
  // Activate an artificial for every slack-basic row whose value is outside
  // the slack bounds; the artificial absorbs the violation so the start is
  // feasible for the phase-1 problem.
  std::vector<double> costs1(vars_.size(), 0.0);
  bool any = false;
  for (int i = 0; i < m; ++i) {
    int s = basis_[i];
    double v = xb_[i];
    if (v > up_[s] + kFeasTol) {
      int a = ensure_artificial(vars_[s].ref);
      costs1.resize(vars_.size(), 0.0);
      lo_[a] = 0.0;
      up_[a] = kInf;
      costs1[a] = 1.0;
      stat_[s] = VStat::AtUpper;
      basis_[i] = a;
      stat_[a] = VStat::Basic;
      xb_[i] = v - up_[s];
      any = true;
    } else if (v < lo_[s] - kFeasTol) {
      int a = ensure_artificial(vars_[s].ref);
      costs1.resize(vars_.size(), 0.0);
      lo_[a] = -kInf;
      up_[a] = 0.0;
      costs1[a] = -1.0;
      stat_[s] = VStat::AtLower;
      basis_[i] = a;
      stat_[a] = VStat::Basic;
      xb_[i] = v - lo_[s];
      any = true;
    }
  }
  stat_.resize(vars_.size(), VStat::AtLower);
  if (!any) return 0.0;

  IterExit e = iterate(costs1, iter_budget);
  if (e == IterExit::IterationLimit) {
    hit_limit = true;
    return kInf;
  }
  double obj = 0.0;
  for (int i = 0; i < m; ++i) obj += costs1[basis_[i]] * xb_[i];
  if (obj > 1e-7) {
    compute_duals(costs1, farkas_y);
    return obj;
  }

  // Feasible: retire the artificials.  Basic artificials sit at zero; try to
  // pivot them out, otherwise pin them (redundant row).
  std::vector<double> brow(m);
  std::vector<std::pair<int, double>> col;
  for (int i = 0; i < m; ++i) {
    if (vars_[basis_[i]].type != VarInfo::Artificial) continue;
    for (int k = 0; k < m; ++k) brow[k] = binv_[static_cast<std::size_t>(i) * m + k];
    int enter = -1;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      if (stat_[j] == VStat::Basic || vars_[j].type == VarInfo::Artificial) continue;
      column_of(static_cast<int>(j), col);
      double alpha = 0.0;
      for (auto [r, a] : col) alpha += brow[r] * a;
      if (std::fabs(alpha) > 1e-7) {
        enter = static_cast<int>(j);
        break;
      }
    }
    if (enter >= 0) {
      std::vector<double> w;
      ftran(enter, w);
      int art = basis_[i];
      basis_[i] = enter;
      stat_[enter] = VStat::Basic;
      stat_[art] = VStat::AtLower;
      double wp = w[i];
      double* prow = &binv_[static_cast<std::size_t>(i) * m];
      for (int k = 0; k < m; ++k) prow[k] /= wp;
      for (int r = 0; r < m; ++r) {
        if (r == i) continue;
        double f = w[r];
        if (f == 0.0) continue;
        double* row = &binv_[static_cast<std::size_t>(r) * m];
        for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
      xb_[i] = nonbasic_value(enter);  // degenerate swap at value 0 offset
      compute_basic_values();
    }
  }
  for (std::size_t j = 0; j < vars_.size(); ++j)
    if (vars_[j].type == VarInfo::Artificial) {
      lo_[j] = up_[j] = 0.0;
      if (stat_[j] != VStat::Basic) stat_[j] = VStat::AtLower;
    }
  compute_basic_values();
  return 0.0;
}

bool SimplexSolver::warm_repair(long& iter_budget) {
  int m = num_rows();
  std::vector<double> costs1(vars_.size(), 0.0);
  std::vector<std::pair<int, double>> saved;  // var -> saved bound slot
  std::vector<std::pair<int, std::pair<double, double>>> saved_bounds;
  bool any = false;
  for (int i = 0; i < m; ++i) {
    int j = basis_[i];
    double v = xb_[i];
    if (v > up_[j] + kFeasTol) {
      saved_bounds.push_back({j, {lo_[j], up_[j]}});
      up_[j] = v;
      costs1[j] = 1.0;
      any = true;
    } else if (v < lo_[j] - kFeasTol) {
      saved_bounds.push_back({j, {lo_[j], up_[j]}});
      lo_[j] = v;
      costs1[j] = -1.0;
      any = true;
    }
  }
  if (!any) return true;
  IterExit e = iterate(costs1, iter_budget);
  for (auto& [j, b] : saved_bounds) {
    lo_[j] = b.first;
    up_[j] = b.second;
  }
  compute_basic_values();
  if (e != IterExit::Optimal) return false;
  for (int i = 0; i < m; ++i) {
    int j = basis_[i];
    if (xb_[i] > up_[j] + kFeasTol || xb_[i] < lo_[j] - kFeasTol) return false;
  }
  (void)saved;
  return true;
}

LpSolution SimplexSolver::solve(long iteration_limit) {
  // A numerically singular basis is repaired by restarting from the slack
  // basis; that start is diagonal and cannot be singular itself.
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      return solve_attempt(iteration_limit, attempt == 1);
    } catch (const SingularBasis&) {
      basis_valid_ = false;
    }
  }
  throw LpError("lp: singular basis persisted after a cold restart");
}

LpSolution SimplexSolver::solve_attempt(long iteration_limit, bool force_cold) {
  long budget = iteration_limit;
  stat_.resize(vars_.size(), VStat::AtLower);
  // Pin artificials left open by a previous infeasible solve; a basic one at
  // a nonzero value then shows up as a bound violation and triggers repair.
  for (std::size_t j = 0; j < vars_.size(); ++j)
    if (vars_[j].type == VarInfo::Artificial) {
      lo_[j] = up_[j] = 0.0;
      if (stat_[j] != VStat::Basic) stat_[j] = VStat::AtLower;
    }

  bool warm_ok = false;
  if (!force_cold && basis_valid_ && static_cast<int>(basis_.size()) == num_rows()) {
    if (refactor()) {
      compute_basic_values();
      warm_ok = warm_repair(budget);
    }
  }
  std::vector<double> farkas;
  if (!warm_ok) {
    cold_basis();
    bool limit = false;
    double p1 = phase1(budget, farkas, limit);
    if (limit) return extract(LpStatus::IterationLimit, iteration_limit - budget);
    if (p1 > 1e-7) {
      LpSolution sol = extract(LpStatus::Infeasible, iteration_limit - budget);
      sol.farkas_ray = std::move(farkas);
      return sol;
    }
  }

  std::vector<double> costs(vars_.size(), 0.0);
  for (std::size_t j = 0; j < vars_.size(); ++j)
    if (vars_[j].type == VarInfo::Structural) costs[j] = cost_[j];
  IterExit e = iterate(costs, budget);
  switch (e) {
    case IterExit::Optimal:
      return extract(LpStatus::Optimal, iteration_limit - budget);
    case IterExit::Unbounded:
      return extract(LpStatus::Unbounded, iteration_limit - budget);
    default:
      return extract(LpStatus::IterationLimit, iteration_limit - budget);
  }
}

LpSolution SimplexSolver::extract(LpStatus st, long used_iterations) {
  LpSolution sol;
  sol.status = st;
  sol.iterations = used_iterations;
  sol.primal.assign(num_structural_, 0.0);
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    if (vars_[j].type != VarInfo::Structural) continue;
    if (stat_[j] != VStat::Basic) sol.primal[vars_[j].ref] = nonbasic_value(static_cast<int>(j));
  }
  for (int i = 0; i < num_rows() && i < static_cast<int>(basis_.size()); ++i) {
    const VarInfo& v = vars_[basis_[i]];
    if (v.type == VarInfo::Structural) sol.primal[v.ref] = xb_[i];
  }
  double obj = objective_constant_;
  for (int j = 0; j < num_structural_; ++j) obj += cost_[struct_pos_[j]] * sol.primal[j];
  sol.objective = obj;
  if (st == LpStatus::Optimal) {
    std::vector<double> costs(vars_.size(), 0.0);
    for (std::size_t j = 0; j < vars_.size(); ++j)
      if (vars_[j].type == VarInfo::Structural) costs[j] = cost_[j];
    compute_duals(costs, sol.row_duals);
  }
  return sol;
}

std::string SimplexSolver::dump() const {
  std::ostringstream os;
  os << "min";
  for (int j = 0; j < num_structural_; ++j) os << " " << cost_[struct_pos_[j]] << "*x" << j;
  os << "\n";
  for (int r = 0; r < num_rows(); ++r) {
    os << "row" << r << ":";
    for (auto [j, a] : rows_[r].coeffs) os << " " << a << "*x" << j;
    os << " " << rows_[r].rel << " " << rows_[r].rhs << "\n";
  }
  for (int j = 0; j < num_structural_; ++j)
    os << "x" << j << " in [" << lo_[struct_pos_[j]] << ", " << up_[struct_pos_[j]] << "]\n";
  return os.str();
}

LpSolution solve_lp(const LpProblem& p, long iteration_limit) {
  SimplexSolver s(p);
  return s.solve(iteration_limit);
}

}  // namespace psched
