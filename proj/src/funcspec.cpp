#include "psched/funcspec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "psched/rng.hpp"

namespace psched {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double clampv(double v, double lo, double hi) {
  return std::min(hi, std::max(lo, v));
}

// Raw term value before the production-slot sign flip.
double term_value(const FuncSpec& f, const FuncTerm& t, double u) {
  switch (f.kind) {
    case FuncKind::Linear:
      return t.coeffs[0] * u;
    case FuncKind::Polynomial: {
      double v = 0.0, p = u;
      for (double c : t.coeffs) {
        v += c * p;
        p *= u;
      }
      return v;
    }
    case FuncKind::Exponential: {
      double a = t.coeffs[0], c = t.coeffs[1];
      if (t.slot == Slot::Production) return a * (std::exp2(c * u) - 1.0);
      return a * (1.0 - std::exp2(-c * u));
    }
  }
  return 0.0;
}

double term_derivative(const FuncSpec& f, const FuncTerm& t, double u) {
  switch (f.kind) {
    case FuncKind::Linear:
      return t.coeffs[0];
    case FuncKind::Polynomial: {
      double v = 0.0, p = 1.0;
      for (std::size_t d = 0; d < t.coeffs.size(); ++d) {
        v += t.coeffs[d] * double(d + 1) * p;
        p *= u;
      }
      return v;
    }
    case FuncKind::Exponential: {
      double a = t.coeffs[0], c = t.coeffs[1];
      if (t.slot == Slot::Production) return a * c * kLn2 * std::exp2(c * u);
      return a * c * kLn2 * std::exp2(-c * u);
    }
  }
  return 0.0;
}

FuncPoint clamp_point(const FuncSpec& f, FuncPoint p) {
  p.prev = clampv(p.prev, 0.0, f.domain.prev_max);
  p.production = clampv(p.production, 0.0, f.domain.production_max);
  for (std::size_t k = 0; k < p.peers.size(); ++k) {
    double hi = k < f.domain.peer_max.size() ? f.domain.peer_max[k] : 0.0;
    p.peers[k] = clampv(p.peers[k], 0.0, hi);
  }
  return p;
}

double slot_value(const FuncPoint& p, const FuncTerm& t) {
  switch (t.slot) {
    case Slot::PrevCondition:
      return p.prev;
    case Slot::Production:
      return p.production;
    case Slot::PeerCondition:
      return p.peers.at(static_cast<std::size_t>(t.peer));
  }
  return 0.0;
}

FuncPoint random_point(const FuncDomain& d, Rng& rng) {
  FuncPoint p;
  p.prev = rng.uniform(0.0, d.prev_max);
  p.production = rng.uniform(0.0, d.production_max);
  for (double hi : d.peer_max) p.peers.push_back(rng.uniform(0.0, hi));
  return p;
}

double eval_point(const FuncSpec& f, const FuncPoint& p) {
  return eval_func(f, p.prev, p.production, p.peers);
}

}  // namespace

void check_funcspec(const FuncSpec& f) {
  if (f.kind != FuncKind::Linear && f.kind != FuncKind::Polynomial &&
      f.kind != FuncKind::Exponential)
    throw ValidationError("funcspec: unknown kind");
  if (f.terms.empty()) throw ValidationError("funcspec: empty term list");
  for (const auto& t : f.terms) {
    std::size_t arity = t.coeffs.size();
    switch (f.kind) {
      case FuncKind::Linear:
        if (arity != 1) throw ValidationError("funcspec: linear term needs 1 coefficient");
        break;
      case FuncKind::Polynomial:
        if (arity < 1 || arity > 3)
          throw ValidationError("funcspec: polynomial term needs 1..3 coefficients");
        break;
      case FuncKind::Exponential:
        if (arity != 2) throw ValidationError("funcspec: exponential term needs 2 coefficients");
        break;
    }
    for (double c : t.coeffs)
      if (!std::isfinite(c)) throw ValidationError("funcspec: non-finite coefficient");
    if (t.slot == Slot::PeerCondition) {
      if (t.peer < 0 || static_cast<std::size_t>(t.peer) >= f.domain.peer_max.size())
        throw ValidationError("funcspec: peer index out of range");
    }
  }
  if (!std::isfinite(f.constant)) throw ValidationError("funcspec: non-finite constant");
}

double eval_func(const FuncSpec& f, double prev_condition, double production,
                 const std::vector<double>& peer_conditions) {
  check_funcspec(f);
  FuncPoint p{prev_condition, production, peer_conditions};
  p = clamp_point(f, p);
  double v = f.constant;
  for (const auto& t : f.terms) {
    double tv = term_value(f, t, slot_value(p, t));
    v += t.slot == Slot::Production ? -tv : tv;
  }
  return v;
}

std::vector<double> grad_func(const FuncSpec& f, const FuncPoint& point) {
  check_funcspec(f);
  FuncPoint p = clamp_point(f, point);
  std::vector<double> g(2 + p.peers.size(), 0.0);
  for (const auto& t : f.terms) {
    double d = term_derivative(f, t, slot_value(p, t));
    switch (t.slot) {
      case Slot::PrevCondition:
        g[0] += d;
        break;
      case Slot::Production:
        g[1] -= d;
        break;
      case Slot::PeerCondition:
        g[2 + static_cast<std::size_t>(t.peer)] += d;
        break;
    }
  }
  return g;
}

bool is_concave_on_box(const FuncSpec& f, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const double lambdas[] = {0.25, 0.5, 0.75};
  for (int s = 0; s < samples; ++s) {
    FuncPoint u = random_point(f.domain, rng);
    FuncPoint v = random_point(f.domain, rng);
    double fu = eval_point(f, u), fv = eval_point(f, v);
    for (double lam : lambdas) {
      FuncPoint m;
      m.prev = lam * u.prev + (1 - lam) * v.prev;
      m.production = lam * u.production + (1 - lam) * v.production;
      for (std::size_t k = 0; k < u.peers.size(); ++k)
        m.peers.push_back(lam * u.peers[k] + (1 - lam) * v.peers[k]);
      if (eval_point(f, m) < lam * fu + (1 - lam) * fv - 1e-9) return false;
    }
  }
  return true;
}

bool is_monotone_on_box(const FuncSpec& f, int samples, std::uint64_t seed) {
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    FuncPoint p = random_point(f.domain, rng);
    std::vector<double> g = grad_func(f, p);
    if (g[0] < -1e-9) return false;                    // nondecreasing in prev
    if (g[1] > 1e-9) return false;                     // nonincreasing in production
    for (std::size_t k = 2; k < g.size(); ++k)
      if (g[k] < -1e-9) return false;                  // nondecreasing in peers
  }
  return true;
}

const char* to_string(FuncKind k) {
  switch (k) {
    case FuncKind::Linear:
      return "linear";
    case FuncKind::Polynomial:
      return "polynomial";
    case FuncKind::Exponential:
      return "exponential";
  }
  return "?";
}

FuncKind func_kind_from_string(const std::string& s) {
  if (s == "linear") return FuncKind::Linear;
  if (s == "polynomial") return FuncKind::Polynomial;
  if (s == "exponential") return FuncKind::Exponential;
  throw ValidationError("funcspec: unknown kind '" + s + "'");
}

}  // namespace psched
