#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace psched {

// Structured error for malformed domain objects and schema violations.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class FuncKind { Linear, Polynomial, Exponential };

enum class Slot { PrevCondition, Production, PeerCondition };

// One separable term of a degradation / production-limit function.
// Semantics per kind:
//   linear:      coeffs = {a},          h(u) = a*u
//   polynomial:  coeffs = {c1,c2,c3},   h(u) = c1*u + c2*u^2 + c3*u^3  (<= cubic)
//   exponential: coeffs = {a,c},        condition slots: h(u) = a*(1 - 2^(-c*u))
//                                       production slot: h(u) = a*(2^(c*u) - 1)
// Production-slot terms are subtracted from the function value; condition
// slots are added.  With nonnegative coefficients this yields a function that
// is concave, nondecreasing in the condition slots and nonincreasing in
// production.
struct FuncTerm {
  Slot slot = Slot::PrevCondition;
  int peer = -1;  // component index, only for PeerCondition
  std::vector<double> coeffs;
};

// Box domain the function is defined over.  Inputs outside the box are
// clamped before evaluation so that tangent cuts taken at the clamped point
// stay valid for the concave function.
struct FuncDomain {
  double prev_max = 0.0;
  double production_max = 0.0;
  std::vector<double> peer_max;
};

struct FuncSpec {
  FuncKind kind = FuncKind::Linear;
  double constant = 0.0;
  std::vector<FuncTerm> terms;
  FuncDomain domain;
};

// Evaluation point in slot order: prev condition, production, peer conditions.
struct FuncPoint {
  double prev = 0.0;
  double production = 0.0;
  std::vector<double> peers;
};

// Throws ValidationError on unknown kind, empty terms, bad coefficient
// arity or out-of-range peer references.
void check_funcspec(const FuncSpec& f);

double eval_func(const FuncSpec& f, double prev_condition, double production,
                 const std::vector<double>& peer_conditions);

// Analytic partials at the (clamped) point, ordered prev, production, peers.
std::vector<double> grad_func(const FuncSpec& f, const FuncPoint& p);

// Numeric certificates used by the instance generator and its tests.
// Sampled checks over the box domain; return false on a found violation.
bool is_concave_on_box(const FuncSpec& f, int samples, std::uint64_t seed);
bool is_monotone_on_box(const FuncSpec& f, int samples, std::uint64_t seed);

const char* to_string(FuncKind k);
FuncKind func_kind_from_string(const std::string& s);

}  // namespace psched
