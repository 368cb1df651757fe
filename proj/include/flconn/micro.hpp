#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flconn/scalar.hpp"
#include "flconn/series.hpp"

namespace flconn {

// ---------------------------------------------------------------------------
// Weyl operators.
//
// Polynomial differential operators in one affine chart, kept in normal order
// with space variables on the left: sum of coeff * x^a * d_x^b with a,b >= 0.
// Negative powers of the space variable belong to the microlocal layer below,
// not here.
// ---------------------------------------------------------------------------
struct WeylOperator {
  int space = -1;  // symbol id of the chart coordinate (z, w, zh, ...)
  // (space exponent a >= 0, derivative exponent b >= 0) -> coefficient
  std::map<std::pair<int, int>, Scalar> terms;
};

WeylOperator weyl_make(int space,
                       std::map<std::pair<int, int>, Scalar> terms);
WeylOperator weyl_make(const std::string& space,
                       std::map<std::pair<int, int>, Scalar> terms);
WeylOperator weyl_add(const WeylOperator& a, const WeylOperator& b);
WeylOperator weyl_sub(const WeylOperator& a, const WeylOperator& b);
// Normal-ordering product: d^b x^a = sum_k C(b,k) a!/(a-k)! x^(a-k) d^(b-k).
WeylOperator weyl_mul(const WeylOperator& a, const WeylOperator& b);
WeylOperator weyl_scale(const Scalar& c, const WeylOperator& a);
bool weyl_equal(const WeylOperator& a, const WeylOperator& b);

// The kernel substitution x -> -d_y, d_x -> y into the dual chart, applied
// monomial-by-monomial and re-normal-ordered.  This is an order-preserving
// algebra homomorphism (it preserves [d,x] = 1); applying it twice returns to
// the original chart with x -> -x, d_x -> -d_x.
WeylOperator weyl_fourier(const WeylOperator& a, int target_space);
// x -> -x, d -> -d.
WeylOperator weyl_sign_flip(const WeylOperator& a);

std::string weyl_print(const WeylOperator& a);

// ---------------------------------------------------------------------------
// Microlocal operators.
//
// Elements sum_i a_i(x) hw^i where hw = d_z^{-1} and i is bounded below.  Two
// charts share this shape:
//   AtZero:     x = z, coefficients in C[[z]]; hw commutes by
//               hw * a(z) = sum_k (-1)^k a^(k)(z) hw^(k+1).
//   AtInfinity: x = w = z^{-1}, coefficients in C[[w]]; d/dz = -w^2 d/dw.
// `extended` (AtInfinity only) allows finitely many negative w powers.
// Coefficients with hw-exponent >= j_trunc or space exponent >= s_trunc are
// unknown; stored coefficients are exact.  Explicitly constructed operators
// are exact (both bounds at kExactOrder); finite bounds appear when a product
// or inverse runs into a genuinely infinite expansion and cuts it at
// kDefaultHwTrunc orders.  Negative space exponents can be stored regardless
// of the chart: membership in the ring proper is judged by the diagnostic
// below, so "escaping" inverses stay representable.
// ---------------------------------------------------------------------------
enum class Chart { AtZero, AtInfinity };

inline constexpr int kDefaultHwTrunc = 12;

struct MicroOperator {
  Chart chart = Chart::AtZero;
  int space = -1;
  bool extended = false;
  // (space exponent s, hw exponent j) -> coefficient
  std::map<std::pair<int, int>, Scalar> terms;
  int j_trunc = kExactOrder;
  int s_trunc = kExactOrder;

  bool is_zero() const { return terms.empty(); }
  // Lowest hw order with a nonzero coefficient (j_trunc when none).
  int min_order() const;
  Scalar coeff(int s, int j) const;
};

MicroOperator micro_make(Chart chart, int space,
                         std::map<std::pair<int, int>, Scalar> terms,
                         bool extended = false, int j_trunc = kExactOrder,
                         int s_trunc = kExactOrder);
MicroOperator micro_identity(Chart chart, int space);
// c * x^s * hw^j
MicroOperator micro_term(Chart chart, int space, int s, int j, const Scalar& c);
// d_w at infinity: -w^{-2} hw^{-1} (requires the extended ring).
MicroOperator micro_dw(int space);
// d_z at zero: hw^{-1}.
MicroOperator micro_dz(int space);

MicroOperator micro_add(const MicroOperator& a, const MicroOperator& b);
MicroOperator micro_sub(const MicroOperator& a, const MicroOperator& b);
MicroOperator micro_scale(const Scalar& c, const MicroOperator& a);
// Reports ChartMismatch if charts or space symbols differ.
MicroOperator micro_product(const MicroOperator& a, const MicroOperator& b);
// All coefficients known to both sides agree.
bool micro_same_known(const MicroOperator& a, const MicroOperator& b);

// Two-sided inverse modulo truncation: factors a as (monomial) * (1 - N)
// with N of positive hw-order and sums the geometric series.  Reports
// NotFormallyInvertible when the leading hw-slice is not a single monomial or
// the remainder fails to gain hw-order.
MicroOperator micro_invert(const MicroOperator& a);

// ---------------------------------------------------------------------------
// Ring membership diagnostic.
//
// Profiles the minimal space exponent at each hw order.  InRing: coefficients
// stay power series (or stay bounded below, for the extended ring at
// infinity).  Escapes: space exponents drop without bound; the profile is the
// witness.  Inconclusive: the window is too short to extrapolate.  Requires a
// computed hw window of at least kMinDiagnosticWindow orders, else
// TruncationTooCoarse.
// ---------------------------------------------------------------------------
inline constexpr int kMinDiagnosticWindow = 8;

enum class Membership { InRing, Escapes, Inconclusive };

struct MembershipReport {
  Membership verdict = Membership::Inconclusive;
  // hw order -> minimal space exponent among nonzero coefficients
  std::map<int, int> profile;
};

MembershipReport micro_membership(const MicroOperator& a);
// Same, but cross-checked against a closed-form expectation supplied by the
// caller; a disagreement is fatal (OracleDisagreement).
MembershipReport micro_membership_checked(const MicroOperator& a,
                                          Membership expected);

std::string micro_print(const MicroOperator& a);
// One line per hw order: "hw^j: min space exponent s".
std::string micro_profile_table(const MicroOperator& a);

// Self-test of the chart bookkeeping: [d_z, z] = 1 at zero, [d_w, w] = 1 at
// infinity with d_w = -w^{-2} hw^{-1}, d_w^{-1} = -hw w^2, and
// hw w^{-1} - w^{-1} hw = -hw^2.  Reports InternalCheckFailure on violation.
void verify_chart_identities();

}  // namespace flconn
