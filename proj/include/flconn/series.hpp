#pragma once

#include <map>
#include <string>

#include "flconn/scalar.hpp"

namespace flconn {

// Exponents at or above this sentinel mean "no truncation": the series is an
// exact Laurent polynomial.  Kept well below INT_MAX so shifted bounds cannot
// overflow.
inline constexpr int kExactOrder = 1 << 28;

// ---------------------------------------------------------------------------
// Truncated Laurent series in one coordinate.
//
// `terms` holds the known nonzero coefficients; every exponent >= `trunc` is
// unknown (not zero!), every absent exponent below `trunc` is exactly zero.
// Operations propagate the truncation bound conservatively, so a coefficient
// that survives is always exact.
// ---------------------------------------------------------------------------
struct LaurentSeries {
  int coord = -1;                // symbol id of the coordinate
  std::map<int, Scalar> terms;   // exponent -> nonzero coefficient
  int trunc = kExactOrder;

  bool known_zero() const { return terms.empty() && trunc >= kExactOrder; }
  // Lowest known exponent; for a series with no known terms this is the
  // truncation bound (the valuation is at least that).
  int valuation() const { return terms.empty() ? trunc : terms.begin()->first; }
  Scalar coeff(int exp) const;
};

LaurentSeries make_series(const std::string& coord,
                          std::map<int, Scalar> terms,
                          int trunc = kExactOrder);
LaurentSeries make_series(int coord, std::map<int, Scalar> terms,
                          int trunc = kExactOrder);
LaurentSeries series_monomial(int coord, int exp, const Scalar& c);
LaurentSeries series_zero(int coord);

// Drops terms at or above the new bound.
void series_set_trunc(LaurentSeries& s, int trunc);

LaurentSeries series_neg(const LaurentSeries& a);
LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries series_sub(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries series_scale(const Scalar& c, const LaurentSeries& a);
// Multiplication by coord^k.
LaurentSeries series_shift(const LaurentSeries& a, int k);
// Substitute coord -> coord^k (k >= 1), exponents scale by k.
LaurentSeries series_stretch(const LaurentSeries& a, int k);

// Reciprocal; needs an invertible leading coefficient.  Reports
// ZeroLeadingCoefficient for the zero series and TruncationTooCoarse when all
// known coefficients vanish but the tail is unknown.
LaurentSeries series_invert(const LaurentSeries& a);
LaurentSeries series_pow(const LaurentSeries& a, int k);

LaurentSeries series_derive(const LaurentSeries& a);
// Antiderivative with integration constant fixed to zero.  A nonzero
// coefficient on exponent -1 reports LogarithmicTerm.
LaurentSeries series_integrate(const LaurentSeries& a);

// outer(inner); inner must have valuation >= 1 in the same coordinate as
// outer's argument.  The result lives in inner's coordinate.
LaurentSeries series_compose(const LaurentSeries& outer, const LaurentSeries& inner);

// Compositional inverse of a series of valuation exactly 1 (NotReversible
// otherwise): returns psi with outer(psi(x)) = x + O(x^trunc).
LaurentSeries series_reversion(const LaurentSeries& a);

std::string series_print(const LaurentSeries& a);

// ---------------------------------------------------------------------------
// Puiseux series: a Laurent series in a ramified coordinate u with u^ram =
// base coordinate.  The ramified coordinate's name is a pure function of
// (base, ram) so printing is deterministic.
// ---------------------------------------------------------------------------
struct PuiseuxSeries {
  int base_coord = -1;
  int ram = 1;
  LaurentSeries body;  // coordinate: ramified_coordinate(base_coord, ram)

  bool known_zero() const { return body.known_zero(); }
};

// Symbol id of the coordinate u with u^ram = base (the base itself if ram=1).
int ramified_coordinate(int base_coord, int ram);
// "u^2 = w" (empty when ram = 1).
std::string ramified_relation_string(int base_coord, int ram);

PuiseuxSeries puiseux_from_laurent(const LaurentSeries& a);
PuiseuxSeries puiseux_zero(int base_coord);
// Reduce the ramification index to its minimum (gcd of support and ram).
PuiseuxSeries puiseux_normalize(const PuiseuxSeries& a);
// Rewrite with ramification exactly `ram` (a multiple of a.ram).
PuiseuxSeries puiseux_with_ram(const PuiseuxSeries& a, int ram);

PuiseuxSeries puiseux_neg(const PuiseuxSeries& a);
PuiseuxSeries puiseux_add(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries puiseux_sub(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries puiseux_mul(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries puiseux_scale(const Scalar& c, const PuiseuxSeries& a);

// e-th root (e >= 1).  The e-th root of the leading coefficient enters as a
// fresh parameter with a recorded defining relation unless the coefficient is
// rational with an exact rational root (or 1).  Reports
// ZeroLeadingCoefficient on the zero series.
PuiseuxSeries puiseux_root(const PuiseuxSeries& a, int e);

// Derivative and antiderivative with respect to the base coordinate tau,
// using d tau = ram * u^(ram-1) du.  Integration fixes the constant to zero
// and reports LogarithmicTerm on a tau^{-1} term.
PuiseuxSeries puiseux_derive(const PuiseuxSeries& a);
PuiseuxSeries puiseux_integrate(const PuiseuxSeries& a);

// Valuation as an exact fraction (num, den) = (val in u, ram).
std::pair<int, int> puiseux_valuation(const PuiseuxSeries& a);

std::string puiseux_print(const PuiseuxSeries& a);

// e-th root of a scalar: exact rational root when available, otherwise a
// fresh radical parameter beta with beta^e = (monomial) recorded in the
// symbol table.  Reports UnsupportedGermShape if the scalar is not a rational
// multiple of a monomial (the only shape a radical relation can record).
Scalar scalar_root(const Scalar& c, int e);

}  // namespace flconn
