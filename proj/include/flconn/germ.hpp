#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flconn/series.hpp"

namespace flconn {

// ---------------------------------------------------------------------------
// Points on the projective line.  Finite points carry their location as a
// Scalar; the local coordinate is z - c there and w = 1/z at infinity.
// ---------------------------------------------------------------------------
struct Point {
  bool at_infinity = false;
  Scalar location = Scalar(0);
};
Point point_finite(const Scalar& c);
Point point_infinity();
bool point_equal(const Point& a, const Point& b);
std::string point_print(const Point& p);

using Matrix = std::vector<std::vector<Scalar>>;
Matrix matrix_zero(int n);
Matrix matrix_identity(int n);

// ---------------------------------------------------------------------------
// Connection germ d + (sum_k A_k tau^k) dtau in the local coordinate tau.
// Finitely many negative k; holomorphic coefficients (k >= 0) may be present
// but are ignored by every formal invariant, which consume only the polar
// part and the residue.
// ---------------------------------------------------------------------------
struct ConnectionGerm {
  Point point;
  int rank = 0;
  std::map<int, Matrix> matrix_coefficients;  // k -> A_k, zero matrices absent

  // max(-k) over nonzero polar coefficients; 0 for a holomorphic germ.
  int pole_order() const;
};
// Validates shapes and drops identically-zero coefficient matrices.
ConnectionGerm germ_make(Point point, int rank, std::map<int, Matrix> coeffs);
// Symbol id of the local coordinate ("w" at infinity, "z" at finite points).
int germ_coordinate(const ConnectionGerm& g);
// Entry (i, j) of the polar part sum_{k<0} A_k tau^k as an exact series.
LaurentSeries germ_polar_entry(const ConnectionGerm& g, int i, int j);

// Coupling components of the polar part: connected components of the
// generators under the symmetric closure of nonzero off-diagonal polar
// entries.  Each block is sorted ascending; blocks are ordered by their
// least generator.
std::vector<std::vector<int>> polar_blocks(const ConnectionGerm& g);
// The germ restricted to one block's generators (in block order).
ConnectionGerm polar_subgerm(const ConnectionGerm& g,
                             const std::vector<int>& block);

// ---------------------------------------------------------------------------
// Newton polygon of the characteristic polynomial det(X I - A(tau)) of the
// polar part.  Points are (X-degree, tau-valuation of the coefficient); the
// lower hull's segment ascents are the eigenvalue growth rates, and the
// system slope of a segment is max(ascent - 1, 0).  Identically zero
// eigenvalue branches (a vanishing determinant) are counted separately in
// zero_eigenvalues rather than drawn as a segment.
// ---------------------------------------------------------------------------
struct HullSegment {
  Rational ascent;  // geometric slope, strictly increasing across segments
  int length = 0;   // horizontal extent = number of eigenvalue branches
};
struct NewtonPolygon {
  std::vector<std::pair<int, int>> points;
  std::vector<HullSegment> lower_hull;
  int zero_eigenvalues = 0;
};
// Reports DegeneratePolygon when the characteristic polynomial collapses to
// X^rank over a nonzero polar part (resonance; use the block path instead).
NewtonPolygon char_newton_polygon(const ConnectionGerm& g);

struct SlopeEntry {
  Rational slope;
  int rank = 0;
};
// System slopes with multiplicities, ascending.
std::vector<SlopeEntry> polygon_slopes(const NewtonPolygon& np);
std::string slopes_print(const std::vector<SlopeEntry>& entries);

// ---------------------------------------------------------------------------
// Formal local data: summands e^q (x) (regular part of the given rank), with
// q a Puiseux exponent without constant term.  residue_exponents are the
// eigenvalues of the regular part where the decomposition determines them;
// entries the procedure cannot see stay unknown (nullopt).
// ---------------------------------------------------------------------------
struct FormalSummand {
  PuiseuxSeries exponent;
  int ramification = 1;
  int rank = 1;
  std::vector<std::optional<Scalar>> residue_exponents;

  Rational slope() const;
};
struct FormalType {
  int rank = 0;
  std::vector<FormalSummand> summands;
};

// Decomposition for the supported class: the polar part splits into coupling
// components that are single entries (integrated directly) or blocks with a
// binomial characteristic polynomial X^m - c(tau) (Puiseux branches).
// Reports UnsupportedGermShape otherwise.
FormalType formal_decompose(const ConnectionGerm& g);
// Canonical representative of an exponent: strips orders >= 0 (gauge) and, if
// the input was only known to a nonnegative order, marks the result exact.
PuiseuxSeries exponent_polar_part(const PuiseuxSeries& a);
std::vector<SlopeEntry> type_slopes(const FormalType& t);
int type_swan(const FormalType& t);
Rational type_katz(const FormalType& t);
std::string formal_type_serialize(const FormalType& t);

// ---------------------------------------------------------------------------
// Slope/Swan/Katz of a germ.  Slopes are computed along two independent
// routes (characteristic Newton polygon; formal decomposition) whenever both
// apply, and a mismatch is fatal (OracleDisagreement).  Swan must come out a
// nonnegative integer (NonIntegralSwan otherwise).
// ---------------------------------------------------------------------------
std::vector<SlopeEntry> slopes(const ConnectionGerm& g);
int swan(const ConnectionGerm& g);
Rational katz(const ConnectionGerm& g);
int swan_from_slopes(const std::vector<SlopeEntry>& entries);

// ---------------------------------------------------------------------------
// Global connections and the residue-theorem check.
// ---------------------------------------------------------------------------
struct GlobalConnection {
  int rank = 0;
  std::vector<ConnectionGerm> germs;
};
GlobalConnection global_make(std::vector<ConnectionGerm> germs);

struct TraceCheck {
  bool ok = false;
  std::string violation;  // the offending identity, printed
};
// Sum over all germs of the residue trace must vanish.
TraceCheck validate_residue_trace(const GlobalConnection& g);

// ---------------------------------------------------------------------------
// Twists: tensoring with rank-1 data.
// ---------------------------------------------------------------------------
// Adds lambda * I / tau (shifts every residue eigenvalue by lambda).
ConnectionGerm twist_log(const ConnectionGerm& g, const Scalar& lambda);
// Integer variant of the same shift.
ConnectionGerm twist_bundle(const ConnectionGerm& g, int k);
// Adds d(q0)/dtau * I; q0 must live in the germ's local coordinate.
ConnectionGerm twist_exponent(const ConnectionGerm& g, const LaurentSeries& q0);

// ---------------------------------------------------------------------------
// Structured-text serialization.  A germ block is
//   germ
//   point <inf | scalar>
//   rank <n>
//   a <k> <i> <j> <scalar expression>
//   ...
//   end
// with absent entries zero; a global document wraps germ blocks between
// "global" / "end" lines.  Scalar expressions reuse the scalar parser.
// ---------------------------------------------------------------------------
std::string germ_serialize(const ConnectionGerm& g);
std::string global_serialize(const GlobalConnection& g);
GlobalConnection global_parse_text(const std::string& text);

}  // namespace flconn
