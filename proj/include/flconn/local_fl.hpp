#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flconn/germ.hpp"
#include "flconn/micro.hpp"

namespace flconn {

// ---------------------------------------------------------------------------
// Local Fourier-Laplace engine.
//
// The transform acts on formal germs point by point.  Three local directions
// matter on the projective line: data at 0 contributes at infinity-hat, and
// data at infinity splits by slope between zero-hat (slopes below 1), finite
// points (slope exactly 1) and infinity-hat (slopes above 1).  This module
// supplies the numeric shadow of those maps, the Legendre transform of
// exponents, closed-form rules for regular and slope-one data, microlocal
// rank decisions, and the normal-form solver that produces transformed
// connection matrices.
// ---------------------------------------------------------------------------

enum class FlDirection { ZeroToInfHat, InfToZeroHat, InfToInfHat };

std::string direction_print(FlDirection d);

// ---------------------------------------------------------------------------
// Numeric local data: rank, Swan conductor and the slope multiset.
// ---------------------------------------------------------------------------
struct LocalNumerics {
  int rank = 0;
  int swan = 0;
  std::vector<SlopeEntry> slope_multiset;  // ascending, merged
};

// Builds numerics from a slope multiset; rank and Swan are derived.  Entries
// must have nonnegative slopes (SlopeOutOfDomain) and positive ranks, and
// each pure part's slope * rank must be an integer (NonIntegralSwan).
LocalNumerics numerics_make(std::vector<SlopeEntry> entries);
LocalNumerics numerics_of_type(const FormalType& t);
bool numerics_equal(const LocalNumerics& a, const LocalNumerics& b);
std::string numerics_print(const LocalNumerics& n);

// Transforms numerics pure part by pure part.  Slopes map by
//   0 -> inf-hat:   s -> s/(1+s), rank -> rank + swan_part;
//   inf -> 0-hat:   s -> s/(1-s), rank -> rank - swan_part  (slopes < 1);
//   inf -> inf-hat: s -> s/(s-1), rank -> swan_part - rank  (slopes > 1);
// parts outside the direction's domain contribute the zero module and are
// dropped.  Each part's Swan conductor is preserved exactly; a violation in
// the arithmetic is fatal (InternalCheckFailure).
LocalNumerics numeric_local_fl(FlDirection dir, const LocalNumerics& n);

// ---------------------------------------------------------------------------
// Transformed summands: one HLT summand of the transform together with the
// point of the dual line it lives at and the rule that produced it.
// ---------------------------------------------------------------------------
struct TransformedSummand {
  Point location;        // on the dual line: 0, a finite point, or infinity
  FormalSummand summand;
  std::string provenance;  // rule name: "reg-sing-rule", "legendre", ...
};
std::string transformed_print(const TransformedSummand& t);

// ---------------------------------------------------------------------------
// Legendre transform of an exponent.
//
// For an exponent q at the source point, solves zh = q'(z) by series
// reversion (ramifying as needed) and evaluates qh = q(z*) - z* zh at the
// critical point, expressed in the target local coordinate with constant and
// holomorphic orders discarded.  For a slope-one input (direction inf ->
// inf-hat) the critical points condense at the finite point -a, where
// q = a w^{-1} + (lower order); the location and the residual lower-order
// exponent are returned instead.
// ---------------------------------------------------------------------------
struct LegendreResult {
  Point location;       // infinity-hat, zero-hat, or the finite point -a
  PuiseuxSeries qhat;   // transformed exponent (residual exponent at a
                        // finite location; zero when nothing remains)
};

// q must be a pure polar exponent in the source local coordinate (base "w"
// at infinity, "z" at zero).  Slope requirements: ZeroToInfHat needs slope
// > 0, InfToZeroHat slope in (0,1), InfToInfHat slope >= 1; anything else is
// SlopeOutOfDomain.  NotReversible propagates from the series layer.
LegendreResult legendre_exponent(const PuiseuxSeries& q, FlDirection dir);

// Pullback of an exponent under the sign flip of the base coordinate.  Only
// defined for odd ramification (where u -> -u covers the flip);
// UnsupportedGermShape otherwise.
PuiseuxSeries exponent_sign_flip(const PuiseuxSeries& q);

// ---------------------------------------------------------------------------
// Closed-form rules.
// ---------------------------------------------------------------------------

// Regular singular data at 0 with semisimple residue: each nonzero
// eigenvalue lam yields a rank-one regular summand at infinity-hat with
// residue exponent lam + 1; zero eigenvalues contribute nothing.
std::vector<TransformedSummand> reg_sing_rule(
    const std::vector<Scalar>& residue_eigenvalues);

// Extracts the residue eigenvalues of a regular germ (pole order <= 1)
// presented diagonally.  Off-diagonal residue entries are
// NonSemisimpleResidue; a higher-order pole is UnsupportedGermShape.
std::vector<Scalar> semisimple_residue_eigenvalues(const ConnectionGerm& g);

// Rank-one slope-one data at infinity, relation d_w q = (a w^{-2} + c w^{-1})
// q with a != 0 (ZeroLeadingCoefficient otherwise): the transform is regular
// singular of rank one at the finite point -a with residue exponent c - 1.
TransformedSummand slope_one_rule(const Scalar& a, const Scalar& c);

// ---------------------------------------------------------------------------
// Microlocal rank.
//
// The rank of the germ after tensoring with the microdifferential ring of
// its chart, i.e. the rank of the local Fourier contribution.  Closed form:
// at a finite point, the total rank of the summands that are not trivial
// (nonzero exponent or a nonzero residue); at infinity, the sum over pure
// parts of max(swan_part - rank_part, 0).  Every closed-form answer is
// cross-checked against the membership diagnostic on explicit solutions of
// the relations: diagonal rows invert directly, and a coupled block at
// infinity is solved generator by generator on the ones vector with d^-1
// substitutions (chains by back-substitution, cycles through their
// one-generator reduction).  The module vanishes exactly when every
// generator's solution stays in the ring; a disagreement between the two
// routes is fatal (OracleDisagreement).
// ---------------------------------------------------------------------------
int microlocal_rank(const ConnectionGerm& g, Chart chart);

// ---------------------------------------------------------------------------
// Normal-form solver.
//
// Rewrites first-order relations d_w q_i = sum_j A_ij(w) q_j through the
// kernel substitution z -> -d_zh, d_z -> zh into the microdifferential ring
// of the target point, eliminates generators along relations that are exact
// linear combinations with Laurent-monomial coefficients (anything subtler
// is InconsistentRelations), and extracts the transformed connection
//   d q = B q
// on the surviving generators.  The derived system is verified by reducing
// every input relation to zero with micro_product arithmetic; when a
// surviving generator is uncoupled and a Legendre seed for it is supplied,
// the matrix entry must agree with the seed's derivative (SeedMismatch).
// ---------------------------------------------------------------------------
struct RelationSystem {
  int coord = -1;  // symbol id of the source coordinate
  // rows[i][j] = A_ij, Laurent polynomial with pole orders >= 2 only: the
  // solve consumes the irregular type; residues enter through the
  // closed-form rules instead.
  std::vector<std::vector<LaurentSeries>> rows;
};

// The irregular part (pole orders >= 2) of a germ as a relation system.
RelationSystem relations_of_germ(const ConnectionGerm& g);

struct NormalForm {
  Point location;            // target point on the dual line
  std::vector<int> basis;    // surviving generator indices, ascending
  // Connection matrix in the target local coordinate, basis-indexed.
  std::vector<std::vector<LaurentSeries>> matrix;
};

NormalForm normal_form_solver(
    const RelationSystem& relations, const Point& target,
    const std::vector<std::optional<PuiseuxSeries>>& seeds = {});

}  // namespace flconn
