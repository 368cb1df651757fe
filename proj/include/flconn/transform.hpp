#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flconn/germ.hpp"
#include "flconn/local_fl.hpp"

namespace flconn {

// ---------------------------------------------------------------------------
// Global Fourier-Laplace driver.
//
// fourier_transform assembles the formal data of the transformed connection
// point by point on the dual line.  The input must be singular inside
// {0, infinity} with a regular singularity at 0; the germ at infinity is
// split into coupling blocks, and each block is routed by its slopes:
//
//   germ at 0 (regular)          -> infinity-hat, regular-singular rule;
//   slopes above 1 at infinity   -> infinity-hat, Legendre transform of the
//                                   exponents plus the normal-form solver;
//   slope exactly 1 at infinity  -> one finite point per summand;
//   slopes below 1 at infinity   -> zero-hat, transformed numerics plus the
//                                   solver's presentation when it applies.
//
// Rank and Swan bookkeeping is computed along independent routes and a
// disagreement is fatal; every cross-check that ran is recorded on the
// report.
// ---------------------------------------------------------------------------

// One singular point of the transform with everything established about it.
struct TransformedPoint {
  Point location;          // on the dual line
  LocalNumerics numerics;  // rank, Swan and slope multiset of the local data
  FormalType type;         // the summands established so far
  // True when the summands listed in `type` exhaust numerics.rank.  (The
  // list can be complete while individual residue entries stay unknown.)
  bool type_complete = false;
  std::optional<NormalForm> matrix;     // solver presentation when available
  std::vector<std::string> provenance;  // contributing rule names, sorted
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string details;
};

struct TransformReport {
  std::string source;  // one-line summary of the input
  int rank_hat = 0;    // rank of the transform
  // zero-hat first (when singular), then finite points in a deterministic
  // order, then infinity-hat (when singular).
  std::vector<TransformedPoint> points;
  std::vector<CheckResult> checks;
};

// Transforms a connection with singularities inside {0, infinity}.  The germ
// at 0 must be regular with a semisimple residue; a germ at a finite point
// away from 0 or a nonsingular input is UnsupportedGermShape (translate
// finite singularities to the origin first).  The transform's rank is
// computed three ways (numeric local maps, microlocal ranks, solver
// dimensions); any disagreement between routes, or in the Swan bookkeeping,
// is InternalCheckFailure / OracleDisagreement rather than a report.
TransformReport fourier_transform(const GlobalConnection& g);

// Applies the transform twice and compares the resulting formal data with
// the source pulled back under the sign flip of the coordinate: slope
// multisets, Swan conductors, effective rank, finite locations, and the
// exponents of unramified summands (flipped).  Where the first report keeps
// a matrix whose slopes allow a second solver pass on the same generators,
// the double-dual matrix is compared against the sign-flipped source
// coefficientwise.  Never throws on mismatch: the result carries the diff.
CheckResult double_transform_check(const GlobalConnection& g);

// Transforms both connections and compares everything except residue data:
// singular locations, numerics, summand exponents, and the polar parts
// (pole order >= 2) of the attached matrices.  A perturbation that only
// touches residue entries not feeding the leading terms, or holomorphic
// tails, must leave all of it unchanged.
CheckResult irregular_independence_check(const GlobalConnection& g,
                                         const GlobalConnection& perturbed);

// Structured text document; deterministic field order, one datum per line.
std::string transform_report_serialize(const TransformReport& r);
// Human-readable summary of the same data.
std::string transform_report_summary(const TransformReport& r);

}  // namespace flconn
