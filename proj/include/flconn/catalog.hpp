#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "flconn/transform.hpp"

namespace flconn {

// ---------------------------------------------------------------------------
// The built-in catalog: six rank-3 connections on the projective line with a
// regular origin and a normalized pole at infinity (order 2 or 3), named
//   JKTVI, JKTV, JKTIVa, JKTIVb, JKTII, JKTI.
// Leading terms are fixed up to the case's free parameters, residues stay
// symbolic, and one residue entry per case is bound so the residue traces sum
// to zero.  Every case ships with a recorded transform template against which
// the pipeline is verified field by field.
// ---------------------------------------------------------------------------

// Case names in catalog order.
const std::vector<std::string>& catalog_names();

struct CatalogInfo {
  std::string name;
  // Bindable parameter names with their default expressions ("t" stays the
  // symbol t, "0" is a structural zero a caller may lift).
  std::vector<std::pair<std::string, std::string>> parameters;
  // Genericity constraints; bindings violating one provably (under the
  // randomized zero test) are ConstraintViolation, symbolic bindings are let
  // through and the constraint stands as an assumption.
  std::vector<std::string> assumptions;
};
// ParseError for anything outside the six names.
const CatalogInfo& catalog_info(const std::string& name);

// Builds the named connection.  Unlisted parameters keep their defaults;
// binding an unknown name is ParseError.  The result always passes
// validate_residue_trace: the trace-bound residue entry is derived from the
// others and is not bindable.
GlobalConnection build_case(
    const std::string& name,
    const std::map<std::string, Scalar>& params = {});

// The case's germ at infinity with nothing zeroed beyond its structure:
// diagonal leading terms get fully symbolic eigenvalues and every residue
// slot of the shape stays a free symbol.  This is the slope-table instance;
// it is not trace-balanced and carries no germ at the origin.
ConnectionGerm generic_infinity_germ(const std::string& name);

// ---------------------------------------------------------------------------
// Recorded templates.  A template lists, per transformed point, the fields
// the record pins down; everything absent is unknown and skipped by the
// comparison.  Matrix expectations name individual series coefficients, so a
// record can fix the two leading orders of a presentation while leaving the
// residue row open.
// ---------------------------------------------------------------------------
struct ExpectedMatrix {
  int basis_size = 0;
  std::vector<std::tuple<int, int, int, Scalar>> entries;  // (i, j, order, value)
  std::vector<std::tuple<int, int, int>> zeros;            // asserted zero slots
};
struct ExpectedSummand {
  std::optional<int> ramification;
  std::optional<int> rank;
  std::optional<Rational> slope;
  // Aligned with residue_exponents; nullopt slots are not compared.
  std::optional<std::vector<std::optional<Scalar>>> residues;
};
struct ExpectedPoint {
  std::string location;  // "zero-hat", "inf-hat", or a scalar expression
  int rank = 0;
  int swan = 0;
  std::optional<std::vector<SlopeEntry>> slopes;
  std::optional<std::vector<ExpectedSummand>> summands;
  std::optional<ExpectedMatrix> matrix;
};
struct ExpectedReport {
  std::string name;
  int rank_hat = 0;
  std::vector<ExpectedPoint> points;  // in report order
};

// Loads the case's record from the data directory (IoError on a missing
// file, ParseError on malformed content).
ExpectedReport expected_report(const std::string& name);

struct VerifyResult {
  bool pass = false;
  std::vector<std::string> diffs;  // one line per mismatched field
};
// Field-level comparison of a computed report against a record.  The records
// also require every consistency check on the report to have passed.
VerifyResult compare_with_expected(const TransformReport& r,
                                   const ExpectedReport& e);
// build_case at defaults -> fourier_transform -> compare_with_expected.
VerifyResult verify_case(const std::string& name);

}  // namespace flconn
