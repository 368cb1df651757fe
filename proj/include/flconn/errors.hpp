#pragma once

#include <stdexcept>
#include <string>

namespace flconn {

// Every failure mode the library can report.  The CLI maps these onto process
// exit codes; tests match on the code rather than on message text.
enum class Errc {
  DivisionByZero,
  EvaluationPoleExhausted,
  ParseError,
  CoordinateMismatch,
  ZeroLeadingCoefficient,
  LogarithmicTerm,
  NotReversible,
  ChartMismatch,
  NotFormallyInvertible,
  TruncationTooCoarse,
  UnsupportedGermShape,
  NonIntegralSwan,
  DegeneratePolygon,
  NonSemisimpleResidue,
  SlopeOutOfDomain,
  OracleDisagreement,
  InconsistentRelations,
  SeedMismatch,
  ConstraintViolation,
  VerificationFailure,
  InternalCheckFailure,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::EvaluationPoleExhausted: return "EvaluationPoleExhausted";
    case Errc::ParseError: return "ParseError";
    case Errc::CoordinateMismatch: return "CoordinateMismatch";
    case Errc::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case Errc::LogarithmicTerm: return "LogarithmicTerm";
    case Errc::NotReversible: return "NotReversible";
    case Errc::ChartMismatch: return "ChartMismatch";
    case Errc::NotFormallyInvertible: return "NotFormallyInvertible";
    case Errc::TruncationTooCoarse: return "TruncationTooCoarse";
    case Errc::UnsupportedGermShape: return "UnsupportedGermShape";
    case Errc::NonIntegralSwan: return "NonIntegralSwan";
    case Errc::DegeneratePolygon: return "DegeneratePolygon";
    case Errc::NonSemisimpleResidue: return "NonSemisimpleResidue";
    case Errc::SlopeOutOfDomain: return "SlopeOutOfDomain";
    case Errc::OracleDisagreement: return "OracleDisagreement";
    case Errc::InconsistentRelations: return "InconsistentRelations";
    case Errc::SeedMismatch: return "SeedMismatch";
    case Errc::ConstraintViolation: return "ConstraintViolation";
    case Errc::VerificationFailure: return "VerificationFailure";
    case Errc::InternalCheckFailure: return "InternalCheckFailure";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace flconn
