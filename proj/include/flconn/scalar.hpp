#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flconn/errors.hpp"

namespace flconn {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Symbols.
//
// Parameters (t, b0, lam2, ...) are interned once per process and referenced
// by integer id.  A parameter may carry a single defining relation
//     p^e = coeff * monomial            (e >= 2)
// which is how e-th roots of leading coefficients enter the computation.  The
// right-hand side is restricted to a rational multiple of a monomial in
// relation-free parameters; this keeps reduction of p^m (m >= e) a monomial
// rewrite and keeps zero-testing exact.
// ---------------------------------------------------------------------------

// Sorted (symbol id, exponent > 0) pairs.
using Monomial = std::vector<std::pair<int, int>>;

struct RootRelation {
  int exponent = 0;  // e >= 2
  Rational coeff;    // nonzero
  Monomial monomial; // over relation-free symbols
};

class SymbolTable {
 public:
  static SymbolTable& instance();

  int intern(const std::string& name);
  int fresh(const std::string& stem);
  std::string name(int id) const;
  int size() const;

  void bind_root(int id, int exponent, const Rational& coeff,
                 const Monomial& monomial);
  std::optional<RootRelation> relation(int id) const;
  // "beta1^2 = b0" style rendering of a relation, empty if none.
  std::string relation_string(int id) const;

 private:
  SymbolTable() = default;
  mutable std::mutex mu_;
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<std::optional<RootRelation>> relations_;
};

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials over Q, with radical-relation reduction.
// Deterministic term order (std::map over the monomial vector) so printing
// and iteration are reproducible run to run.
// ---------------------------------------------------------------------------

class Poly {
 public:
  Poly() = default;
  static Poly constant(const Rational& r);
  static Poly variable(int id, int exp = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // Constant value; requires is_constant().
  Rational constant_value() const;

  const std::map<Monomial, Rational>& terms() const { return terms_; }

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }

  void add_term(const Monomial& m, const Rational& c);
  // Applies radical relations (p^m with m >= e rewrites via p^e = c*mono)
  // and drops zero coefficients.
  void normalize();

  void collect_symbols(std::vector<int>& out) const;
  Rational evaluate(const std::map<int, Rational>& assignment) const;

  std::string str() const;

 private:
  std::map<Monomial, Rational> terms_;
};

// ---------------------------------------------------------------------------
// Scalar: an element of the rational function field Q(parameters), kept as a
// gcd-free fraction num/den of polynomials.  Normalization cancels common
// monomial content and rescales so the denominator's leading coefficient is
// one; full polynomial gcd is deliberately not attempted.  Values are
// immutable after construction and safe to share across threads.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultZeroTestSeed = 0x5eedface01234567ULL;

class Scalar {
 public:
  Scalar() : Scalar(Rational(0)) {}
  explicit Scalar(const Rational& r);
  Scalar(long v) : Scalar(Rational(v)) {}           // NOLINT(runtime/explicit)
  Scalar(int v) : Scalar(Rational(v)) {}            // NOLINT(runtime/explicit)
  Scalar(const Poly& num, const Poly& den);

  static Scalar param(const std::string& name);
  static Scalar param_id(int id);
  static Scalar rational(long num, long den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool den_is_one() const;

  Scalar operator-() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  // Throws DivisionByZero if o is (syntactically) zero.
  Scalar operator/(const Scalar& o) const;

  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  bool syntactically_zero() const { return num_.is_zero(); }
  bool is_rational() const;
  // Requires is_rational().
  Rational rational_value() const;

  // Evaluate at a full assignment of the free (relation-less) symbols;
  // radical symbols must not remain (normalize removes powers >= e, so a
  // Scalar containing a radical symbol to powers < e cannot be evaluated
  // rationally and this reports EvaluationPoleExhausted after the budget).
  Rational evaluate(const std::map<int, Rational>& assignment) const;

  std::string str() const;

 private:
  void normalize();
  Poly num_, den_;
};

Scalar scalar_pow(const Scalar& base, long e);

// Decides exact equality with zero.  The primary decision is syntactic
// (normalized numerator empty); a seeded randomized evaluation then
// cross-checks every "nonzero" verdict, and a disagreement reports
// InternalCheckFailure.  Deterministic for a fixed seed.
bool scalar_is_zero(const Scalar& s, std::uint64_t seed = kDefaultZeroTestSeed);
bool scalar_equal(const Scalar& a, const Scalar& b,
                  std::uint64_t seed = kDefaultZeroTestSeed);

// Infix parser/printer.  Grammar: + - * / ^ ( ), integer literals and
// parameter names, e.g. "(t^2-1)/(t-1)".  scalar_print(scalar_parse(s))
// round-trips canonical forms.
Scalar scalar_parse(const std::string& text);
std::string scalar_print(const Scalar& s);

}  // namespace flconn
