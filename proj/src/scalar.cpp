#include "flconn/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

namespace flconn {

// ---------------------------------------------------------------------------
// SymbolTable
// ---------------------------------------------------------------------------

SymbolTable& SymbolTable::instance() {
  static SymbolTable table;
  return table;
}

int SymbolTable::intern(const std::string& name) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  relations_.emplace_back(std::nullopt);
  index_.emplace(name, id);
  return id;
}

int SymbolTable::fresh(const std::string& stem) {
  std::lock_guard<std::mutex> lock(mu_);
  for (int k = 1;; ++k) {
    std::string candidate = stem + std::to_string(k);
    if (index_.find(candidate) == index_.end()) {
      int id = static_cast<int>(names_.size());
      names_.push_back(candidate);
      relations_.emplace_back(std::nullopt);
      index_.emplace(candidate, id);
      return id;
    }
  }
}

std::string SymbolTable::name(int id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return names_.at(static_cast<size_t>(id));
}

int SymbolTable::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<int>(names_.size());
}

void SymbolTable::bind_root(int id, int exponent, const Rational& coeff,
                            const Monomial& monomial) {
  std::lock_guard<std::mutex> lock(mu_);
  if (exponent < 2) fail(Errc::InternalCheckFailure, "root exponent must be >= 2");
  if (coeff == 0) fail(Errc::ZeroLeadingCoefficient, "root of zero coefficient");
  if (relations_.at(static_cast<size_t>(id)))
    fail(Errc::InternalCheckFailure,
         "symbol " + names_[static_cast<size_t>(id)] + " already has a relation");
  for (const auto& [sym, exp] : monomial) {
    (void)exp;
    if (relations_.at(static_cast<size_t>(sym)))
      fail(Errc::InternalCheckFailure,
           "root relation right-hand side must use relation-free symbols");
  }
  relations_[static_cast<size_t>(id)] = RootRelation{exponent, coeff, monomial};
}

std::optional<RootRelation> SymbolTable::relation(int id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return relations_.at(static_cast<size_t>(id));
}

std::string SymbolTable::relation_string(int id) const {
  auto rel = relation(id);
  if (!rel) return "";
  std::ostringstream os;
  os << name(id) << "^" << rel->exponent << " = ";
  Poly rhs = Poly::constant(rel->coeff);
  Poly mono = Poly::constant(1);
  for (const auto& [sym, exp] : rel->monomial)
    mono = mono * Poly::variable(sym, exp);
  os << (rhs * mono).str();
  return os.str();
}

// ---------------------------------------------------------------------------
// Monomial helpers
// ---------------------------------------------------------------------------

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      int exp = a[i].second + b[j].second;
      if (exp != 0) out.emplace_back(a[i].first, exp);
      ++i;
      ++j;
    }
  }
  return out;
}

Monomial mono_pow(const Monomial& m, int k) {
  Monomial out;
  out.reserve(m.size());
  for (const auto& [sym, exp] : m) out.emplace_back(sym, exp * k);
  return out;
}

Rational rational_pow(const Rational& r, int k) {
  Rational out(1);
  Rational base = r;
  int n = k;
  if (n < 0) {
    if (r == 0) fail(Errc::DivisionByZero, "0 raised to a negative power");
    base = Rational(1) / r;
    n = -n;
  }
  while (n > 0) {
    if (n & 1) out *= base;
    base *= base;
    n >>= 1;
  }
  return out;
}

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << numerator(r).str();
  if (denominator(r) != 1) os << "/" << denominator(r).str();
  return os.str();
}

// |coeff| * monomial rendered without a leading sign.
std::string term_str_abs(const Rational& coeff, const Monomial& m) {
  Rational c = coeff < 0 ? Rational(-coeff) : coeff;
  if (m.empty()) return rational_str(c);
  std::ostringstream os;
  if (numerator(c) != 1) os << numerator(c).str() << "*";
  bool first = true;
  for (const auto& [sym, exp] : m) {
    if (!first) os << "*";
    first = false;
    os << SymbolTable::instance().name(sym);
    if (exp != 1) os << "^" << exp;
  }
  if (denominator(c) != 1) os << "/" << denominator(c).str();
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly Poly::constant(const Rational& r) {
  Poly p;
  if (r != 0) p.terms_.emplace(Monomial{}, r);
  return p;
}

Poly Poly::variable(int id, int exp) {
  Poly p;
  if (exp == 0) return constant(1);
  p.terms_.emplace(Monomial{{id, exp}}, Rational(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (!is_constant()) fail(Errc::InternalCheckFailure, "non-constant polynomial");
  return terms_.begin()->second;
}

Poly Poly::operator-() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

Poly Poly::operator+(const Poly& o) const {
  Poly out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  out.normalize();
  return out;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  Poly out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) out.add_term(mono_mul(ma, mb), ca * cb);
  out.normalize();
  return out;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Poly::normalize() {
  bool needs_reduction = false;
  const auto& table = SymbolTable::instance();
  for (const auto& [m, c] : terms_) {
    (void)c;
    for (const auto& [sym, exp] : m) {
      auto rel = table.relation(sym);
      if (rel && exp >= rel->exponent) {
        needs_reduction = true;
        break;
      }
    }
    if (needs_reduction) break;
  }
  if (needs_reduction) {
    std::map<Monomial, Rational> reduced;
    for (const auto& [m, c] : terms_) {
      Monomial residual;
      Monomial extra;
      Rational coeff = c;
      for (const auto& [sym, exp] : m) {
        auto rel = table.relation(sym);
        if (rel && exp >= rel->exponent) {
          int q = exp / rel->exponent;
          int r = exp % rel->exponent;
          coeff *= rational_pow(rel->coeff, q);
          extra = mono_mul(extra, mono_pow(rel->monomial, q));
          if (r != 0) residual.emplace_back(sym, r);
        } else {
          residual.emplace_back(sym, exp);
        }
      }
      Monomial full = mono_mul(residual, extra);
      auto [it, inserted] = reduced.emplace(full, coeff);
      if (!inserted) it->second += coeff;
    }
    terms_ = std::move(reduced);
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

void Poly::collect_symbols(std::vector<int>& out) const {
  for (const auto& [m, c] : terms_) {
    (void)c;
    for (const auto& [sym, exp] : m) {
      (void)exp;
      if (std::find(out.begin(), out.end(), sym) == out.end()) out.push_back(sym);
    }
  }
  std::sort(out.begin(), out.end());
}

Rational Poly::evaluate(const std::map<int, Rational>& assignment) const {
  Rational total(0);
  for (const auto& [m, c] : terms_) {
    Rational v = c;
    for (const auto& [sym, exp] : m) {
      auto it = assignment.find(sym);
      if (it == assignment.end())
        fail(Errc::EvaluationPoleExhausted,
             "no rational assignment for symbol " +
                 SymbolTable::instance().name(sym));
      v *= rational_pow(it->second, exp);
    }
    total += v;
  }
  return total;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? "-" : "+");
    }
    os << term_str_abs(c, m);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

namespace {

int min_exponent_of(const Poly& p, int sym) {
  int best = -1;  // -1: not yet seen
  for (const auto& [m, c] : p.terms()) {
    (void)c;
    int exp = 0;
    for (const auto& [s, e] : m)
      if (s == sym) exp = e;
    if (best < 0 || exp < best) best = exp;
    if (best == 0) break;
  }
  return best < 0 ? 0 : best;
}

Poly shift_down(const Poly& p, int sym, int k) {
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    Monomial reduced;
    for (const auto& [s, e] : m) {
      int exp = (s == sym) ? e - k : e;
      if (exp != 0) reduced.emplace_back(s, exp);
    }
    out.add_term(reduced, c);
  }
  return out;
}

Poly scale(const Poly& p, const Rational& r) {
  Poly out;
  for (const auto& [m, c] : p.terms()) out.add_term(m, c * r);
  return out;
}

}  // namespace

Scalar::Scalar(const Rational& r) : num_(Poly::constant(r)), den_(Poly::constant(1)) {}

Scalar::Scalar(const Poly& num, const Poly& den) : num_(num), den_(den) { normalize(); }

Scalar Scalar::param(const std::string& name) {
  return param_id(SymbolTable::instance().intern(name));
}

Scalar Scalar::param_id(int id) {
  return Scalar(Poly::variable(id), Poly::constant(1));
}

Scalar Scalar::rational(long num, long den) {
  if (den == 0) fail(Errc::DivisionByZero, "rational with zero denominator");
  return Scalar(Rational(Integer(num), Integer(den)));
}

bool Scalar::den_is_one() const {
  return den_.is_constant() && den_.constant_value() == 1;
}

void Scalar::normalize() {
  num_.normalize();
  den_.normalize();
  if (den_.is_zero()) fail(Errc::DivisionByZero, "zero denominator");
  if (num_.is_zero()) {
    den_ = Poly::constant(1);
    return;
  }
  std::vector<int> syms;
  num_.collect_symbols(syms);
  std::vector<int> den_syms;
  den_.collect_symbols(den_syms);
  for (int sym : den_syms)
    if (std::find(syms.begin(), syms.end(), sym) == syms.end()) syms.push_back(sym);
  for (int sym : syms) {
    int c = std::min(min_exponent_of(num_, sym), min_exponent_of(den_, sym));
    if (c > 0) {
      num_ = shift_down(num_, sym, c);
      den_ = shift_down(den_, sym, c);
    }
  }
  Rational lead = den_.terms().rbegin()->second;
  if (lead != 1) {
    Rational inv = Rational(1) / lead;
    num_ = scale(num_, inv);
    den_ = scale(den_, inv);
  }
}

Scalar Scalar::operator-() const {
  Scalar out = *this;
  out.num_ = -out.num_;
  return out;
}

Scalar Scalar::operator+(const Scalar& o) const {
  return Scalar(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Scalar Scalar::operator-(const Scalar& o) const {
  return Scalar(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Scalar Scalar::operator*(const Scalar& o) const {
  return Scalar(num_ * o.num_, den_ * o.den_);
}

Scalar Scalar::operator/(const Scalar& o) const {
  if (o.num_.is_zero()) fail(Errc::DivisionByZero, "division by zero scalar");
  return Scalar(num_ * o.den_, den_ * o.num_);
}

bool Scalar::is_rational() const { return num_.is_constant() && den_.is_constant(); }

Rational Scalar::rational_value() const {
  return num_.constant_value() / den_.constant_value();
}

Rational Scalar::evaluate(const std::map<int, Rational>& assignment) const {
  Rational d = den_.evaluate(assignment);
  if (d == 0) fail(Errc::DivisionByZero, "denominator vanishes at sample point");
  return num_.evaluate(assignment) / d;
}

Scalar scalar_pow(const Scalar& base, long e) {
  Scalar out(1);
  Scalar b = base;
  long n = e;
  if (n < 0) {
    b = Scalar(1) / base;
    n = -n;
  }
  while (n > 0) {
    if (n & 1) out *= b;
    b *= b;
    n >>= 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zero test
// ---------------------------------------------------------------------------

namespace {

// Splits a polynomial into components indexed by the radical part of each
// monomial.  Radical symbols keep exponents below their relation order after
// normalization, so distinct radical profiles are linearly independent over
// the relation-free subfield and the polynomial vanishes iff every component
// does.
std::map<Monomial, Poly> radical_components(const Poly& p) {
  const auto& table = SymbolTable::instance();
  std::map<Monomial, Poly> comps;
  for (const auto& [m, c] : p.terms()) {
    Monomial radical, free_part;
    for (const auto& [sym, exp] : m) {
      if (table.relation(sym))
        radical.emplace_back(sym, exp);
      else
        free_part.emplace_back(sym, exp);
    }
    comps[radical].add_term(free_part, c);
  }
  return comps;
}

}  // namespace

bool scalar_is_zero(const Scalar& s, std::uint64_t seed) {
  if (s.syntactically_zero()) return true;
  // Cross-check: a normalized nonzero numerator must evaluate to a nonzero
  // rational somewhere.  Work componentwise over the radical profiles so no
  // irrational values are ever needed.
  auto comps = radical_components(s.num());
  const Poly* witness = nullptr;
  for (const auto& [profile, poly] : comps) {
    (void)profile;
    if (!poly.is_zero()) {
      witness = &poly;
      break;
    }
  }
  if (witness == nullptr)
    fail(Errc::InternalCheckFailure, "normalization left a vanishing numerator");
  std::vector<int> syms;
  witness->collect_symbols(syms);
  std::mt19937_64 rng(seed);
  constexpr int kBudget = 8;
  for (int attempt = 0; attempt < kBudget; ++attempt) {
    long range = 1000L * (attempt + 1);
    std::uniform_int_distribution<long> num_dist(-range, range);
    std::uniform_int_distribution<long> den_dist(1, 64);
    std::map<int, Rational> assignment;
    for (int sym : syms)
      assignment[sym] = Rational(Integer(num_dist(rng)), Integer(den_dist(rng)));
    if (witness->evaluate(assignment) != 0) return false;
  }
  fail(Errc::InternalCheckFailure,
       "numerator is formally nonzero but vanished at every sample");
}

bool scalar_equal(const Scalar& a, const Scalar& b, std::uint64_t seed) {
  return scalar_is_zero(a - b, seed);
}

// ---------------------------------------------------------------------------
// Parser / printer
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Scalar parse() {
    Scalar result = expr();
    skip_ws();
    if (pos_ != text_.size())
      fail(Errc::ParseError,
           "unexpected trailing input at offset " + std::to_string(pos_));
    return result;
  }

 private:
  Scalar expr() {
    Scalar value = term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        value += term();
      else if (accept('-'))
        value -= term();
      else
        return value;
    }
  }

  Scalar term() {
    Scalar value = factor();
    for (;;) {
      skip_ws();
      if (accept('*'))
        value *= factor();
      else if (accept('/'))
        value /= factor();
      else
        return value;
    }
  }

  Scalar factor() {
    skip_ws();
    if (accept('-')) return -factor();
    Scalar value = atom();
    skip_ws();
    if (accept('^')) {
      skip_ws();
      bool negative = accept('-');
      long e = integer_literal();
      value = scalar_pow(value, negative ? -e : e);
    }
    return value;
  }

  Scalar atom() {
    skip_ws();
    if (accept('(')) {
      Scalar value = expr();
      skip_ws();
      if (!accept(')'))
        fail(Errc::ParseError, "expected ')' at offset " + std::to_string(pos_));
      return value;
    }
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      return Scalar(Rational(Integer(integer_digits())));
    }
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      return Scalar::param(text_.substr(start, pos_ - start));
    }
    fail(Errc::ParseError, "unexpected character at offset " + std::to_string(pos_));
  }

  long integer_literal() {
    std::string digits = integer_digits();
    try {
      return std::stol(digits);
    } catch (const std::exception&) {
      fail(Errc::ParseError, "exponent out of range");
    }
  }

  std::string integer_digits() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_)
      fail(Errc::ParseError, "expected integer at offset " + std::to_string(pos_));
    return text_.substr(start, pos_ - start);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& text_;
  size_t pos_ = 0;
};

bool needs_parens_as_numerator(const Poly& p) { return p.terms().size() > 1; }

// A denominator prints bare only when it is a coefficient-one power of a
// single symbol; anything else would re-parse with the wrong precedence.
bool needs_parens_as_denominator(const Poly& p) {
  if (p.terms().size() != 1) return true;
  const auto& [m, c] = *p.terms().begin();
  return !(c == 1 && m.size() == 1);
}

}  // namespace

Scalar scalar_parse(const std::string& text) { return Parser(text).parse(); }

std::string scalar_print(const Scalar& s) {
  if (s.den_is_one()) return s.num().str();
  std::ostringstream os;
  if (needs_parens_as_numerator(s.num()))
    os << "(" << s.num().str() << ")";
  else
    os << s.num().str();
  os << "/";
  if (needs_parens_as_denominator(s.den()))
    os << "(" << s.den().str() << ")";
  else
    os << s.den().str();
  return os.str();
}

std::string Scalar::str() const { return scalar_print(*this); }

}  // namespace flconn
