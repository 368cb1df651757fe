#include "flconn/series.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

namespace flconn {

namespace {

constexpr int kDefaultWindow = 24;  // expansion window for exact inputs

int tr_min(int a, int b) { return std::min(a, b); }

int tr_add(int t, int k) {
  if (t >= kExactOrder) return kExactOrder;
  return t + k;
}

// Ceiling division that is correct for negative numerators.
int cdiv(int a, int b) {
  int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) return q;  // already floored toward 0
  if (a % b != 0) return q + 1;
  return q;
}

void check_same_coord(const LaurentSeries& a, const LaurentSeries& b) {
  if (a.coord != b.coord)
    fail(Errc::CoordinateMismatch,
         "series in " + SymbolTable::instance().name(a.coord) + " vs " +
             SymbolTable::instance().name(b.coord));
}

}  // namespace

Scalar LaurentSeries::coeff(int exp) const {
  if (exp >= trunc)
    fail(Errc::TruncationTooCoarse,
         "coefficient of " + SymbolTable::instance().name(coord) + "^" +
             std::to_string(exp) + " is beyond the truncation bound " +
             std::to_string(trunc));
  auto it = terms.find(exp);
  return it == terms.end() ? Scalar(0) : it->second;
}

LaurentSeries make_series(int coord, std::map<int, Scalar> terms, int trunc) {
  LaurentSeries out;
  out.coord = coord;
  out.trunc = std::min(trunc, kExactOrder);
  for (auto& [exp, c] : terms)
    if (exp < out.trunc && !c.syntactically_zero()) out.terms.emplace(exp, c);
  return out;
}

LaurentSeries make_series(const std::string& coord, std::map<int, Scalar> terms,
                          int trunc) {
  return make_series(SymbolTable::instance().intern(coord), std::move(terms), trunc);
}

LaurentSeries series_monomial(int coord, int exp, const Scalar& c) {
  return make_series(coord, {{exp, c}});
}

LaurentSeries series_zero(int coord) { return make_series(coord, {}); }

void series_set_trunc(LaurentSeries& s, int trunc) {
  s.trunc = std::min(trunc, kExactOrder);
  s.terms.erase(s.terms.lower_bound(s.trunc), s.terms.end());
}

LaurentSeries series_neg(const LaurentSeries& a) {
  LaurentSeries out = a;
  for (auto& [exp, c] : out.terms) {
    (void)exp;
    c = -c;
  }
  return out;
}

LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b) {
  check_same_coord(a, b);
  LaurentSeries out;
  out.coord = a.coord;
  out.trunc = tr_min(a.trunc, b.trunc);
  for (const auto& [exp, c] : a.terms)
    if (exp < out.trunc) out.terms.emplace(exp, c);
  for (const auto& [exp, c] : b.terms) {
    if (exp >= out.trunc) continue;
    auto [it, inserted] = out.terms.emplace(exp, c);
    if (!inserted) {
      it->second += c;
      if (it->second.syntactically_zero()) out.terms.erase(it);
    }
  }
  return out;
}

LaurentSeries series_sub(const LaurentSeries& a, const LaurentSeries& b) {
  return series_add(a, series_neg(b));
}

LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b) {
  check_same_coord(a, b);
  LaurentSeries out;
  out.coord = a.coord;
  if ((a.terms.empty() && a.trunc >= kExactOrder) ||
      (b.terms.empty() && b.trunc >= kExactOrder)) {
    return out;  // exactly zero
  }
  out.trunc = tr_min(tr_add(b.trunc, a.valuation()), tr_add(a.trunc, b.valuation()));
  for (const auto& [ea, ca] : a.terms)
    for (const auto& [eb, cb] : b.terms) {
      int exp = ea + eb;
      if (exp >= out.trunc) continue;
      Scalar prod = ca * cb;
      auto [it, inserted] = out.terms.emplace(exp, prod);
      if (!inserted) {
        it->second += prod;
        if (it->second.syntactically_zero()) out.terms.erase(it);
      }
    }
  return out;
}

LaurentSeries series_scale(const Scalar& c, const LaurentSeries& a) {
  if (c.syntactically_zero()) return series_zero(a.coord);
  LaurentSeries out = a;
  for (auto& [exp, v] : out.terms) {
    (void)exp;
    v = c * v;
  }
  return out;
}

LaurentSeries series_shift(const LaurentSeries& a, int k) {
  LaurentSeries out;
  out.coord = a.coord;
  out.trunc = tr_add(a.trunc, k);
  for (const auto& [exp, c] : a.terms) out.terms.emplace(exp + k, c);
  return out;
}

LaurentSeries series_stretch(const LaurentSeries& a, int k) {
  LaurentSeries out;
  out.coord = a.coord;
  out.trunc = a.trunc >= kExactOrder ? kExactOrder : a.trunc * k;
  for (const auto& [exp, c] : a.terms) out.terms.emplace(exp * k, c);
  return out;
}

LaurentSeries series_invert(const LaurentSeries& a) {
  if (a.terms.empty()) {
    if (a.trunc >= kExactOrder)
      fail(Errc::ZeroLeadingCoefficient, "cannot invert the zero series");
    fail(Errc::TruncationTooCoarse,
         "cannot invert: no known nonzero coefficient below the truncation bound");
  }
  int v = a.valuation();
  const Scalar c = a.terms.begin()->second;
  // Exact monomial: exact reciprocal.
  if (a.terms.size() == 1 && a.trunc >= kExactOrder)
    return series_monomial(a.coord, -v, Scalar(1) / c);
  int window = a.trunc >= kExactOrder ? kDefaultWindow : a.trunc - v;
  // Unit part u = a / (c x^v) = 1 + sum u_k x^k; invert by the standard
  // recursion d_0 = 1, d_n = -sum_{k=1..n} u_k d_{n-k}.
  std::map<int, Scalar> unit;
  for (const auto& [exp, coefficient] : a.terms)
    if (exp - v < window) unit.emplace(exp - v, coefficient / c);
  std::map<int, Scalar> inv;
  inv.emplace(0, Scalar(1));
  for (int n = 1; n < window; ++n) {
    Scalar s(0);
    for (const auto& [k, uk] : unit) {
      if (k < 1 || k > n) continue;
      auto it = inv.find(n - k);
      if (it != inv.end()) s += uk * it->second;
    }
    if (!s.syntactically_zero()) inv.emplace(n, -s);
  }
  std::map<int, Scalar> shifted;
  Scalar cinv = Scalar(1) / c;
  for (const auto& [exp, d] : inv) shifted.emplace(exp - v, cinv * d);
  return make_series(a.coord, std::move(shifted), window - v);
}

LaurentSeries series_pow(const LaurentSeries& a, int k) {
  if (k < 0) return series_pow(series_invert(a), -k);
  LaurentSeries out = make_series(a.coord, {{0, Scalar(1)}});
  LaurentSeries base = a;
  int n = k;
  while (n > 0) {
    if (n & 1) out = series_mul(out, base);
    n >>= 1;
    if (n > 0) base = series_mul(base, base);
  }
  return out;
}

LaurentSeries series_derive(const LaurentSeries& a) {
  LaurentSeries out;
  out.coord = a.coord;
  out.trunc = a.trunc >= kExactOrder ? kExactOrder : a.trunc - 1;
  for (const auto& [exp, c] : a.terms) {
    if (exp == 0) continue;
    if (exp - 1 < out.trunc) out.terms.emplace(exp - 1, Scalar(exp) * c);
  }
  return out;
}

LaurentSeries series_integrate(const LaurentSeries& a) {
  auto it = a.terms.find(-1);
  if (it != a.terms.end())
    fail(Errc::LogarithmicTerm,
         "antiderivative has a logarithmic term with residue " +
             scalar_print(it->second));
  LaurentSeries out;
  out.coord = a.coord;
  out.trunc = tr_add(a.trunc, 1);
  for (const auto& [exp, c] : a.terms)
    out.terms.emplace(exp + 1, c / Scalar(exp + 1));
  return out;
}

LaurentSeries series_compose(const LaurentSeries& outer, const LaurentSeries& inner) {
  if (inner.valuation() < 1)
    fail(Errc::NotReversible, "composition requires inner valuation >= 1");
  LaurentSeries result = series_zero(inner.coord);
  if (outer.terms.empty() && outer.trunc >= kExactOrder) return result;
  // Accumulate outer_k * inner^k, reusing incremental powers for k >= 0 and
  // inverting the inner series once for k < 0.
  LaurentSeries inv;
  bool have_inv = false;
  LaurentSeries cur = make_series(inner.coord, {{0, Scalar(1)}});
  int cur_exp = 0;
  for (const auto& [k, c] : outer.terms) {
    LaurentSeries piece;
    if (k >= 0) {
      while (cur_exp < k) {
        cur = series_mul(cur, inner);
        ++cur_exp;
      }
      piece = (k == cur_exp) ? cur : series_pow(inner, k);
    } else {
      if (!have_inv) {
        inv = series_invert(inner);
        have_inv = true;
      }
      piece = series_pow(inv, -k);
    }
    result = series_add(result, series_scale(c, piece));
  }
  if (outer.trunc < kExactOrder) {
    int cap = outer.trunc * std::max(inner.valuation(), 1);
    series_set_trunc(result, std::min(result.trunc, cap));
  }
  return result;
}

LaurentSeries series_reversion(const LaurentSeries& a) {
  if (a.terms.empty() || a.valuation() != 1)
    fail(Errc::NotReversible, "reversion requires valuation exactly 1");
  const Scalar c1 = a.terms.begin()->second;
  int window = a.trunc >= kExactOrder ? kDefaultWindow : a.trunc;
  LaurentSeries a_cut = a;
  series_set_trunc(a_cut, window);
  LaurentSeries psi = series_monomial(a.coord, 1, Scalar(1) / c1);
  for (int n = 2; n < window; ++n) {
    LaurentSeries err = series_compose(a_cut, psi);
    Scalar en = n < err.trunc ? err.coeff(n) : Scalar(0);
    if (!en.syntactically_zero())
      psi = series_add(psi, series_monomial(a.coord, n, -(en / c1)));
  }
  psi.trunc = window;
  // Multiply-back guard: the composition must collapse to the identity.
  LaurentSeries check = series_compose(a_cut, psi);
  for (const auto& [exp, c] : check.terms) {
    if (exp == 1) {
      if (!scalar_is_zero(c - Scalar(1)))
        fail(Errc::InternalCheckFailure, "reversion verification failed at order 1");
    } else if (!scalar_is_zero(c)) {
      fail(Errc::InternalCheckFailure,
           "reversion verification failed at order " + std::to_string(exp));
    }
  }
  return psi;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

bool has_top_level_sign(const std::string& s) {
  int depth = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && i > 0 && (c == '+' || c == '-')) return true;
  }
  return false;
}

bool scalar_is_one(const Scalar& s) {
  return s.is_rational() && s.rational_value() == 1;
}

bool leading_negative(const Scalar& s) {
  if (s.num().terms().empty()) return false;
  return s.num().terms().rbegin()->second < 0;
}

}  // namespace

std::string series_print(const LaurentSeries& a) {
  const std::string x = SymbolTable::instance().name(a.coord);
  std::ostringstream os;
  bool first = true;
  for (const auto& [exp, c] : a.terms) {
    bool neg = leading_negative(c);
    Scalar disp = neg ? -c : c;
    std::string cs = scalar_print(disp);
    if (has_top_level_sign(cs)) cs = "(" + cs + ")";
    std::string body;
    if (exp == 0) {
      body = cs;
    } else {
      std::string power = (exp == 1) ? x : x + "^" + std::to_string(exp);
      body = scalar_is_one(disp) ? power : cs + "*" + power;
    }
    if (first) {
      os << (neg ? "-" : "") << body;
      first = false;
    } else {
      os << (neg ? " - " : " + ") << body;
    }
  }
  if (a.trunc < kExactOrder) {
    std::string tail =
        "O(" + x + (a.trunc == 1 ? "" : "^" + std::to_string(a.trunc)) + ")";
    if (first)
      os << tail;
    else
      os << " + " << tail;
  } else if (first) {
    os << "0";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Puiseux series
// ---------------------------------------------------------------------------

int ramified_coordinate(int base_coord, int ram) {
  if (ram == 1) return base_coord;
  auto& table = SymbolTable::instance();
  std::string base = table.name(base_coord);
  std::string name = "u";
  if (ram != 2) name += std::to_string(ram);
  if (base != "w") name += "_" + base;
  return table.intern(name);
}

std::string ramified_relation_string(int base_coord, int ram) {
  if (ram == 1) return "";
  auto& table = SymbolTable::instance();
  return table.name(ramified_coordinate(base_coord, ram)) + "^" +
         std::to_string(ram) + " = " + table.name(base_coord);
}

PuiseuxSeries puiseux_from_laurent(const LaurentSeries& a) {
  return PuiseuxSeries{a.coord, 1, a};
}

PuiseuxSeries puiseux_zero(int base_coord) {
  return PuiseuxSeries{base_coord, 1, series_zero(base_coord)};
}

PuiseuxSeries puiseux_normalize(const PuiseuxSeries& a) {
  if (a.ram == 1) return a;
  int g = a.ram;
  for (const auto& [exp, c] : a.body.terms) {
    (void)c;
    g = std::gcd(g, std::abs(exp));
    if (g == 1) break;
  }
  if (a.body.terms.empty()) g = a.ram;
  if (g == 1) return a;
  int new_ram = a.ram / g;
  LaurentSeries body;
  body.coord = ramified_coordinate(a.base_coord, new_ram);
  body.trunc = a.body.trunc >= kExactOrder ? kExactOrder : cdiv(a.body.trunc, g);
  for (const auto& [exp, c] : a.body.terms) {
    if (exp / g < body.trunc) body.terms.emplace(exp / g, c);
  }
  return PuiseuxSeries{a.base_coord, new_ram, body};
}

PuiseuxSeries puiseux_with_ram(const PuiseuxSeries& a, int ram) {
  if (ram == a.ram) return a;
  if (ram % a.ram != 0)
    fail(Errc::InternalCheckFailure, "ramification refinement must be a multiple");
  int k = ram / a.ram;
  LaurentSeries body = series_stretch(a.body, k);
  body.coord = ramified_coordinate(a.base_coord, ram);
  return PuiseuxSeries{a.base_coord, ram, body};
}

namespace {

void check_same_base(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  if (a.base_coord != b.base_coord)
    fail(Errc::CoordinateMismatch,
         "Puiseux series over " + SymbolTable::instance().name(a.base_coord) +
             " vs " + SymbolTable::instance().name(b.base_coord));
}

}  // namespace

PuiseuxSeries puiseux_neg(const PuiseuxSeries& a) {
  return PuiseuxSeries{a.base_coord, a.ram, series_neg(a.body)};
}

PuiseuxSeries puiseux_add(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  check_same_base(a, b);
  int L = std::lcm(a.ram, b.ram);
  PuiseuxSeries ax = puiseux_with_ram(a, L), bx = puiseux_with_ram(b, L);
  return puiseux_normalize(PuiseuxSeries{a.base_coord, L, series_add(ax.body, bx.body)});
}

PuiseuxSeries puiseux_sub(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  return puiseux_add(a, puiseux_neg(b));
}

PuiseuxSeries puiseux_mul(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  check_same_base(a, b);
  int L = std::lcm(a.ram, b.ram);
  PuiseuxSeries ax = puiseux_with_ram(a, L), bx = puiseux_with_ram(b, L);
  return puiseux_normalize(PuiseuxSeries{a.base_coord, L, series_mul(ax.body, bx.body)});
}

PuiseuxSeries puiseux_scale(const Scalar& c, const PuiseuxSeries& a) {
  return puiseux_normalize(PuiseuxSeries{a.base_coord, a.ram, series_scale(c, a.body)});
}

PuiseuxSeries puiseux_derive(const PuiseuxSeries& a) {
  // da/dtau = (da/du) / (ram * u^(ram-1))
  LaurentSeries jac =
      series_monomial(a.body.coord, a.ram - 1, Scalar(a.ram));
  LaurentSeries body = series_mul(series_derive(a.body), series_invert(jac));
  return puiseux_normalize(PuiseuxSeries{a.base_coord, a.ram, body});
}

PuiseuxSeries puiseux_integrate(const PuiseuxSeries& a) {
  LaurentSeries jac =
      series_monomial(a.body.coord, a.ram - 1, Scalar(a.ram));
  LaurentSeries body = series_integrate(series_mul(a.body, jac));
  return puiseux_normalize(PuiseuxSeries{a.base_coord, a.ram, body});
}

std::pair<int, int> puiseux_valuation(const PuiseuxSeries& a) {
  return {a.body.valuation(), a.ram};
}

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

namespace {

// Floor of the e-th root; exact flag set when root^e == n.  n >= 0.
std::pair<Integer, bool> int_nth_root(const Integer& n, int e) {
  if (n == 0) return {Integer(0), true};
  Integer lo = 1, hi = 1;
  while (boost::multiprecision::pow(hi, static_cast<unsigned>(e)) < n) hi <<= 1;
  while (lo < hi) {
    Integer mid = (lo + hi + 1) >> 1;
    if (boost::multiprecision::pow(mid, static_cast<unsigned>(e)) <= n)
      lo = mid;
    else
      hi = mid - 1;
  }
  return {lo, boost::multiprecision::pow(lo, static_cast<unsigned>(e)) == n};
}

}  // namespace

Scalar scalar_root(const Scalar& c, int e) {
  if (e < 1) fail(Errc::InternalCheckFailure, "root order must be >= 1");
  if (e == 1) return c;
  if (c.syntactically_zero())
    fail(Errc::ZeroLeadingCoefficient, "root of the zero scalar");
  if (c.is_rational()) {
    Rational r = c.rational_value();
    bool negative = r < 0;
    if (!negative || e % 2 == 1) {
      Rational mag = negative ? Rational(-r) : r;
      auto [rn, okn] = int_nth_root(numerator(mag), e);
      auto [rd, okd] = int_nth_root(denominator(mag), e);
      if (okn && okd) {
        Rational root(rn, rd);
        return Scalar(negative ? Rational(-root) : root);
      }
    }
  }
  // Abstract root: fresh radical parameter.  The relation right-hand side
  // must be a rational multiple of a monomial, so fractions are cleared via
  // (beta/D)^e = (r*Mn*D^(e-1)) / D^e = c with D the denominator monomial.
  if (c.num().terms().size() != 1 || c.den().terms().size() != 1)
    fail(Errc::UnsupportedGermShape,
         "cannot take an exact root of a non-monomial scalar: " + scalar_print(c));
  {
    // Radical symbols flatten through their relations first: with
    // beta^m = r*G and k = a*e + m*j, beta^(k/e) = beta^a * (r*G)^(j/e),
    // so beta moves out of the radicand and r^j * G^j (relation-free)
    // joins it.  Solvable whenever gcd(e, m) divides k.
    auto& table = SymbolTable::instance();
    std::map<int, int> expo;
    for (const auto& [sym, k] : c.num().terms().begin()->first)
      expo[sym] += k;
    for (const auto& [sym, k] : c.den().terms().begin()->first)
      expo[sym] -= k;
    Scalar outside(1);
    Scalar reduced(c.num().terms().begin()->second /
                   c.den().terms().begin()->second);
    bool flattened = false;
    for (const auto& [sym, k] : expo) {
      const auto rel = table.relation(sym);
      if (!rel) continue;
      const int m = rel->exponent;
      const int g = std::gcd(e, m);
      if (k % g != 0)
        fail(Errc::UnsupportedGermShape,
             "no representable root: " + table.name(sym) +
                 "^(" + std::to_string(k) + "/" + std::to_string(e) +
                 ") does not flatten through " + table.relation_string(sym));
      // Extended gcd: x*e + y*m = g, then scale to k and normalize j into
      // [0, e/g) for a canonical factorization.
      long x = 1, y = 0, x1 = 0, y1 = 1, a0 = e, b0 = m;
      while (b0 != 0) {
        long q = a0 / b0;
        std::tie(x, x1) = std::make_pair(x1, x - q * x1);
        std::tie(y, y1) = std::make_pair(y1, y - q * y1);
        std::tie(a0, b0) = std::make_pair(b0, a0 - q * b0);
      }
      long j = y * (k / g);
      const long step = e / g;
      j = ((j % step) + step) % step;
      const long a = (k - static_cast<long>(m) * j) / e;
      outside *= scalar_pow(Scalar(Poly::variable(sym), Poly::constant(1)), a);
      Scalar base(rel->coeff);
      for (const auto& [gsym, gexp] : rel->monomial)
        base *= Scalar(Poly::variable(gsym, gexp), Poly::constant(1));
      reduced *= scalar_pow(base, j);
      flattened = true;
    }
    if (flattened) {
      for (const auto& [sym, k] : expo) {
        if (table.relation(sym)) continue;
        reduced *= scalar_pow(
            Scalar(Poly::variable(sym), Poly::constant(1)), k);
      }
      return outside * scalar_root(reduced, e);
    }
  }
  const auto& [mono_n, coeff_n] = *c.num().terms().begin();
  const auto& [mono_d, coeff_d] = *c.den().terms().begin();
  Rational coeff = coeff_n / coeff_d;  // denominator is monic, but stay exact
  Monomial rhs = mono_n;
  Monomial d_pow;
  for (const auto& [sym, exp] : mono_d) d_pow.emplace_back(sym, exp * (e - 1));
  // merge rhs * d_pow (both sorted)
  Poly rhs_poly = Poly::constant(1);
  for (const auto& [sym, exp] : rhs) rhs_poly = rhs_poly * Poly::variable(sym, exp);
  for (const auto& [sym, exp] : d_pow) rhs_poly = rhs_poly * Poly::variable(sym, exp);
  Monomial merged = rhs_poly.terms().begin()->first;
  auto& table = SymbolTable::instance();
  int beta = table.fresh("beta");
  table.bind_root(beta, e, coeff, merged);
  Poly den_mono;
  den_mono.add_term(mono_d, Rational(1));
  return Scalar(Poly::variable(beta), den_mono);
}

PuiseuxSeries puiseux_root(const PuiseuxSeries& a, int e) {
  if (e < 1) fail(Errc::InternalCheckFailure, "root order must be >= 1");
  if (e == 1) return puiseux_normalize(a);
  if (a.body.terms.empty()) {
    if (a.body.trunc >= kExactOrder)
      fail(Errc::ZeroLeadingCoefficient, "root of the zero series");
    fail(Errc::TruncationTooCoarse, "root of a series with no known coefficient");
  }
  int v = a.body.valuation();
  Scalar c = a.body.terms.begin()->second;
  // Pass to ramification a.ram * e, where the root's valuation v is integral.
  int big_ram = a.ram * e;
  LaurentSeries big = series_stretch(a.body, e);
  big.coord = ramified_coordinate(a.base_coord, big_ram);
  int vE = v * e;
  // Unit part 1 + T with val T >= 1 (multiples of e, in fact).
  LaurentSeries unit =
      series_scale(Scalar(1) / c, series_shift(big, -vE));
  LaurentSeries T = series_sub(unit, make_series(big.coord, {{0, Scalar(1)}}));
  if (T.trunc >= kExactOrder && !T.terms.empty())
    series_set_trunc(T, vE >= 0 ? kDefaultWindow * e : kDefaultWindow * e - vE);
  // Binomial series (1+T)^(1/e) = sum binom(1/e, k) T^k.
  LaurentSeries sum = make_series(big.coord, {{0, Scalar(1)}});
  if (!T.terms.empty()) {
    LaurentSeries Tk = T;
    Rational binom(1);
    Rational inv_e = Rational(1, e);
    int tv = T.valuation();
    int bound = T.trunc >= kExactOrder ? kDefaultWindow * e : T.trunc;
    for (int k = 1; tv * k < bound; ++k) {
      binom *= (inv_e - Rational(k - 1)) / Rational(k);
      sum = series_add(sum, series_scale(Scalar(binom), Tk));
      if (tv * (k + 1) < bound) Tk = series_mul(Tk, T);
    }
    if (T.trunc < kExactOrder) series_set_trunc(sum, T.trunc);
  }
  Scalar gamma = scalar_is_zero(c - Scalar(1)) ? Scalar(1) : scalar_root(c, e);
  LaurentSeries body = series_scale(gamma, series_shift(sum, v));
  return puiseux_normalize(PuiseuxSeries{a.base_coord, big_ram, body});
}

std::string puiseux_print(const PuiseuxSeries& a) {
  std::string body = series_print(a.body);
  if (a.ram == 1) return body;
  return body + ", " + ramified_relation_string(a.base_coord, a.ram);
}

}  // namespace flconn
