#include "flconn/micro.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "flconn/series.hpp"

namespace flconn {

// ---------------------------------------------------------------------------
// Weyl operators
// ---------------------------------------------------------------------------

namespace {

void weyl_add_term(WeylOperator& op, std::pair<int, int> key, const Scalar& c) {
  if (c.syntactically_zero()) return;
  auto [it, inserted] = op.terms.emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second.syntactically_zero()) op.terms.erase(it);
  }
}

void check_same_space(int a, int b) {
  if (a != b)
    fail(Errc::ChartMismatch, "operators live in different charts: " +
                                  SymbolTable::instance().name(a) + " vs " +
                                  SymbolTable::instance().name(b));
}

Rational binomial(int n, int k) {
  Rational out(1);
  for (int i = 0; i < k; ++i) out *= Rational(n - i, i + 1);
  return out;
}

Rational falling(int n, int k) {
  Rational out(1);
  for (int i = 0; i < k; ++i) out *= Rational(n - i);
  return out;
}

}  // namespace

WeylOperator weyl_make(int space, std::map<std::pair<int, int>, Scalar> terms) {
  WeylOperator out;
  out.space = space;
  for (auto& [key, c] : terms) {
    if (key.first < 0 || key.second < 0)
      fail(Errc::InternalCheckFailure,
           "Weyl operators carry non-negative exponents only");
    weyl_add_term(out, key, c);
  }
  return out;
}

WeylOperator weyl_make(const std::string& space,
                       std::map<std::pair<int, int>, Scalar> terms) {
  return weyl_make(SymbolTable::instance().intern(space), std::move(terms));
}

WeylOperator weyl_add(const WeylOperator& a, const WeylOperator& b) {
  check_same_space(a.space, b.space);
  WeylOperator out = a;
  for (const auto& [key, c] : b.terms) weyl_add_term(out, key, c);
  return out;
}

WeylOperator weyl_sub(const WeylOperator& a, const WeylOperator& b) {
  return weyl_add(a, weyl_scale(Scalar(-1), b));
}

WeylOperator weyl_scale(const Scalar& c, const WeylOperator& a) {
  WeylOperator out;
  out.space = a.space;
  if (c.syntactically_zero()) return out;
  for (const auto& [key, v] : a.terms) out.terms.emplace(key, c * v);
  return out;
}

WeylOperator weyl_mul(const WeylOperator& a, const WeylOperator& b) {
  check_same_space(a.space, b.space);
  WeylOperator out;
  out.space = a.space;
  for (const auto& [ka, ca] : a.terms) {
    const auto [a1, b1] = ka;
    for (const auto& [kb, cb] : b.terms) {
      const auto [a2, b2] = kb;
      // d^b1 x^a2 = sum_k C(b1,k) (a2)_k x^(a2-k) d^(b1-k)
      int kmax = std::min(b1, a2);
      for (int k = 0; k <= kmax; ++k) {
        Rational f = binomial(b1, k) * falling(a2, k);
        if (f == 0) continue;
        weyl_add_term(out, {a1 + a2 - k, b1 + b2 - k}, ca * cb * Scalar(f));
      }
    }
  }
  return out;
}

bool weyl_equal(const WeylOperator& a, const WeylOperator& b) {
  WeylOperator d = weyl_sub(a, b);
  for (const auto& [key, c] : d.terms) {
    (void)key;
    if (!scalar_is_zero(c)) return false;
  }
  return true;
}

WeylOperator weyl_fourier(const WeylOperator& a, int target_space) {
  WeylOperator out;
  out.space = target_space;
  for (const auto& [key, c] : a.terms) {
    const auto [xa, db] = key;
    // x^a d^b -> (-d')^a y^b, then normal order:
    // d'^a y^b = sum_k C(a,k) (b)_k y^(b-k) d'^(a-k)
    int kmax = std::min(xa, db);
    Rational sign = (xa % 2 == 0) ? Rational(1) : Rational(-1);
    for (int k = 0; k <= kmax; ++k) {
      Rational f = sign * binomial(xa, k) * falling(db, k);
      if (f == 0) continue;
      weyl_add_term(out, {db - k, xa - k}, c * Scalar(f));
    }
  }
  return out;
}

WeylOperator weyl_sign_flip(const WeylOperator& a) {
  WeylOperator out;
  out.space = a.space;
  for (const auto& [key, c] : a.terms) {
    Rational sign = ((key.first + key.second) % 2 == 0) ? Rational(1) : Rational(-1);
    out.terms.emplace(key, c * Scalar(sign));
  }
  return out;
}

std::string weyl_print(const WeylOperator& a) {
  if (a.terms.empty()) return "0";
  const std::string x = SymbolTable::instance().name(a.space);
  const std::string d = "d" + x;
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : a.terms) {
    const auto [xa, db] = key;
    bool neg = !c.num().terms().empty() && c.num().terms().rbegin()->second < 0;
    Scalar disp = neg ? -c : c;
    std::string cs = scalar_print(disp);
    std::vector<std::string> parts;
    bool coeff_one = disp.is_rational() && disp.rational_value() == 1;
    if (!coeff_one || (xa == 0 && db == 0)) parts.push_back(cs);
    if (xa > 0) parts.push_back(xa == 1 ? x : x + "^" + std::to_string(xa));
    if (db > 0) parts.push_back(db == 1 ? d : d + "^" + std::to_string(db));
    if (parts.size() > 1 && parts[0] == cs && cs.find(' ') != std::string::npos)
      parts[0] = "(" + cs + ")";
    std::string body;
    for (size_t i = 0; i < parts.size(); ++i)
      body += (i ? "*" : "") + parts[i];
    if (first) {
      os << (neg ? "-" : "") << body;
      first = false;
    } else {
      os << (neg ? " - " : " + ") << body;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Microlocal operators
// ---------------------------------------------------------------------------

namespace {

int tr_add(int t, int k) { return t >= kExactOrder ? t : t + k; }

void micro_add_term(MicroOperator& op, std::pair<int, int> key, const Scalar& c) {
  if (c.syntactically_zero()) return;
  if (key.first >= op.s_trunc || key.second >= op.j_trunc) return;
  auto [it, inserted] = op.terms.emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second.syntactically_zero()) op.terms.erase(it);
  }
}

void refresh_extended(MicroOperator& op) {
  if (op.chart != Chart::AtInfinity) {
    op.extended = false;
    return;
  }
  for (const auto& [key, c] : op.terms) {
    (void)c;
    if (key.first < 0) {
      op.extended = true;
      return;
    }
  }
  // keep a caller-set extended flag; it only widens the ring
}

void check_compatible(const MicroOperator& a, const MicroOperator& b) {
  if (a.chart != b.chart)
    fail(Errc::ChartMismatch, "microlocal charts differ");
  check_same_space(a.space, b.space);
}

int min_j(const MicroOperator& a) {
  if (a.terms.empty()) return a.j_trunc;
  int best = a.terms.begin()->first.second;
  for (const auto& [key, c] : a.terms) {
    (void)c;
    best = std::min(best, key.second);
  }
  return best;
}

int min_s(const MicroOperator& a) {
  if (a.terms.empty()) return a.s_trunc;
  return a.terms.begin()->first.first;  // keys sorted by s first
}

bool strictly_zero(const MicroOperator& a) {
  return a.terms.empty() && a.j_trunc >= kExactOrder &&
         a.s_trunc >= kExactOrder;
}

struct Expansion {
  // (space exponent, hw exponent) -> rational factor for hw^j * x^s
  std::map<std::pair<int, int>, Rational> terms;
  bool cut = false;  // true when an infinite hw tail was pruned
};

// Normal-orders hw^j * x^s in the given chart, keeping hw exponents <= jlimit.
//   AtZero:     hw * x^s hw^i = sum_k (-1)^k s(s-1)..(s-k+1) x^(s-k) hw^(i+k+1)
//   AtInfinity: hw * x^s hw^i = sum_k s(s+1)..(s+k-1)  x^(s+k) hw^(i+k+1)
// and the inverse direction (j < 0) applies d = hw^{-1} term by term.
Expansion commute_hw_past(Chart chart, int j, int s, int jlimit) {
  Expansion e;
  e.terms[{s, 0}] = 1;
  if (j == 0) return e;
  if (j > 0) {
    for (int step = 0; step < j; ++step) {
      int remaining = j - step - 1;
      std::map<std::pair<int, int>, Rational> next;
      for (const auto& [key, c] : e.terms) {
        const auto [sp, jp] = key;
        Rational factor(1);
        for (int k = 0;; ++k) {
          if (k > 0) {
            Rational step_factor = (chart == Chart::AtZero)
                                       ? Rational(k - 1 - sp)
                                       : Rational(sp + k - 1);
            factor *= step_factor;
            if (factor == 0) break;
          }
          int jj = jp + k + 1;
          if (jj + remaining > jlimit) {
            e.cut = true;
            break;
          }
          int ss = (chart == Chart::AtZero) ? sp - k : sp + k;
          auto [it, inserted] = next.emplace(std::make_pair(ss, jj), c * factor);
          if (!inserted) it->second += c * factor;
        }
      }
      e.terms = std::move(next);
    }
  } else {
    for (int step = 0; step < -j; ++step) {
      std::map<std::pair<int, int>, Rational> next;
      for (const auto& [key, c] : e.terms) {
        const auto [sp, jp] = key;
        auto bump = [&next](std::pair<int, int> k2, const Rational& v) {
          if (v == 0) return;
          auto [it, inserted] = next.emplace(k2, v);
          if (!inserted) it->second += v;
        };
        bump({sp, jp - 1}, c);
        if (sp != 0) {
          if (chart == Chart::AtZero)
            bump({sp - 1, jp}, c * Rational(sp));
          else
            bump({sp + 1, jp}, c * Rational(-sp));
        }
      }
      e.terms = std::move(next);
    }
  }
  for (auto it = e.terms.begin(); it != e.terms.end();) {
    if (it->second == 0)
      it = e.terms.erase(it);
    else
      ++it;
  }
  return e;
}

}  // namespace

int MicroOperator::min_order() const { return min_j(*this); }

Scalar MicroOperator::coeff(int s, int j) const {
  if (s >= s_trunc || j >= j_trunc)
    fail(Errc::TruncationTooCoarse,
         "coefficient (space^" + std::to_string(s) + ", hw^" + std::to_string(j) +
             ") is beyond the truncation bounds");
  auto it = terms.find({s, j});
  return it == terms.end() ? Scalar(0) : it->second;
}

MicroOperator micro_make(Chart chart, int space,
                         std::map<std::pair<int, int>, Scalar> terms,
                         bool extended, int j_trunc, int s_trunc) {
  MicroOperator out;
  out.chart = chart;
  out.space = space;
  out.extended = extended && chart == Chart::AtInfinity;
  out.j_trunc = std::min(j_trunc, kExactOrder);
  out.s_trunc = std::min(s_trunc, kExactOrder);
  for (auto& [key, c] : terms) micro_add_term(out, key, c);
  refresh_extended(out);
  return out;
}

MicroOperator micro_identity(Chart chart, int space) {
  return micro_make(chart, space, {{{0, 0}, Scalar(1)}}, false, kExactOrder,
                    kExactOrder);
}

MicroOperator micro_term(Chart chart, int space, int s, int j, const Scalar& c) {
  return micro_make(chart, space, {{{s, j}, c}}, false, kExactOrder,
                    kExactOrder);
}

MicroOperator micro_dw(int space) {
  return micro_term(Chart::AtInfinity, space, -2, -1, Scalar(-1));
}

MicroOperator micro_dz(int space) {
  return micro_term(Chart::AtZero, space, 0, -1, Scalar(1));
}

MicroOperator micro_add(const MicroOperator& a, const MicroOperator& b) {
  check_compatible(a, b);
  MicroOperator out;
  out.chart = a.chart;
  out.space = a.space;
  out.extended = a.extended || b.extended;
  out.j_trunc = std::min(a.j_trunc, b.j_trunc);
  out.s_trunc = std::min(a.s_trunc, b.s_trunc);
  for (const auto& [key, c] : a.terms) micro_add_term(out, key, c);
  for (const auto& [key, c] : b.terms) micro_add_term(out, key, c);
  refresh_extended(out);
  return out;
}

MicroOperator micro_scale(const Scalar& c, const MicroOperator& a) {
  MicroOperator out = a;
  out.terms.clear();
  if (c.syntactically_zero()) {
    out.j_trunc = kExactOrder;
    out.s_trunc = kExactOrder;
    return out;
  }
  for (const auto& [key, v] : a.terms) out.terms.emplace(key, c * v);
  return out;
}

MicroOperator micro_sub(const MicroOperator& a, const MicroOperator& b) {
  return micro_add(a, micro_scale(Scalar(-1), b));
}

MicroOperator micro_product(const MicroOperator& a, const MicroOperator& b) {
  check_compatible(a, b);
  MicroOperator out;
  out.chart = a.chart;
  out.space = a.space;
  out.extended = a.extended || b.extended;
  if (strictly_zero(a) || strictly_zero(b)) {
    out.j_trunc = kExactOrder;
    out.s_trunc = kExactOrder;
    return out;
  }
  int jT = std::min(tr_add(a.j_trunc, min_j(b)), tr_add(b.j_trunc, min_j(a)));
  int sT = std::min(tr_add(a.s_trunc, min_s(b)), tr_add(b.s_trunc, min_s(a)));
  bool j_exact = jT >= kExactOrder;
  int jT_eff = j_exact ? kDefaultHwTrunc : jT;
  out.j_trunc = jT_eff;  // provisional; restored to exact if no cut happens
  out.s_trunc = sT;
  bool cut = false;
  for (const auto& [ka, ca] : a.terms) {
    const auto [s1, j1] = ka;
    for (const auto& [kb, cb] : b.terms) {
      const auto [s2, j2] = kb;
      Expansion e = commute_hw_past(a.chart, j1, s2, jT_eff - j2 - 1);
      cut = cut || e.cut;
      Scalar cc = ca * cb;
      for (const auto& [key, f] : e.terms) {
        const auto [ss, jj] = key;
        micro_add_term(out, {s1 + ss, j2 + jj}, cc * Scalar(f));
      }
    }
  }
  if (j_exact && !cut) out.j_trunc = kExactOrder;
  if (a.chart == Chart::AtZero && sT < kExactOrder) {
    // At zero, commuting hw past the space variable lowers space exponents,
    // so an unknown space tail contaminates exponents below the naive bound
    // by up to the hw window it can spread across.
    bool pos_hw = false;
    for (const auto& [key, c] : a.terms) {
      (void)c;
      pos_hw = pos_hw || key.second > 0;
    }
    for (const auto& [key, c] : b.terms) {
      (void)c;
      pos_hw = pos_hw || key.second > 0;
    }
    int jK = out.j_trunc;
    if (jK >= kExactOrder) {
      int extent = 0;
      for (const auto& [key, c] : out.terms) {
        (void)c;
        extent = std::max(extent, key.second + 1);
      }
      jK = pos_hw ? std::max(kDefaultHwTrunc, extent) : extent;
      if (pos_hw) out.j_trunc = jK;
    }
    int spread = jK - min_j(a) - min_j(b);
    int drops = std::max(0, -min_j(a)) + std::max(0, -min_j(b));
    int window = std::max({spread, drops, 0});
    out.s_trunc = sT - window;
    for (auto it = out.terms.begin(); it != out.terms.end();)
      it = (it->first.first >= out.s_trunc || it->first.second >= out.j_trunc)
               ? out.terms.erase(it)
               : ++it;
  }
  refresh_extended(out);
  return out;
}

bool micro_same_known(const MicroOperator& a, const MicroOperator& b) {
  MicroOperator d = micro_sub(a, b);
  for (const auto& [key, c] : d.terms) {
    (void)key;
    if (!scalar_is_zero(c)) return false;
  }
  return true;
}

MicroOperator micro_invert(const MicroOperator& a) {
  if (a.terms.empty())
    fail(Errc::NotFormallyInvertible, "cannot invert an operator with no terms");
  int i0 = min_j(a);
  // Leading hw slice must be a single monomial c0 * x^s0 * hw^i0.
  int s0 = 0;
  Scalar c0(0);
  int found = 0;
  for (const auto& [key, c] : a.terms) {
    if (key.second == i0) {
      ++found;
      s0 = key.first;
      c0 = c;
    }
  }
  if (found != 1)
    fail(Errc::NotFormallyInvertible,
         "leading hw-order slice is not a single monomial");
  MicroOperator linv = micro_product(
      micro_term(a.chart, a.space, 0, -i0, Scalar(1)),
      micro_term(a.chart, a.space, -s0, 0, Scalar(1) / c0));
  MicroOperator n = micro_sub(micro_identity(a.chart, a.space),
                              micro_product(linv, a));
  if (!n.terms.empty() && min_j(n) < 1)
    fail(Errc::NotFormallyInvertible,
         "remainder does not gain hw-order; leading part is not dominant");
  int jwindow = (n.j_trunc >= kExactOrder) ? kDefaultHwTrunc : n.j_trunc;
  MicroOperator acc = micro_identity(a.chart, a.space);
  acc.j_trunc = n.j_trunc;
  acc.s_trunc = n.s_trunc;
  MicroOperator p = n;
  while (!p.terms.empty() && min_j(p) < jwindow) {
    acc = micro_add(acc, p);
    p = micro_product(n, p);
  }
  if (!p.terms.empty() && acc.j_trunc > jwindow) {
    // The geometric series was cut at the window; everything at or beyond it
    // is unknown even though the summands were exact.
    acc.j_trunc = jwindow;
    for (auto it = acc.terms.begin(); it != acc.terms.end();)
      it = (it->first.second >= jwindow) ? acc.terms.erase(it) : ++it;
  }
  return micro_product(acc, linv);
}

// ---------------------------------------------------------------------------
// Membership diagnostic
// ---------------------------------------------------------------------------

MembershipReport micro_membership(const MicroOperator& a) {
  if (a.j_trunc < kMinDiagnosticWindow)
    fail(Errc::TruncationTooCoarse,
         "membership diagnostic needs an hw window of at least " +
             std::to_string(kMinDiagnosticWindow) + " orders");
  MembershipReport report;
  for (const auto& [key, c] : a.terms) {
    (void)c;
    auto [s, j] = key;
    auto [it, inserted] = report.profile.emplace(j, s);
    if (!inserted) it->second = std::min(it->second, s);
  }
  if (report.profile.empty()) {
    report.verdict = Membership::InRing;
    return report;
  }
  bool has_negative = false;
  for (const auto& [j, s] : report.profile) {
    (void)j;
    if (s < 0) has_negative = true;
  }
  if (a.chart == Chart::AtZero || !a.extended) {
    // Coefficients must be power series in the space variable.
    report.verdict = has_negative ? Membership::Escapes : Membership::InRing;
    return report;
  }
  // Extended ring at infinity: finitely many negative powers are fine; the
  // question is whether the minimal space exponent stays bounded below.
  if (!has_negative) {
    report.verdict = Membership::InRing;
    return report;
  }
  std::vector<std::pair<int, int>> entries(report.profile.begin(),
                                           report.profile.end());
  if (entries.size() < 4) {
    report.verdict = Membership::Inconclusive;
    return report;
  }
  // The question is how low the space exponents eventually go, so the
  // relevant quantity is the running minimum of the profile: commutator
  // corrections spread a single descent over several hw orders (staircases,
  // two interleaved parities for ramified relations), but the running
  // minimum either keeps dropping through the tail of the window (escape)
  // or stabilizes (finitely many negative powers).
  std::vector<int> env(entries.size());
  int running = entries.front().second;
  for (size_t i = 0; i < entries.size(); ++i) {
    running = std::min(running, entries[i].second);
    env[i] = running;
  }
  size_t tail_len = std::max<size_t>(3, entries.size() / 2);
  size_t split = entries.size() - tail_len;
  int tail_drops = 0;
  for (size_t i = split; i < env.size(); ++i)
    if (env[i] < env[i - 1]) ++tail_drops;
  if (env.back() < env[split - 1] && tail_drops >= 2)
    report.verdict = Membership::Escapes;
  else if (env.back() == env[split - 1])
    report.verdict = Membership::InRing;
  else
    report.verdict = Membership::Inconclusive;
  return report;
}

MembershipReport micro_membership_checked(const MicroOperator& a,
                                          Membership expected) {
  MembershipReport report = micro_membership(a);
  if (report.verdict == expected) return report;
  if (report.verdict == Membership::Inconclusive)
    fail(Errc::TruncationTooCoarse,
         "membership window too short to confirm the closed-form verdict");
  fail(Errc::OracleDisagreement,
       "membership diagnostic contradicts the closed-form slope criterion:\n" +
           micro_profile_table(a));
}

// ---------------------------------------------------------------------------
// Printing and self-checks
// ---------------------------------------------------------------------------

std::string micro_print(const MicroOperator& a) {
  const std::string x = SymbolTable::instance().name(a.space);
  std::vector<std::pair<std::pair<int, int>, Scalar>> items;  // ((j, s), c)
  for (const auto& [key, c] : a.terms)
    items.push_back({{key.second, key.first}, c});
  std::sort(items.begin(), items.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  std::ostringstream os;
  bool first = true;
  for (const auto& [jk, c] : items) {
    const auto [j, s] = jk;
    bool neg = !c.num().terms().empty() && c.num().terms().rbegin()->second < 0;
    Scalar disp = neg ? -c : c;
    std::string cs = scalar_print(disp);
    bool coeff_one = disp.is_rational() && disp.rational_value() == 1;
    std::vector<std::string> parts;
    if (!coeff_one || (s == 0 && j == 0)) parts.push_back(cs);
    if (s != 0) parts.push_back(s == 1 ? x : x + "^" + std::to_string(s));
    if (j != 0) parts.push_back(j == 1 ? "hw" : "hw^" + std::to_string(j));
    if (parts.size() > 1 && parts[0] == cs && cs.find(' ') != std::string::npos)
      parts[0] = "(" + cs + ")";
    std::string body;
    for (size_t i = 0; i < parts.size(); ++i) body += (i ? "*" : "") + parts[i];
    if (first) {
      os << (neg ? "-" : "") << body;
      first = false;
    } else {
      os << (neg ? " - " : " + ") << body;
    }
  }
  if (first) os << "0";
  if (a.j_trunc < kExactOrder || a.s_trunc < kExactOrder) {
    os << " + O(hw^" << a.j_trunc << ", " << x << "^" << a.s_trunc << ")";
  }
  return os.str();
}

std::string micro_profile_table(const MicroOperator& a) {
  std::map<int, int> mins;
  for (const auto& [key, c] : a.terms) {
    (void)c;
    auto [it, inserted] = mins.emplace(key.second, key.first);
    if (!inserted) it->second = std::min(it->second, key.first);
  }
  const std::string x = SymbolTable::instance().name(a.space);
  std::ostringstream os;
  for (const auto& [j, s] : mins)
    os << "hw^" << j << ": min " << x << "-exponent " << s << "\n";
  return os.str();
}

void verify_chart_identities() {
  auto& table = SymbolTable::instance();
  int z = table.intern("z");
  int w = table.intern("w");
  // [d_z, z] = 1 at zero.
  MicroOperator dz = micro_dz(z);
  MicroOperator zz = micro_term(Chart::AtZero, z, 1, 0, Scalar(1));
  MicroOperator comm = micro_sub(micro_product(dz, zz), micro_product(zz, dz));
  if (!micro_same_known(comm, micro_identity(Chart::AtZero, z)))
    fail(Errc::InternalCheckFailure, "[d_z, z] != 1 at zero");
  // [d_w, w] = 1 at infinity with d_w = -w^{-2} hw^{-1}.
  MicroOperator dw = micro_dw(w);
  MicroOperator ww = micro_term(Chart::AtInfinity, w, 1, 0, Scalar(1));
  MicroOperator commw = micro_sub(micro_product(dw, ww), micro_product(ww, dw));
  if (!micro_same_known(commw, micro_identity(Chart::AtInfinity, w)))
    fail(Errc::InternalCheckFailure, "[d_w, w] != 1 at infinity");
  // d_w^{-1} = -hw w^2 on both sides.
  MicroOperator dwinv = micro_product(
      micro_term(Chart::AtInfinity, w, 0, 1, Scalar(-1)),
      micro_term(Chart::AtInfinity, w, 2, 0, Scalar(1)));
  if (!micro_same_known(micro_product(dw, dwinv),
                        micro_identity(Chart::AtInfinity, w)) ||
      !micro_same_known(micro_product(dwinv, dw),
                        micro_identity(Chart::AtInfinity, w)))
    fail(Errc::InternalCheckFailure, "d_w^{-1} != -hw w^2");
  // hw w^{-1} - w^{-1} hw = -hw^2.
  MicroOperator hw = micro_term(Chart::AtInfinity, w, 0, 1, Scalar(1));
  MicroOperator winv = micro_term(Chart::AtInfinity, w, -1, 0, Scalar(1));
  MicroOperator lhs = micro_sub(micro_product(hw, winv), micro_product(winv, hw));
  MicroOperator rhs = micro_term(Chart::AtInfinity, w, 0, 2, Scalar(-1));
  if (!micro_same_known(lhs, rhs))
    fail(Errc::InternalCheckFailure, "[hw, w^{-1}] != -hw^2");
}

}  // namespace flconn
