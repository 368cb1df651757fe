#include "flconn/local_fl.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "flconn/errors.hpp"

namespace flconn {

namespace {

int sym(const std::string& name) { return SymbolTable::instance().intern(name); }

int rational_int(const Rational& r, Errc code, const std::string& what) {
  if (denominator(r) != 1) fail(code, what + ": " + r.str());
  return (int)numerator(r);
}

}  // namespace

std::string direction_print(FlDirection d) {
  switch (d) {
    case FlDirection::ZeroToInfHat: return "0 -> inf^";
    case FlDirection::InfToZeroHat: return "inf -> 0^";
    case FlDirection::InfToInfHat: return "inf -> inf^";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Numerics
// ---------------------------------------------------------------------------

LocalNumerics numerics_make(std::vector<SlopeEntry> entries) {
  std::map<Rational, int> merged;
  for (const auto& e : entries) {
    if (e.rank <= 0)
      fail(Errc::SlopeOutOfDomain, "pure part with nonpositive rank");
    if (e.slope < 0)
      fail(Errc::SlopeOutOfDomain, "negative slope " + e.slope.str());
    merged[e.slope] += e.rank;
  }
  LocalNumerics n;
  for (const auto& [s, r] : merged) {
    n.slope_multiset.push_back({s, r});
    n.rank += r;
    n.swan += rational_int(s * r, Errc::NonIntegralSwan,
                           "pure part has a fractional Swan conductor");
  }
  return n;
}

LocalNumerics numerics_of_type(const FormalType& t) {
  LocalNumerics n = numerics_make(type_slopes(t));
  if (n.rank != t.rank)
    fail(Errc::InternalCheckFailure,
         "formal type rank disagrees with its summands");
  return n;
}

bool numerics_equal(const LocalNumerics& a, const LocalNumerics& b) {
  if (a.rank != b.rank || a.swan != b.swan) return false;
  if (a.slope_multiset.size() != b.slope_multiset.size()) return false;
  for (size_t i = 0; i < a.slope_multiset.size(); ++i)
    if (a.slope_multiset[i].slope != b.slope_multiset[i].slope ||
        a.slope_multiset[i].rank != b.slope_multiset[i].rank)
      return false;
  return true;
}

std::string numerics_print(const LocalNumerics& n) {
  std::ostringstream os;
  os << "rank " << n.rank << ", swan " << n.swan << ", slopes "
     << slopes_print(n.slope_multiset);
  return os.str();
}

LocalNumerics numeric_local_fl(FlDirection dir, const LocalNumerics& n) {
  // Reject a numerics triple that does not satisfy its own invariant.
  LocalNumerics sane = numerics_make(n.slope_multiset);
  if (sane.rank != n.rank || sane.swan != n.swan)
    fail(Errc::InternalCheckFailure,
         "inconsistent numerics: " + numerics_print(n));

  std::vector<SlopeEntry> out;
  for (const auto& part : n.slope_multiset) {
    const Rational s = part.slope;
    const int r = part.rank;
    const int swan_part = rational_int(
        s * r, Errc::NonIntegralSwan, "pure part has a fractional Swan");
    Rational s_hat;
    int r_hat = 0;
    switch (dir) {
      case FlDirection::ZeroToInfHat:
        s_hat = s / (1 + s);
        r_hat = r + swan_part;
        break;
      case FlDirection::InfToZeroHat:
        if (s >= 1) continue;  // the transform of such a part vanishes
        s_hat = s / (1 - s);
        r_hat = r - swan_part;
        break;
      case FlDirection::InfToInfHat:
        if (s <= 1) continue;  // the transform of such a part vanishes
        s_hat = s / (s - 1);
        r_hat = swan_part - r;
        break;
    }
    if (r_hat < 0 || s_hat * r_hat != Rational(swan_part))
      fail(Errc::InternalCheckFailure,
           "Swan conductor not preserved on a pure part");
    if (r_hat > 0) out.push_back({s_hat, r_hat});
  }
  return numerics_make(out);
}

// ---------------------------------------------------------------------------
// Legendre transform of exponents
// ---------------------------------------------------------------------------

std::string transformed_print(const TransformedSummand& t) {
  std::ostringstream os;
  os << point_print(t.location) << ": ram " << t.summand.ramification
     << " rank " << t.summand.rank << " exponent "
     << puiseux_print(t.summand.exponent) << " [" << t.provenance << "]";
  return os.str();
}

namespace {

LaurentSeries relabel(LaurentSeries s, int coord) {
  s.coord = coord;
  return s;
}

}  // namespace

LegendreResult legendre_exponent(const PuiseuxSeries& q_in, FlDirection dir) {
  const PuiseuxSeries q = exponent_polar_part(q_in);
  if (q.known_zero())
    fail(Errc::SlopeOutOfDomain, "zero exponent has no Legendre transform");
  const auto [val, den] = puiseux_valuation(q);
  const Rational s(-val, den);
  const int d = q.ram;
  if (s <= 0) fail(Errc::SlopeOutOfDomain, "exponent of slope " + s.str());

  const bool from_infinity = dir != FlDirection::ZeroToInfHat;
  if (dir == FlDirection::InfToZeroHat && s >= 1)
    fail(Errc::SlopeOutOfDomain,
         "slope " + s.str() + " is not below 1 for " + direction_print(dir));
  if (dir == FlDirection::InfToInfHat && s < 1)
    fail(Errc::SlopeOutOfDomain,
         "slope " + s.str() + " is below 1 for " + direction_print(dir));

  if (dir == FlDirection::InfToInfHat && s == 1) {
    // Critical points pile up at the finite point -a: q = a w^{-1} + lower
    // order.  Return the location and whatever is left below slope one.
    const Scalar a = q.body.coeff(-d);
    PuiseuxSeries residual = q;
    residual.body.terms.erase(-d);
    residual = exponent_polar_part(residual);
    return {point_finite(-a), residual};
  }

  // Work in the ramified source coordinate v (v^d = local coordinate).
  const LaurentSeries& body = q.body;
  const int vcoord = body.coord;
  const LaurentSeries dbody = series_derive(body);

  // zh = q'(z) as a v-series: z = v^{-d} at infinity, z = v^d at zero.
  LaurentSeries zh;
  if (from_infinity)
    zh = series_scale(Scalar::rational(-1, d),
                      series_mul(series_monomial(vcoord, d + 1, Scalar(1)),
                                 dbody));
  else
    zh = series_scale(Scalar::rational(1, d),
                      series_mul(series_monomial(vcoord, 1 - d, Scalar(1)),
                                 dbody));

  // The target local coordinate: 1/zh toward infinity-hat, zh toward
  // zero-hat; its valuation m is the target ramification index.
  const bool to_infinity = dir != FlDirection::InfToZeroHat;
  const LaurentSeries h = to_infinity ? series_invert(zh) : zh;
  const int m = h.valuation();
  if (m < 1)
    fail(Errc::InternalCheckFailure, "target coordinate has valuation < 1");

  // u = h^{1/m} is an ordinary series of valuation 1 in v; inverting it
  // expresses the critical point v* as a series in the target coordinate.
  PuiseuxSeries wrapped;
  wrapped.base_coord = vcoord;
  wrapped.ram = 1;
  wrapped.body = h;
  const PuiseuxSeries root = puiseux_root(wrapped, m);
  if (root.ram != 1 || root.body.valuation() != 1)
    fail(Errc::InternalCheckFailure, "coordinate root is not an integer series");
  const LaurentSeries vstar = series_reversion(root.body);

  const LaurentSeries zstar = series_pow(vstar, from_infinity ? -d : d);
  const LaurentSeries zh_of_u =
      series_monomial(vcoord, to_infinity ? -m : m, Scalar(1));
  const LaurentSeries qhat_raw =
      series_sub(series_compose(body, vstar), series_mul(zstar, zh_of_u));

  const int target_base = to_infinity ? sym("w") : sym("z");
  PuiseuxSeries qhat;
  qhat.base_coord = target_base;
  qhat.ram = m;
  qhat.body = relabel(qhat_raw, ramified_coordinate(target_base, m));
  qhat = exponent_polar_part(qhat);

  // The achieved slope must match the numeric rule for the direction.
  Rational expected;
  switch (dir) {
    case FlDirection::ZeroToInfHat: expected = s / (1 + s); break;
    case FlDirection::InfToZeroHat: expected = s / (1 - s); break;
    case FlDirection::InfToInfHat: expected = s / (s - 1); break;
  }
  if (qhat.known_zero())
    fail(Errc::InternalCheckFailure, "Legendre transform collapsed to zero");
  const auto [hval, hden] = puiseux_valuation(qhat);
  if (Rational(-hval, hden) != expected)
    fail(Errc::InternalCheckFailure,
         "Legendre slope " + Rational(-hval, hden).str() +
             " does not match the numeric rule " + expected.str());

  return {to_infinity ? point_infinity() : point_finite(Scalar(0)), qhat};
}

PuiseuxSeries exponent_sign_flip(const PuiseuxSeries& q_in) {
  PuiseuxSeries q = puiseux_normalize(q_in);
  if (q.ram % 2 == 0)
    fail(Errc::UnsupportedGermShape,
         "sign flip of an exponent needs an odd ramification index");
  // With u^ram = tau and ram odd, u -> -u covers tau -> -tau.
  for (auto& [e, c] : q.body.terms)
    if (e % 2 != 0) c = -c;
  return q;
}

// ---------------------------------------------------------------------------
// Closed-form rules
// ---------------------------------------------------------------------------

std::vector<TransformedSummand> reg_sing_rule(
    const std::vector<Scalar>& residue_eigenvalues) {
  std::vector<TransformedSummand> out;
  const int w = sym("w");
  for (const auto& lam : residue_eigenvalues) {
    if (scalar_is_zero(lam)) continue;  // the trivial direction dies
    FormalSummand s;
    s.exponent = puiseux_zero(w);
    s.ramification = 1;
    s.rank = 1;
    s.residue_exponents = {lam + Scalar(1)};
    out.push_back({point_infinity(), std::move(s), "reg-sing-rule"});
  }
  return out;
}

std::vector<Scalar> semisimple_residue_eigenvalues(const ConnectionGerm& g) {
  if (g.pole_order() > 1)
    fail(Errc::UnsupportedGermShape,
         "residue eigenvalues of an irregular germ are not the whole story");
  std::vector<Scalar> out(g.rank, Scalar(0));
  const auto it = g.matrix_coefficients.find(-1);
  if (it == g.matrix_coefficients.end()) return out;
  for (int i = 0; i < g.rank; ++i)
    for (int j = 0; j < g.rank; ++j) {
      if (i == j) continue;
      if (!scalar_is_zero(it->second[i][j]))
        fail(Errc::NonSemisimpleResidue,
             "off-diagonal residue entry at (" + std::to_string(i) + ", " +
                 std::to_string(j) + ")");
    }
  for (int i = 0; i < g.rank; ++i) out[i] = it->second[i][i];
  return out;
}

TransformedSummand slope_one_rule(const Scalar& a, const Scalar& c) {
  if (scalar_is_zero(a))
    fail(Errc::ZeroLeadingCoefficient,
         "slope-one rule needs a nonzero leading coefficient");
  FormalSummand s;
  s.exponent = puiseux_zero(sym("z"));
  s.ramification = 1;
  s.rank = 1;
  s.residue_exponents = {c - Scalar(1)};
  return {point_finite(-a), std::move(s), "slope-one-rule"};
}

// ---------------------------------------------------------------------------
// Microlocal rank
// ---------------------------------------------------------------------------

namespace {

int component_closed_rank(const ConnectionGerm& sub, bool at_infinity) {
  int total = 0;
  if (at_infinity) {
    // Only the slope multiset matters: a pure part of slope s and rank r
    // contributes max(swan - rank, 0) = r * max(s - 1, 0).
    for (const auto& e : slopes(sub)) {
      const int swan_part =
          rational_int(e.slope * e.rank, Errc::NonIntegralSwan,
                       "pure part has a fractional Swan conductor");
      total += std::max(swan_part - e.rank, 0);
    }
    return total;
  }
  // At a finite point a summand drops out exactly when it is the trivial
  // germ: zero exponent and all residue exponents known to vanish.
  for (const auto& s : formal_decompose(sub).summands) {
    bool trivial = s.exponent.known_zero();
    for (const auto& r : s.residue_exponents)
      if (!r.has_value() || !scalar_is_zero(*r)) trivial = false;
    if (!trivial) total += s.rank;
  }
  return total;
}

// The relation operator of a one-generator component: d - (polar diagonal).
// At infinity the residue order is excluded (the microlocal module of the
// irregular type; the residue does not enter these presentations), at a
// finite point it is included (it decides triviality).
MicroOperator single_generator_operator(const ConnectionGerm& g, int gen,
                                        Chart chart, int space) {
  MicroOperator op =
      chart == Chart::AtInfinity ? micro_dw(space) : micro_dz(space);
  const int cutoff = chart == Chart::AtInfinity ? -2 : -1;
  for (const auto& [k, mat] : g.matrix_coefficients) {
    if (k > cutoff) continue;
    const Scalar& c = mat[gen][gen];
    if (!scalar_is_zero(c)) op = micro_sub(op, micro_term(chart, space, k, 0, c));
  }
  return op;
}

// Membership witnesses for a coupled component at infinity, one per
// generator: the formal solutions of (d - A) eps = (1, ..., 1) obtained by
// substituting with d^-1.  Rows of the irregular part must each couple to a
// single target generator, so a component is a set of chains hanging onto
// at most one relation cycle.  A chain node's witness is the finite sum
// eps_a = d^-1 (1 + M_a eps_next); a cycle node's witness is the inverse of
// its one-generator reduction d - M_a d^-1 M_t(a) ... d^-1 M_{t^(L-1)(a)},
// which differs from eps_a only by a unit factor of the ring.
std::vector<MicroOperator> component_witnesses(const ConnectionGerm& g,
                                               const std::vector<int>& comp,
                                               int space) {
  const Chart chart = Chart::AtInfinity;
  const int m = (int)comp.size();

  std::vector<int> target(m, -1);
  std::vector<std::optional<MicroOperator>> coupling(m);
  for (const auto& [k, mat] : g.matrix_coefficients) {
    if (k > -2) continue;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        const Scalar& c = mat[comp[a]][comp[b]];
        if (scalar_is_zero(c)) continue;
        if (a == b || (target[a] != -1 && target[a] != b))
          fail(Errc::UnsupportedGermShape,
               "cannot reduce a coupled block whose relations do not form "
               "chains and cycles of single-target rows");
        MicroOperator mono = micro_term(chart, space, k, 0, c);
        coupling[a] =
            coupling[a].has_value() ? micro_add(*coupling[a], mono) : mono;
        target[a] = b;
      }
  }

  const MicroOperator dw = micro_dw(space);
  const MicroOperator inv_dw = micro_invert(dw);
  const MicroOperator one = micro_identity(chart, space);

  // Mark the cycle (single-target rows allow at most one per walk).
  std::vector<int> state(m, 0);  // 0 unseen, 1 on current walk, 2 done
  std::vector<int> on_cycle(m, 0);
  for (int a0 = 0; a0 < m; ++a0) {
    if (state[a0]) continue;
    std::vector<int> walk;
    int v = a0;
    while (v != -1 && state[v] == 0) {
      state[v] = 1;
      walk.push_back(v);
      v = target[v];
    }
    if (v != -1 && state[v] == 1)
      for (size_t i = walk.size(); i-- > 0;) {
        on_cycle[walk[i]] = 1;
        if (walk[i] == v) break;
      }
    for (int u : walk) state[u] = 2;
  }

  std::vector<std::optional<MicroOperator>> wit(m);
  for (int a = 0; a < m; ++a) {
    if (!on_cycle[a]) continue;
    MicroOperator around = *coupling[a];
    for (int v = target[a]; v != a; v = target[v])
      around = micro_product(around, micro_product(inv_dw, *coupling[v]));
    wit[a] = micro_invert(micro_sub(dw, around));
  }
  for (bool progress = true; progress;) {
    progress = false;
    for (int a = 0; a < m; ++a) {
      if (wit[a].has_value()) continue;
      if (target[a] == -1) {
        wit[a] = inv_dw;
        progress = true;
      } else if (wit[target[a]].has_value()) {
        wit[a] = micro_product(
            inv_dw,
            micro_add(one, micro_product(*coupling[a], *wit[target[a]])));
        progress = true;
      }
    }
  }

  std::vector<MicroOperator> out;
  out.reserve(m);
  for (int a = 0; a < m; ++a) {
    if (!wit[a].has_value())
      fail(Errc::InternalCheckFailure,
           "coupled-component reduction left a generator unresolved");
    out.push_back(*wit[a]);
  }
  return out;
}

}  // namespace

int microlocal_rank(const ConnectionGerm& g, Chart chart) {
  if (g.point.at_infinity != (chart == Chart::AtInfinity))
    fail(Errc::ChartMismatch, "chart does not match the germ's point");
  const bool inf = g.point.at_infinity;
  const int space = germ_coordinate(g);

  int total = 0;
  for (const auto& comp : polar_blocks(g)) {
    const ConnectionGerm sub = polar_subgerm(g, comp);
    const int closed = component_closed_rank(sub, inf);

    // Independent route: solve the component's relations on the ones vector
    // with d^-1 and ask the membership diagnostic whether every generator's
    // solution stays in the ring (vanishing microlocal module) or some
    // solution escapes (surviving rank).  Coupled blocks at a finite point
    // cannot be reduced this way (monomials are not units of that ring), so
    // only the closed form speaks for them.
    std::vector<MicroOperator> wits;
    if (comp.size() == 1)
      wits.push_back(
          micro_invert(single_generator_operator(g, comp[0], chart, space)));
    else if (inf)
      wits = component_witnesses(g, comp, space);
    if (!wits.empty()) {
      int in_ring = 0, escaped = 0;
      for (const auto& w : wits) {
        switch (micro_membership(w).verdict) {
          case Membership::InRing: ++in_ring; break;
          case Membership::Escapes: ++escaped; break;
          case Membership::Inconclusive: break;
        }
      }
      std::optional<bool> vanishes;
      if (escaped > 0)  // one surviving generator is enough
        vanishes = false;
      else if (in_ring == (int)wits.size())
        vanishes = true;
      if (!vanishes.has_value())
        fail(Errc::TruncationTooCoarse,
             "membership diagnostic inconclusive for a component");
      if (*vanishes != (closed == 0))
        fail(Errc::OracleDisagreement,
             "closed-form microlocal rank " + std::to_string(closed) +
                 " contradicts the membership diagnostic on a component of "
                 "size " + std::to_string(comp.size()));
    }
    total += closed;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Normal-form solver
// ---------------------------------------------------------------------------

RelationSystem relations_of_germ(const ConnectionGerm& g) {
  RelationSystem rel;
  rel.coord = germ_coordinate(g);
  rel.rows.assign(g.rank, std::vector<LaurentSeries>(g.rank,
                                                     series_zero(rel.coord)));
  for (const auto& [k, mat] : g.matrix_coefficients) {
    if (k > -2) continue;
    for (int i = 0; i < g.rank; ++i)
      for (int j = 0; j < g.rank; ++j)
        if (!scalar_is_zero(mat[i][j]))
          rel.rows[i][j] = series_add(
              rel.rows[i][j], series_monomial(rel.coord, k, mat[i][j]));
  }
  return rel;
}

namespace {

// d-polynomial entries of the transformed relations zh q_i = sum P_ij(d) q_j:
// a source term c w^{-k} (k >= 2) contributes (-1)^{k+1} c d^{k-2}.
using DPoly = std::map<int, Scalar>;

std::vector<std::vector<DPoly>> kernel_substitution(
    const RelationSystem& rel) {
  const int n = (int)rel.rows.size();
  std::vector<std::vector<DPoly>> P(n, std::vector<DPoly>(n));
  for (int i = 0; i < n; ++i) {
    if ((int)rel.rows[i].size() != n)
      fail(Errc::InconsistentRelations, "relation matrix is not square");
    for (int j = 0; j < n; ++j) {
      const LaurentSeries& a = rel.rows[i][j];
      if (a.coord != rel.coord)
        fail(Errc::CoordinateMismatch, "relation entry in a foreign coordinate");
      if (a.trunc < kExactOrder)
        fail(Errc::TruncationTooCoarse,
             "relation coefficients must be exact Laurent polynomials");
      for (const auto& [e, c] : a.terms) {
        if (e > -2)
          fail(Errc::InconsistentRelations,
               "the solve consumes the irregular type only (pole orders >= 2)");
        const int k = -e;
        const Scalar signed_c = (k % 2 == 0) ? -c : c;  // (-1)^{k+1} c
        P[i][j][k - 2] += signed_c;
      }
    }
  }
  return P;
}

bool pure_x_monomial(const MicroOperator& a, int* s_out, Scalar* c_out) {
  if (a.terms.size() != 1) return false;
  const auto& [key, c] = *a.terms.begin();
  if (key.second != 0) return false;
  *s_out = key.first;
  *c_out = c;
  return true;
}

// Splits the hw-orders of a coefficient; only orders 0 and -1 may occur for
// a first-order extraction.
struct SplitCoeff {
  std::map<int, Scalar> x_part;     // hw^0
  std::map<int, Scalar> dzh_part;   // hw^{-1}
  bool first_order = true;
};

SplitCoeff split_orders(const MicroOperator& a) {
  SplitCoeff out;
  for (const auto& [key, c] : a.terms) {
    if (key.second == 0)
      out.x_part[key.first] = c;
    else if (key.second == -1)
      out.dzh_part[key.first] = c;
    else
      out.first_order = false;
  }
  return out;
}

struct InfinitySolve {
  std::vector<int> basis;
  std::vector<std::vector<LaurentSeries>> matrix;     // d_wh q = B q
  std::vector<std::vector<MicroOperator>> dzh_rows;   // d_zh q = G q
};

InfinitySolve solve_at_infinity(const std::vector<std::vector<DPoly>>& P,
                                int space) {
  const Chart chart = Chart::AtInfinity;
  const int n = (int)P.size();
  const auto zero = [&] { return micro_make(chart, space, {}, true); };

  // Relation rows: sum_j R[i][j] q_j = 0 with R[i][i] carrying zh = x^{-1}.
  std::vector<std::vector<MicroOperator>> R(
      n, std::vector<MicroOperator>(n, zero()));
  for (int i = 0; i < n; ++i) {
    R[i][i] = micro_term(chart, space, -1, 0, Scalar(1));
    for (int j = 0; j < n; ++j)
      for (const auto& [deg, c] : P[i][j])
        R[i][j] = micro_sub(R[i][j], micro_term(chart, space, 0, -deg, c));
  }
  const auto R0 = R;  // kept for the consistency verification

  // Generator elimination along relations that are exact linear
  // combinations with Laurent-monomial coefficients.  The pivot is the
  // generator with the highest-order monomial coefficient (a constant
  // beats x^{-1}), which keeps the surviving basis the natural one.
  std::vector<bool> alive(n, true), used(n, false);
  std::map<int, std::vector<MicroOperator>> subst;
  bool progress = true;
  while (progress) {
    progress = false;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      struct Cand {
        int j;
        int s;
        Scalar c;
      };
      std::vector<Cand> cands;
      bool eliminable = true;
      for (int j = 0; j < n && eliminable; ++j) {
        if (!alive[j] || R[i][j].is_zero()) continue;
        int s = 0;
        Scalar c;
        if (pure_x_monomial(R[i][j], &s, &c))
          cands.push_back({j, s, c});
        else
          eliminable = false;
      }
      if (!eliminable) continue;
      used[i] = true;
      progress = true;
      if (cands.empty()) continue;  // 0 = 0 after earlier substitutions
      const Cand pivot = *std::max_element(
          cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            return a.s < b.s || (a.s == b.s && a.j > b.j);
          });
      // q_pivot = -c^{-1} x^{-s} * (rest of the row)
      std::vector<MicroOperator> S(n, zero());
      const MicroOperator inv_mono =
          micro_term(chart, space, -pivot.s, 0, Scalar(-1) / pivot.c);
      for (const auto& cand : cands)
        if (cand.j != pivot.j)
          S[cand.j] = micro_product(inv_mono, R[i][cand.j]);
      for (int r = 0; r < n; ++r) {
        if (used[r] || R[r][pivot.j].is_zero()) continue;
        const MicroOperator t = R[r][pivot.j];
        R[r][pivot.j] = zero();
        for (int j = 0; j < n; ++j)
          if (!S[j].is_zero())
            R[r][j] = micro_add(R[r][j], micro_product(t, S[j]));
      }
      for (auto& [p, vec] : subst) {
        if (vec[pivot.j].is_zero()) continue;
        const MicroOperator t = vec[pivot.j];
        vec[pivot.j] = zero();
        for (int j = 0; j < n; ++j)
          if (!S[j].is_zero()) vec[j] = micro_add(vec[j], micro_product(t, S[j]));
      }
      subst[pivot.j] = std::move(S);
      alive[pivot.j] = false;
    }
  }

  InfinitySolve out;
  for (int j = 0; j < n; ++j)
    if (alive[j]) out.basis.push_back(j);
  const int m = (int)out.basis.size();
  std::map<int, int> pos;
  for (int a = 0; a < m; ++a) pos[out.basis[a]] = a;

  // Extraction: every remaining relation must be first order with a single
  // monomial d_zh coefficient; normalizing it yields one row of the
  // transformed system d_zh q_u = G q.
  out.dzh_rows.assign(m, std::vector<MicroOperator>(m, zero()));
  out.matrix.assign(m, std::vector<LaurentSeries>(m, series_zero(space)));
  std::vector<bool> have_row(m, false);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    int u = -1;
    int lead_s = 0;
    Scalar lead_c;
    for (int j : out.basis) {
      const SplitCoeff sc = split_orders(R[i][j]);
      if (!sc.first_order)
        fail(Errc::InconsistentRelations,
             "relation is not first order after elimination");
      if (sc.dzh_part.empty()) continue;
      if (u >= 0 || sc.dzh_part.size() != 1)
        fail(Errc::InconsistentRelations,
             "relation does not isolate a single derivative");
      u = j;
      lead_s = sc.dzh_part.begin()->first;
      lead_c = sc.dzh_part.begin()->second;
    }
    if (u < 0)
      fail(Errc::InconsistentRelations,
           "relation carries no derivative to extract");
    if (have_row[pos[u]])
      fail(Errc::InconsistentRelations,
           "two relations extract the same generator's derivative");
    have_row[pos[u]] = true;
    const MicroOperator norm =
        micro_term(chart, space, -lead_s, 0, Scalar(1) / lead_c);
    for (int j : out.basis) {
      MicroOperator coeff = micro_product(norm, R[i][j]);
      if (j == u)
        coeff = micro_sub(coeff, micro_term(chart, space, 0, -1, Scalar(1)));
      const SplitCoeff sc = split_orders(coeff);
      if (!sc.first_order || !sc.dzh_part.empty())
        fail(Errc::InconsistentRelations,
             "derivative coefficient is not an exact monomial");
      // d_zh q_u = -sum_j coeff_j q_j; d_wh = -wh^{-2} d_zh.
      MicroOperator g = zero();
      LaurentSeries b = series_zero(space);
      for (const auto& [s, c] : sc.x_part) {
        g = micro_sub(g, micro_term(chart, space, s, 0, c));
        b = series_add(b, series_monomial(space, s - 2, c));
      }
      out.dzh_rows[pos[u]][pos[j]] = g;
      out.matrix[pos[u]][pos[j]] = b;
    }
  }
  for (int a = 0; a < m; ++a)
    if (!have_row[a])
      fail(Errc::InconsistentRelations,
           "no relation determines the derivative of a surviving generator");

  // Consistency verification: rewrite every original relation over the
  // surviving basis and reduce all derivative orders with the extracted
  // rows; everything must cancel exactly.
  for (int i = 0; i < n; ++i) {
    std::vector<MicroOperator> W(m, zero());
    for (int j = 0; j < n; ++j) {
      if (R0[i][j].is_zero()) continue;
      if (alive[j])
        W[pos[j]] = micro_add(W[pos[j]], R0[i][j]);
      else
        for (int a = 0; a < m; ++a)
          if (!subst.at(j)[out.basis[a]].is_zero())
            W[a] = micro_add(
                W[a], micro_product(R0[i][j], subst.at(j)[out.basis[a]]));
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (int a = 0; a < m && !changed; ++a) {
        for (const auto& [key, c] : W[a].terms) {
          if (key.second >= 0) continue;
          const auto [s, j] = key;
          const MicroOperator peel = micro_term(chart, space, s, j + 1, c);
          W[a].terms.erase(std::make_pair(s, j));
          for (int u = 0; u < m; ++u)
            if (!out.dzh_rows[a][u].is_zero())
              W[u] = micro_add(W[u],
                               micro_product(peel, out.dzh_rows[a][u]));
          changed = true;
          break;
        }
      }
    }
    for (int a = 0; a < m; ++a)
      for (const auto& [key, c] : W[a].terms)
        if (!scalar_is_zero(c))
          fail(Errc::InconsistentRelations,
               "derived system does not satisfy relation " +
                   std::to_string(i));
  }
  return out;
}

std::vector<std::vector<LaurentSeries>> solve_at_zero(
    const std::vector<std::vector<DPoly>>& P, int space) {
  const int n = (int)P.size();
  // Toward zero-hat every transformed relation must be zh q_i = C q with a
  // constant matrix C; derivative orders would mean slope >= 1 content.
  Matrix C = matrix_zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (const auto& [deg, c] : P[i][j]) {
        if (deg != 0)
          fail(Errc::InconsistentRelations,
               "slope >= 1 content in a zero-direction solve");
        C[i][j] = C[i][j] + c;
      }
  // Differentiating zh q = C q gives (zh I - C) dq = -q, so the connection
  // matrix is -(zh I - C)^{-1}; the inverse is the finite sum over powers of
  // C exactly when C is nilpotent (slopes below 1).
  std::vector<Matrix> powers{matrix_identity(n)};
  for (int k = 1; k < n; ++k) {
    Matrix next = matrix_zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          next[i][j] += powers[k - 1][i][l] * C[l][j];
    powers.push_back(std::move(next));
  }
  Matrix top = matrix_zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) top[i][j] += powers[n - 1][i][l] * C[l][j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!scalar_is_zero(top[i][j]))
        fail(Errc::InconsistentRelations,
             "zero-direction relations are not nilpotent");

  std::vector<std::vector<LaurentSeries>> B(
      n, std::vector<LaurentSeries>(n, series_zero(space)));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!scalar_is_zero(powers[k][i][j]))
          B[i][j] = series_add(
              B[i][j], series_monomial(space, -k - 1, -powers[k][i][j]));

  // Verify (zh I - C) B = -I exactly.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      LaurentSeries acc = series_shift(B[i][j], 1);
      for (int l = 0; l < n; ++l)
        acc = series_sub(acc, series_scale(C[i][l], B[l][j]));
      if (i == j) acc = series_add(acc, series_monomial(space, 0, Scalar(1)));
      for (const auto& [e, c] : acc.terms)
        if (!scalar_is_zero(c))
          fail(Errc::InternalCheckFailure,
               "zero-direction normal form fails its defining identity");
    }
  return B;
}

void check_seed(const std::vector<std::vector<LaurentSeries>>& B,
                const std::vector<int>& basis,
                const std::vector<std::optional<PuiseuxSeries>>& seeds,
                int target_base) {
  if (seeds.empty()) return;
  for (size_t a = 0; a < basis.size(); ++a) {
    const int gen = basis[a];
    if (gen >= (int)seeds.size() || !seeds[gen].has_value()) continue;
    const PuiseuxSeries& seed = *seeds[gen];
    if (seed.ram != 1) continue;  // a ramified seed has no single row
    bool diagonal = true;
    for (size_t b = 0; b < basis.size(); ++b)
      if (b != a && !B[a][b].known_zero()) diagonal = false;
    if (!diagonal) continue;
    if (seed.base_coord != target_base)
      fail(Errc::CoordinateMismatch, "seed lives on the wrong chart");
    const LaurentSeries expect = relabel(puiseux_derive(seed).body, target_base);
    const LaurentSeries diff = series_sub(B[a][a], expect);
    for (const auto& [e, c] : diff.terms)
      if (!scalar_is_zero(c))
        fail(Errc::SeedMismatch,
             "solver entry disagrees with the seed derivative at order " +
                 std::to_string(e));
  }
}

}  // namespace

NormalForm normal_form_solver(
    const RelationSystem& relations, const Point& target,
    const std::vector<std::optional<PuiseuxSeries>>& seeds) {
  const int n = (int)relations.rows.size();
  if (n == 0) fail(Errc::InconsistentRelations, "empty relation system");
  if (!seeds.empty() && (int)seeds.size() != n)
    fail(Errc::InconsistentRelations,
         "seed count does not match the generator count");
  if (!target.at_infinity && !scalar_is_zero(target.location))
    fail(Errc::UnsupportedGermShape,
         "solver targets are the origin and infinity of the dual line");

  const auto P = kernel_substitution(relations);
  NormalForm out;
  out.location = target;
  if (target.at_infinity) {
    const int space = sym("w");
    InfinitySolve sol = solve_at_infinity(P, space);
    out.basis = std::move(sol.basis);
    out.matrix = std::move(sol.matrix);
    check_seed(out.matrix, out.basis, seeds, space);
  } else {
    const int space = sym("z");
    out.matrix = solve_at_zero(P, space);
    out.basis.resize(n);
    for (int i = 0; i < n; ++i) out.basis[i] = i;
    check_seed(out.matrix, out.basis, seeds, space);
  }
  return out;
}

}  // namespace flconn
