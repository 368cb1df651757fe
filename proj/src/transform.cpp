#include "flconn/transform.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include "flconn/errors.hpp"

namespace flconn {

namespace {

int sym(const std::string& name) { return SymbolTable::instance().intern(name); }

int rational_int(const Rational& r, Errc code, const std::string& what) {
  if (denominator(r) != 1) fail(code, what + ": " + r.str());
  return (int)numerator(r);
}

bool puiseux_eq(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  PuiseuxSeries x = puiseux_normalize(a), y = puiseux_normalize(b);
  if (x.base_coord != y.base_coord || x.ram != y.ram) return false;
  if (x.body.trunc != y.body.trunc) return false;
  if (x.body.terms.size() != y.body.terms.size()) return false;
  for (const auto& [e, c] : x.body.terms) {
    auto it = y.body.terms.find(e);
    if (it == y.body.terms.end() || !scalar_equal(c, it->second)) return false;
  }
  return true;
}

bool slope_entries_equal(const std::vector<SlopeEntry>& a,
                         const std::vector<SlopeEntry>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].slope != b[i].slope || a[i].rank != b[i].rank) return false;
  return true;
}

// A_k -> (-1)^{k+1} A_k: the matrix of the pullback under the sign flip of
// the base coordinate (d/dw picks up one sign, w^k the other k).
ConnectionGerm germ_sign_flip(const ConnectionGerm& g) {
  std::map<int, Matrix> coeffs;
  for (const auto& [k, mat] : g.matrix_coefficients) {
    Matrix m = mat;
    if ((k % 2) == 0)  // k+1 odd
      for (auto& row : m)
        for (auto& c : row) c = -c;
    coeffs[k] = std::move(m);
  }
  return germ_make(g.point, g.rank, std::move(coeffs));
}

ConnectionGerm strip_residue(const ConnectionGerm& g) {
  std::map<int, Matrix> coeffs = g.matrix_coefficients;
  coeffs.erase(-1);
  return germ_make(g.point, g.rank, std::move(coeffs));
}

ConnectionGerm germ_of_normal_form(const NormalForm& nf) {
  const int m = (int)nf.basis.size();
  std::map<int, Matrix> coeffs;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (const auto& [e, c] : nf.matrix[i][j].terms) {
        auto [it, fresh] = coeffs.try_emplace(e, matrix_zero(m));
        (void)fresh;
        it->second[i][j] = c;
      }
  return germ_make(nf.location, m, std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Routing the germ at infinity: coupling blocks sorted into slope buckets.
// A block whose slopes straddle 1 would feed several local directions at
// once and is out of the supported class.
// ---------------------------------------------------------------------------
struct InfRouting {
  std::vector<std::vector<int>> one_blocks;   // all slopes exactly 1
  std::vector<std::vector<int>> high_blocks;  // all slopes above 1
  std::vector<int> low_union;                 // generators with slopes below 1
  std::vector<int> high_union;
  int effective_rank = 0;  // total rank of the blocks with a polar part
};

InfRouting route_infinity(const ConnectionGerm& gi) {
  InfRouting r;
  for (const auto& block : polar_blocks(gi)) {
    ConnectionGerm sub = polar_subgerm(gi, block);
    if (sub.pole_order() == 0) continue;  // no polar part: contributes nothing
    r.effective_rank += sub.rank;
    int low = 0, one = 0, high = 0;
    for (const auto& e : slopes(sub)) {
      if (e.slope < 1)
        ++low;
      else if (e.slope == Rational(1))
        ++one;
      else
        ++high;
    }
    if (low && !one && !high)
      r.low_union.insert(r.low_union.end(), block.begin(), block.end());
    else if (one && !low && !high)
      r.one_blocks.push_back(block);
    else if (high && !low && !one)
      r.high_blocks.push_back(block);
    else
      fail(Errc::UnsupportedGermShape,
           "a coupling block mixes slopes across the local directions of the "
           "transform");
  }
  std::sort(r.low_union.begin(), r.low_union.end());
  for (const auto& b : r.high_blocks)
    r.high_union.insert(r.high_union.end(), b.begin(), b.end());
  std::sort(r.high_union.begin(), r.high_union.end());
  return r;
}

// The Legendre side of one block with slopes above 1: each summand of the
// residue-stripped decomposition maps to an infinity-hat summand whose rank
// equals its Swan excess; for a one-generator block the transformed exponent
// doubles as the solver seed.
struct LegendreBlock {
  std::vector<FormalSummand> summands;
  std::optional<PuiseuxSeries> seed;  // set for one-generator blocks
};

LegendreBlock legendre_block(const ConnectionGerm& sub) {
  LegendreBlock out;
  FormalType ft = formal_decompose(strip_residue(sub));
  for (const auto& s : ft.summands) {
    const int swan_part =
        rational_int(s.slope() * s.rank, Errc::NonIntegralSwan,
                     "pure part has a fractional Swan conductor");
    const int rank_hat = swan_part - s.rank;
    LegendreResult lr = legendre_exponent(s.exponent, FlDirection::InfToInfHat);
    PuiseuxSeries qhat = puiseux_normalize(lr.qhat);
    if (!lr.location.at_infinity || qhat.ram != rank_hat)
      fail(Errc::InternalCheckFailure,
           "Legendre transform of a steep exponent does not match the rank "
           "bookkeeping");
    FormalSummand t;
    t.exponent = qhat;
    t.ramification = rank_hat;
    t.rank = rank_hat;
    // Residue data at infinity-hat is not derived by any rule here.
    t.residue_exponents.assign(rank_hat, std::nullopt);
    out.summands.push_back(std::move(t));
  }
  if (sub.rank == 1 && out.summands.size() == 1)
    out.seed = out.summands[0].exponent;
  return out;
}

std::string int3(int a, int b, int c) {
  std::ostringstream os;
  os << a << " = " << b << " = " << c;
  return os.str();
}

void add_provenance(std::vector<std::string>& prov, const std::string& name) {
  if (std::find(prov.begin(), prov.end(), name) == prov.end())
    prov.push_back(name);
}

std::string location_label(const Point& p) {
  if (p.at_infinity) return "inf-hat";
  if (scalar_is_zero(p.location)) return "zero-hat";
  return "finite " + scalar_print(p.location);
}

}  // namespace

// ---------------------------------------------------------------------------
// fourier_transform
// ---------------------------------------------------------------------------

TransformReport fourier_transform(const GlobalConnection& g) {
  if (g.germs.empty())
    fail(Errc::UnsupportedGermShape, "the input carries no singular germ");
  const ConnectionGerm* g0 = nullptr;
  const ConnectionGerm* gi = nullptr;
  for (const auto& germ : g.germs) {
    const ConnectionGerm** slot = nullptr;
    if (germ.point.at_infinity)
      slot = &gi;
    else if (scalar_is_zero(germ.point.location))
      slot = &g0;
    else
      fail(Errc::UnsupportedGermShape,
           "finite singular points away from the origin are not supported; "
           "translate them to the origin first");
    if (*slot)
      fail(Errc::UnsupportedGermShape, "two germs at the same point");
    *slot = &germ;
  }

  TransformReport rep;
  {
    std::ostringstream os;
    os << "rank " << g.rank << " connection, germs at";
    for (const auto& germ : g.germs)
      os << " " << point_print(germ.point) << " (pole order "
         << germ.pole_order() << ")";
    rep.source = os.str();
  }

  TraceCheck tc = validate_residue_trace(g);
  rep.checks.push_back(
      {"residue-trace", tc.ok,
       tc.ok ? "the residue traces sum to zero" : tc.violation});

  bool singular = false;

  // Data accumulated at infinity-hat; three independent rank routes.
  std::vector<FormalSummand> inf_summands;
  std::vector<std::string> inf_prov;
  std::vector<SlopeEntry> inf_entries;
  std::optional<NormalForm> inf_matrix;
  int rank_numeric = 0, rank_micro = 0, rank_solver = 0;

  // --- the germ at 0: regular singular, feeds infinity-hat --------------
  if (g0) {
    if (g0->pole_order() > 1)
      fail(Errc::UnsupportedGermShape,
           "only a regular singularity is supported at the origin");
    if (g0->pole_order() == 1) {
      singular = true;
      std::vector<TransformedSummand> parts =
          reg_sing_rule(semisimple_residue_eigenvalues(*g0));
      const int mu0 = microlocal_rank(*g0, Chart::AtZero);
      if ((int)parts.size() != mu0)
        fail(Errc::InternalCheckFailure,
             "regular-singular rule and microlocal rank disagree at the "
             "origin");
      for (auto& p : parts) {
        inf_summands.push_back(std::move(p.summand));
        add_provenance(inf_prov, p.provenance);
      }
      if (!parts.empty()) inf_entries.push_back({Rational(0), (int)parts.size()});
      rank_numeric += (int)parts.size();
      rank_micro += mu0;
      rank_solver += (int)parts.size();
    }
  }

  // --- the germ at infinity: split by slope ------------------------------
  std::optional<TransformedPoint> zero_hat;
  std::vector<TransformedPoint> finite;
  int swan_low = 0, swan_high = 0;

  if (gi) {
    InfRouting routing = route_infinity(*gi);
    if (routing.effective_rank > 0) singular = true;

    // Slope exactly 1: one finite point per generator.
    for (const auto& block : routing.one_blocks) {
      if (block.size() != 1)
        fail(Errc::UnsupportedGermShape,
             "coupled slope-one components are not supported");
      const LaurentSeries d = germ_polar_entry(*gi, block[0], block[0]);
      TransformedSummand ts = slope_one_rule(d.coeff(-2), d.coeff(-1));
      auto it = std::find_if(finite.begin(), finite.end(), [&](const auto& tp) {
        return point_equal(tp.location, ts.location);
      });
      if (it == finite.end()) {
        TransformedPoint tp;
        tp.location = ts.location;
        tp.provenance = {ts.provenance};
        finite.push_back(std::move(tp));
        it = std::prev(finite.end());
      }
      it->type.summands.push_back(std::move(ts.summand));
    }
    for (auto& tp : finite) {
      int total = 0;
      for (const auto& s : tp.type.summands) total += s.rank;
      tp.numerics = numerics_make({{Rational(0), total}});
      tp.type.rank = total;
      tp.type_complete = true;
    }
    std::sort(finite.begin(), finite.end(), [](const auto& a, const auto& b) {
      return scalar_print(a.location.location) <
             scalar_print(b.location.location);
    });

    // Slopes below 1: zero-hat.
    if (!routing.low_union.empty()) {
      ConnectionGerm sub = polar_subgerm(*gi, routing.low_union);
      LocalNumerics src = numerics_make(slopes(sub));
      swan_low = src.swan;
      TransformedPoint tp;
      tp.location = point_finite(Scalar(0));
      tp.numerics = numeric_local_fl(FlDirection::InfToZeroHat, src);
      tp.provenance = {"numeric-rule"};
      // Slope-zero blocks stay regular of the same rank; their transformed
      // residue is not derived here.  Steeper parts are reported through
      // numerics and the matrix only.
      for (const auto& block : polar_blocks(sub)) {
        ConnectionGerm piece = polar_subgerm(sub, block);
        if (piece.pole_order() != 1) continue;
        FormalSummand s;
        s.exponent = puiseux_zero(germ_coordinate(sub));
        s.rank = piece.rank;
        s.residue_exponents.assign(piece.rank, std::nullopt);
        tp.type.summands.push_back(std::move(s));
      }
      tp.type.rank = tp.numerics.rank;
      int listed = 0;
      for (const auto& s : tp.type.summands) listed += s.rank;
      tp.type_complete = (listed == tp.numerics.rank);
      try {
        NormalForm nf =
            normal_form_solver(relations_of_germ(sub), point_finite(Scalar(0)));
        if ((int)nf.basis.size() != sub.rank)
          fail(Errc::InternalCheckFailure,
               "zero-hat presentation lost a generator");
        tp.matrix = std::move(nf);
        add_provenance(tp.provenance, "normal-form-solver");
      } catch (const Error& e) {
        if (e.code() != Errc::UnsupportedGermShape &&
            e.code() != Errc::InconsistentRelations)
          throw;
      }
      zero_hat = std::move(tp);
    }

    // Slopes above 1: infinity-hat, Legendre plus solver.
    if (!routing.high_union.empty()) {
      ConnectionGerm sub = polar_subgerm(*gi, routing.high_union);
      LocalNumerics src = numerics_make(slopes(sub));
      swan_high = src.swan;
      LocalNumerics hat = numeric_local_fl(FlDirection::InfToInfHat, src);
      rank_numeric += hat.rank;
      rank_micro += microlocal_rank(sub, Chart::AtInfinity);
      for (const auto& e : hat.slope_multiset) inf_entries.push_back(e);

      std::vector<std::optional<PuiseuxSeries>> seeds(sub.rank);
      int seed_count = 0;
      for (const auto& block : routing.high_blocks) {
        LegendreBlock lb = legendre_block(polar_subgerm(*gi, block));
        for (auto& s : lb.summands) inf_summands.push_back(std::move(s));
        add_provenance(inf_prov, "legendre");
        if (lb.seed) {
          const auto pos = std::lower_bound(routing.high_union.begin(),
                                            routing.high_union.end(), block[0]);
          seeds[pos - routing.high_union.begin()] = std::move(*lb.seed);
          ++seed_count;
        }
      }

      NormalForm nf =
          normal_form_solver(relations_of_germ(sub), point_infinity(), seeds);
      rank_solver += (int)nf.basis.size();
      add_provenance(inf_prov, "normal-form-solver");
      if (seed_count > 0)
        rep.checks.push_back({"legendre-seeds", true,
                              std::to_string(seed_count) +
                                  " solver entries matched their Legendre "
                                  "transforms"});

      std::vector<SlopeEntry> from_matrix = slopes(germ_of_normal_form(nf));
      if (!slope_entries_equal(from_matrix, hat.slope_multiset))
        fail(Errc::OracleDisagreement,
             "solver output slopes " + slopes_print(from_matrix) +
                 " disagree with the numeric rule " +
                 slopes_print(hat.slope_multiset));
      rep.checks.push_back({"solver-slopes", true,
                            "matrix slopes at infinity-hat match the numeric "
                            "rule: " +
                                slopes_print(hat.slope_multiset)});
      inf_matrix = std::move(nf);
    }
  }

  if (!singular)
    fail(Errc::UnsupportedGermShape,
         "the input is nonsingular: nothing to transform");

  if (rank_numeric != rank_micro || rank_numeric != rank_solver)
    fail(Errc::InternalCheckFailure,
         "transform rank disagrees across routes: numeric " +
             std::to_string(rank_numeric) + ", microlocal " +
             std::to_string(rank_micro) + ", solver " +
             std::to_string(rank_solver));
  rep.rank_hat = rank_numeric;
  rep.checks.push_back({"rank-consistency", true,
                        "numeric = microlocal = solver rank: " +
                            int3(rank_numeric, rank_micro, rank_solver)});
  for (const auto& tp : finite)
    if (tp.numerics.rank > rep.rank_hat)
      fail(Errc::InternalCheckFailure,
           "a finite point carries more residue directions than the rank of "
           "the transform");

  // Swan bookkeeping: Swan moves unchanged below slope 1 (to zero-hat) and
  // above slope 1 (to infinity-hat); slope-one and regular data carry none.
  {
    const int out_zero = zero_hat ? zero_hat->numerics.swan : 0;
    int out_inf = 0;
    for (const auto& e : inf_entries)
      out_inf += rational_int(e.slope * e.rank, Errc::NonIntegralSwan,
                              "pure part has a fractional Swan conductor");
    if (out_zero != swan_low || out_inf != swan_high)
      fail(Errc::InternalCheckFailure,
           "Swan bookkeeping broke: zero-hat " + std::to_string(out_zero) +
               " vs " + std::to_string(swan_low) + ", infinity-hat " +
               std::to_string(out_inf) + " vs " + std::to_string(swan_high));
    rep.checks.push_back(
        {"swan-bookkeeping", true,
         "zero-hat " + std::to_string(out_zero) + ", infinity-hat " +
             std::to_string(out_inf) + ", finite 0"});
  }

  // --- assemble the point list -------------------------------------------
  if (zero_hat) rep.points.push_back(std::move(*zero_hat));
  for (auto& tp : finite) rep.points.push_back(std::move(tp));
  if (!inf_summands.empty()) {
    TransformedPoint tp;
    tp.location = point_infinity();
    tp.numerics = numerics_make(inf_entries);
    if (tp.numerics.rank != rep.rank_hat)
      fail(Errc::InternalCheckFailure,
           "infinity-hat rank does not match the transform rank");
    tp.type.rank = tp.numerics.rank;
    tp.type.summands = std::move(inf_summands);
    int listed = 0;
    for (const auto& s : tp.type.summands) listed += s.rank;
    tp.type_complete = (listed == tp.numerics.rank);
    tp.matrix = std::move(inf_matrix);
    std::sort(inf_prov.begin(), inf_prov.end());
    tp.provenance = std::move(inf_prov);
    add_provenance(tp.provenance, "numeric-rule");
    rep.points.push_back(std::move(tp));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// double_transform_check
// ---------------------------------------------------------------------------

namespace {

// Entrywise equality of the coefficients at orders <= -2.  Residue rows are
// presentation-dependent, so comparisons of solved matrices stop above them.
bool polar_parts_equal(const ConnectionGerm& a, const ConnectionGerm& b) {
  if (a.rank != b.rank) return false;
  for (int i = 0; i < a.rank; ++i)
    for (int j = 0; j < a.rank; ++j) {
      const LaurentSeries x = germ_polar_entry(a, i, j);
      const LaurentSeries y = germ_polar_entry(b, i, j);
      const int lo = std::min(x.valuation(), y.valuation());
      for (int k = lo; k <= -2; ++k)
        if (!scalar_equal(x.coeff(k), y.coeff(k))) return false;
    }
  return true;
}

// Multiset comparison of exponent lists by exact equality.
bool match_exponents(std::vector<PuiseuxSeries> got,
                     const std::vector<PuiseuxSeries>& want,
                     std::ostringstream& diff) {
  if (got.size() != want.size()) {
    diff << "exponent counts differ: " << got.size() << " vs " << want.size()
         << "\n";
    return false;
  }
  for (const auto& w : want) {
    auto it = std::find_if(got.begin(), got.end(), [&](const PuiseuxSeries& q) {
      return puiseux_eq(q, w);
    });
    if (it == got.end()) {
      diff << "no double-dual exponent matches " << puiseux_print(w) << "\n";
      return false;
    }
    got.erase(it);
  }
  return true;
}

}  // namespace

CheckResult double_transform_check(const GlobalConnection& g) {
  CheckResult out{"double-transform", false, ""};
  std::ostringstream diff;
  const TransformReport r1 = fourier_transform(g);

  // --- second pass, assembled pointwise from the first report ------------
  std::vector<SlopeEntry> ff_entries;       // at the double-dual infinity
  std::vector<PuiseuxSeries> ff_exponents;  // known, unramified, slope > 0
  std::vector<Scalar> ff_finite;            // double-dual finite locations
  int ff_zero_rank = 0, ff_zero_swan = 0;
  const TransformedPoint* inf_point = nullptr;

  for (const auto& tp : r1.points) {
    if (!tp.location.at_infinity && scalar_is_zero(tp.location.location)) {
      // zero-hat data returns to the double-dual infinity.
      LocalNumerics n2 =
          numeric_local_fl(FlDirection::ZeroToInfHat, tp.numerics);
      for (const auto& e : n2.slope_multiset) ff_entries.push_back(e);
      for (const auto& s : tp.type.summands)
        if (s.slope() > 0) {
          PuiseuxSeries q2 = puiseux_normalize(
              legendre_exponent(s.exponent, FlDirection::ZeroToInfHat).qhat);
          if (q2.ram == 1) ff_exponents.push_back(q2);
        }
    } else if (!tp.location.at_infinity) {
      // A finite regular point p becomes a slope-one part with exponent
      // -p w^{-1} at the double-dual infinity.
      ff_entries.push_back({Rational(1), tp.numerics.rank});
      const PuiseuxSeries e = puiseux_from_laurent(
          series_monomial(sym("w"), -1, -tp.location.location));
      for (int i = 0; i < tp.numerics.rank; ++i) ff_exponents.push_back(e);
    } else {
      inf_point = &tp;
      for (const auto& s : tp.type.summands) {
        const Rational sl = s.slope();
        if (sl > 1) {
          LocalNumerics n2 = numeric_local_fl(
              FlDirection::InfToInfHat,
              numerics_make({{sl, s.rank}}));
          for (const auto& e : n2.slope_multiset) ff_entries.push_back(e);
          PuiseuxSeries q2 = puiseux_normalize(
              legendre_exponent(s.exponent, FlDirection::InfToInfHat).qhat);
          if (q2.ram == 1) ff_exponents.push_back(q2);
        } else if (sl == Rational(1)) {
          // Back to a finite point of the double dual.
          PuiseuxSeries q = puiseux_normalize(s.exponent);
          ff_finite.push_back(q.body.coeff(-1));
        } else {
          // Regular or shallow data returns to the double-dual origin; a
          // summand whose residues are all known zero is trivial and
          // contributes nothing.
          bool trivial = s.slope() == Rational(0) &&
                         !s.residue_exponents.empty();
          for (const auto& rexp : s.residue_exponents)
            trivial = trivial && rexp.has_value() && scalar_is_zero(*rexp);
          if (trivial) continue;
          LocalNumerics n2 = numeric_local_fl(
              FlDirection::InfToZeroHat,
              numerics_make({{sl, s.rank}}));
          ff_zero_rank += n2.rank;
          ff_zero_swan += n2.swan;
        }
      }
    }
  }
  (void)inf_point;

  // --- the sign-flipped source to compare against -------------------------
  const ConnectionGerm* g0 = nullptr;
  const ConnectionGerm* gi = nullptr;
  for (const auto& germ : g.germs)
    (germ.point.at_infinity ? gi : g0) = &germ;

  std::vector<SlopeEntry> src_entries;
  std::vector<PuiseuxSeries> src_exponents;  // flipped, unramified
  int src_rank = 0;
  if (gi) {
    InfRouting routing = route_infinity(*gi);
    src_rank = routing.effective_rank;
    for (const auto& block : polar_blocks(*gi)) {
      ConnectionGerm sub = polar_subgerm(*gi, block);
      if (sub.pole_order() == 0) continue;
      for (const auto& e : slopes(sub)) src_entries.push_back(e);
    }
    for (const auto& block : routing.one_blocks) {
      const LaurentSeries d = germ_polar_entry(*gi, block[0], block[0]);
      src_exponents.push_back(puiseux_from_laurent(
          series_monomial(sym("w"), -1, d.coeff(-2))));
    }
    for (const auto& block : routing.high_blocks) {
      FormalType ft = formal_decompose(strip_residue(polar_subgerm(*gi, block)));
      for (const auto& s : ft.summands)
        if (s.ramification == 1)
          src_exponents.push_back(
              puiseux_normalize(exponent_sign_flip(s.exponent)));
    }
  }
  const int src_zero_rank =
      (g0 && g0->pole_order() == 1) ? microlocal_rank(*g0, Chart::AtZero) : 0;

  // --- compare -------------------------------------------------------------
  bool ok = true;
  const LocalNumerics ff_inf = numerics_make(ff_entries);
  const LocalNumerics src_inf = numerics_make(src_entries);
  if (!numerics_equal(ff_inf, src_inf)) {
    ok = false;
    diff << "double-dual infinity " << numerics_print(ff_inf)
         << " does not reproduce the source " << numerics_print(src_inf)
         << "\n";
  }
  if (ff_inf.rank != src_rank) {
    ok = false;
    diff << "double-dual rank " << ff_inf.rank << " vs source rank "
         << src_rank << "\n";
  }
  if (ff_zero_rank != src_zero_rank || ff_zero_swan != 0) {
    ok = false;
    diff << "double-dual origin rank " << ff_zero_rank << " Swan "
         << ff_zero_swan << " vs source origin rank " << src_zero_rank
         << " Swan 0\n";
  }
  if (!ff_finite.empty()) {
    ok = false;
    diff << ff_finite.size()
         << " double-dual finite points, but the source has none away from "
            "the origin\n";
  }
  ok = match_exponents(ff_exponents, src_exponents, diff) && ok;

  // --- matrix-level round trip when a second presentation exists ----------
  bool matrix_checked = false;
  if (ok && gi && inf_point && inf_point->matrix) {
    InfRouting routing = route_infinity(*gi);
    ConnectionGerm bg = germ_of_normal_form(*inf_point->matrix);
    bool pure_two = bg.rank == (int)routing.high_union.size();
    for (const auto& e : slopes(bg))
      pure_two = pure_two && e.slope == Rational(2);
    if (pure_two) {
      NormalForm nf2 =
          normal_form_solver(relations_of_germ(bg), point_infinity());
      ConnectionGerm back = germ_of_normal_form(nf2);
      ConnectionGerm want = germ_sign_flip(
          strip_residue(polar_subgerm(*gi, routing.high_union)));
      if (!polar_parts_equal(back, want)) {
        ok = false;
        diff << "double-dual matrix does not reproduce the sign-flipped "
                "source polar part\n";
      } else {
        matrix_checked = true;
      }
    }
  }

  out.pass = ok;
  if (ok) {
    std::ostringstream os;
    os << "slopes, Swan, ranks, locations and " << ff_exponents.size()
       << " exponents reproduce the sign-flipped source";
    if (matrix_checked) os << "; matrix round trip verified coefficientwise";
    out.details = os.str();
  } else {
    out.details = diff.str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// irregular_independence_check
// ---------------------------------------------------------------------------

CheckResult irregular_independence_check(const GlobalConnection& g,
                                         const GlobalConnection& perturbed) {
  CheckResult out{"irregular-independence", false, ""};
  std::ostringstream diff;
  const TransformReport a = fourier_transform(g);
  const TransformReport b = fourier_transform(perturbed);

  bool ok = true;
  if (a.rank_hat != b.rank_hat) {
    ok = false;
    diff << "rank " << a.rank_hat << " vs " << b.rank_hat << "\n";
  }
  if (a.points.size() != b.points.size()) {
    ok = false;
    diff << a.points.size() << " vs " << b.points.size()
         << " singular points\n";
  }
  for (size_t i = 0; ok && i < a.points.size(); ++i) {
    const TransformedPoint& pa = a.points[i];
    const TransformedPoint& pb = b.points[i];
    const std::string at = location_label(pa.location);
    if (!point_equal(pa.location, pb.location)) {
      ok = false;
      diff << "point " << at << " moved to " << location_label(pb.location)
           << "\n";
      break;
    }
    if (!numerics_equal(pa.numerics, pb.numerics)) {
      ok = false;
      diff << at << ": numerics " << numerics_print(pa.numerics) << " vs "
           << numerics_print(pb.numerics) << "\n";
    }
    if (pa.type.summands.size() != pb.type.summands.size()) {
      ok = false;
      diff << at << ": summand counts differ\n";
      continue;
    }
    for (size_t k = 0; k < pa.type.summands.size(); ++k) {
      const FormalSummand& sa = pa.type.summands[k];
      const FormalSummand& sb = pb.type.summands[k];
      if (sa.ramification != sb.ramification || sa.rank != sb.rank ||
          !puiseux_eq(sa.exponent, sb.exponent)) {
        ok = false;
        diff << at << ": exponent " << puiseux_print(sb.exponent)
             << " deviates from " << puiseux_print(sa.exponent) << "\n";
      }
    }
    if (pa.matrix.has_value() != pb.matrix.has_value()) {
      ok = false;
      diff << at << ": presentation appears on one side only\n";
    } else if (pa.matrix) {
      if (!polar_parts_equal(germ_of_normal_form(*pa.matrix),
                             germ_of_normal_form(*pb.matrix))) {
        ok = false;
        diff << at << ": matrix polar parts differ\n";
      }
    }
  }

  out.pass = ok;
  out.details = ok ? "irregular data agrees on all points" : diff.str();
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string transform_report_serialize(const TransformReport& r) {
  std::ostringstream os;
  os << "transform-report\n";
  os << "source " << r.source << "\n";
  os << "rank-hat " << r.rank_hat << "\n";
  for (const auto& tp : r.points) {
    os << "point " << location_label(tp.location) << "\n";
    os << "  numerics " << numerics_print(tp.numerics) << "\n";
    os << "  type-complete " << (tp.type_complete ? "yes" : "no") << "\n";
    for (const auto& s : tp.type.summands) {
      os << "  summand ram " << s.ramification << " rank " << s.rank
         << " slope " << s.slope().str() << " residues [";
      bool first = true;
      for (const auto& rexp : s.residue_exponents) {
        if (!first) os << "; ";
        first = false;
        os << (rexp ? scalar_print(*rexp) : std::string("?"));
      }
      os << "] exponent " << puiseux_print(s.exponent) << "\n";
    }
    if (tp.matrix) {
      os << "  matrix basis";
      for (int b : tp.matrix->basis) os << " q" << b;
      os << "\n";
      const int m = (int)tp.matrix->basis.size();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          if (!tp.matrix->matrix[i][j].known_zero())
            os << "  entry " << i << " " << j << " "
               << series_print(tp.matrix->matrix[i][j]) << "\n";
    }
    os << "  provenance";
    for (const auto& p : tp.provenance) os << " " << p;
    os << "\n";
  }
  for (const auto& c : r.checks)
    os << "check " << c.name << " " << (c.pass ? "pass" : "FAIL") << " "
       << c.details << "\n";
  os << "end\n";
  return os.str();
}

std::string transform_report_summary(const TransformReport& r) {
  std::ostringstream os;
  os << "Fourier-Laplace transform of " << r.source << "\n";
  os << "rank " << r.rank_hat << ", " << r.points.size()
     << " singular point(s)\n";
  for (const auto& tp : r.points) {
    os << "  " << location_label(tp.location) << ": rank "
       << tp.numerics.rank << ", Swan " << tp.numerics.swan;
    if (tp.numerics.swan == 0 && tp.numerics.slope_multiset.size() <= 1)
      os << " (regular)";
    os << "; " << tp.type.summands.size() << " summand(s)";
    if (!tp.type_complete) os << " [partial]";
    if (tp.matrix) os << "; presentation attached";
    os << "\n";
  }
  int passing = 0;
  for (const auto& c : r.checks) passing += c.pass ? 1 : 0;
  os << "checks: " << passing << "/" << r.checks.size() << " passing\n";
  return os.str();
}

}  // namespace flconn
