#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "flconn/local_fl.hpp"

using namespace flconn;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InternalCheckFailure;
}

Scalar S(const std::string& text) { return scalar_parse(text); }

int sym(const std::string& s) { return SymbolTable::instance().intern(s); }

bool puiseux_same(const PuiseuxSeries& a, const PuiseuxSeries& b) {
  PuiseuxSeries d = puiseux_sub(a, b);
  for (const auto& [exp, c] : d.body.terms) {
    (void)exp;
    if (!scalar_is_zero(c)) return false;
  }
  return true;
}

bool series_same(const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries d = series_sub(a, b);
  for (const auto& [exp, c] : d.terms) {
    (void)exp;
    if (!scalar_is_zero(c)) return false;
  }
  return true;
}

ConnectionGerm germ_inf(int rank,
                        const std::vector<std::tuple<int, int, int,
                                                     std::string>>& entries) {
  std::map<int, Matrix> coeffs;
  for (const auto& [k, i, j, text] : entries) {
    auto [it, inserted] = coeffs.emplace(k, matrix_zero(rank));
    (void)inserted;
    it->second[i][j] = S(text);
  }
  return germ_make(point_infinity(), rank, std::move(coeffs));
}

ConnectionGerm germ_zero(int rank,
                         const std::vector<std::tuple<int, int, int,
                                                      std::string>>& entries) {
  std::map<int, Matrix> coeffs;
  for (const auto& [k, i, j, text] : entries) {
    auto [it, inserted] = coeffs.emplace(k, matrix_zero(rank));
    (void)inserted;
    it->second[i][j] = S(text);
  }
  return germ_make(point_finite(S("0")), rank, std::move(coeffs));
}

// Exponent at infinity with ramification: terms are in the u-exponent with
// u^ram = w.
PuiseuxSeries exponent_at(const std::string& base, int ram,
                          const std::map<int, std::string>& terms) {
  std::map<int, Scalar> t;
  for (const auto& [k, text] : terms) t.emplace(k, S(text));
  PuiseuxSeries out;
  out.base_coord = sym(base);
  out.ram = ram;
  out.body = make_series(ramified_coordinate(out.base_coord, ram),
                         std::move(t));
  return out;
}

LocalNumerics nums(const std::vector<std::pair<Rational, int>>& entries) {
  std::vector<SlopeEntry> v;
  for (const auto& [s, r] : entries) v.push_back({s, r});
  return numerics_make(std::move(v));
}

}  // namespace

TEST_CASE("numerics: construction, merging, and guards") {
  LocalNumerics n = nums({{Rational(5, 3), 3}, {Rational(0), 1},
                          {Rational(5, 3), 3}});
  CHECK(n.rank == 7);
  CHECK(n.swan == 10);
  REQUIRE(n.slope_multiset.size() == 2);
  CHECK(n.slope_multiset[0].slope == Rational(0));
  CHECK(n.slope_multiset[1].rank == 6);
  CHECK(numerics_equal(n, n));
  CHECK(!numerics_equal(n, nums({{Rational(5, 3), 6}})));

  CHECK(code_of([] { (void)nums({{Rational(-1, 2), 1}}); }) ==
        Errc::SlopeOutOfDomain);
  CHECK(code_of([] { (void)nums({{Rational(1), 0}}); }) ==
        Errc::SlopeOutOfDomain);
  CHECK(code_of([] { (void)nums({{Rational(1, 2), 1}}); }) ==
        Errc::NonIntegralSwan);

  // Numerics straight from a decomposed germ.
  ConnectionGerm g = germ_inf(
      3, {{-2, 0, 1, "1"}, {-1, 1, 0, "b0"}, {-2, 2, 2, "t"}});
  LocalNumerics m = numerics_of_type(formal_decompose(g));
  CHECK(m.rank == 3);
  CHECK(m.swan == 2);
}

TEST_CASE("numeric transform: pure parts along each direction") {
  // Slope 5/3 of rank 3 from infinity to infinity-hat.
  LocalNumerics a = numeric_local_fl(FlDirection::InfToInfHat,
                                     nums({{Rational(5, 3), 3}}));
  CHECK(numerics_equal(a, nums({{Rational(5, 2), 2}})));

  // Slope 2/3 of rank 3 from infinity to zero-hat.
  LocalNumerics b = numeric_local_fl(FlDirection::InfToZeroHat,
                                     nums({{Rational(2, 3), 3}}));
  CHECK(numerics_equal(b, nums({{Rational(2), 1}})));

  // A pure slope-one part transforms to the zero module at infinity-hat.
  LocalNumerics c = numeric_local_fl(FlDirection::InfToInfHat,
                                     nums({{Rational(1), 4}}));
  CHECK(c.rank == 0);
  CHECK(c.swan == 0);
  CHECK(c.slope_multiset.empty());

  // ... and also at zero-hat; slopes below one survive the zero-hat route.
  LocalNumerics d = numeric_local_fl(
      FlDirection::InfToZeroHat,
      nums({{Rational(1), 4}, {Rational(2), 1}, {Rational(1, 2), 2}}));
  CHECK(numerics_equal(d, nums({{Rational(1), 1}})));

  // Regular parts keep their rank in both unramified directions.
  LocalNumerics e = numeric_local_fl(FlDirection::ZeroToInfHat,
                                     nums({{Rational(0), 5}}));
  CHECK(numerics_equal(e, nums({{Rational(0), 5}})));
  LocalNumerics f = numeric_local_fl(FlDirection::ZeroToInfHat,
                                     nums({{Rational(1, 2), 2}}));
  CHECK(numerics_equal(f, nums({{Rational(1, 3), 3}})));
}

TEST_CASE("numeric transform: involution identities") {
  const std::vector<LocalNumerics> samples = {
      nums({{Rational(1, 2), 2}, {Rational(0), 3}}),
      nums({{Rational(2, 3), 3}, {Rational(1, 4), 4}}),
      nums({{Rational(3), 2}, {Rational(5, 3), 3}}),
  };
  for (const auto& n : samples) {
    // Zero-to-infinity-hat followed by infinity-to-zero-hat is the identity
    // (every slope s maps into [0,1) and back).
    LocalNumerics there = numeric_local_fl(FlDirection::ZeroToInfHat, n);
    LocalNumerics back = numeric_local_fl(FlDirection::InfToZeroHat, there);
    CHECK(numerics_equal(back, n));
  }
  // Infinity-to-infinity-hat is an involution on slopes above one.
  LocalNumerics n = nums({{Rational(3), 2}, {Rational(5, 3), 3}});
  LocalNumerics twice = numeric_local_fl(
      FlDirection::InfToInfHat, numeric_local_fl(FlDirection::InfToInfHat, n));
  CHECK(numerics_equal(twice, n));
}

TEST_CASE("stationary phase: slope-two exponent at infinity") {
  // q = -(t/2) w^-2 - b w^-1 maps to (1/(2t)) wh^-2 + (b/t) wh^-1.
  PuiseuxSeries q = exponent_at("w", 1, {{-2, "-t/2"}, {-1, "-b"}});
  LegendreResult r = legendre_exponent(q, FlDirection::InfToInfHat);
  CHECK(r.location.at_infinity);
  CHECK(r.qhat.ram == 1);
  CHECK(r.qhat.base_coord == sym("w"));
  CHECK(puiseux_same(r.qhat, exponent_at("w", 1, {{-2, "1/(2*t)"},
                                                  {-1, "b/t"}})));

  // Applying the transform twice composes to the pullback under negation.
  LegendreResult rr = legendre_exponent(r.qhat, FlDirection::InfToInfHat);
  CHECK(puiseux_same(exponent_sign_flip(rr.qhat), q));
}

TEST_CASE("stationary phase: slope one collects at a finite point") {
  PuiseuxSeries q = exponent_at("w", 1, {{-1, "t"}});
  LegendreResult r = legendre_exponent(q, FlDirection::InfToInfHat);
  CHECK(!r.location.at_infinity);
  CHECK(scalar_equal(r.location.location, S("-t")));
  CHECK(r.qhat.known_zero());

  // A ramified tail below slope one is returned as the residual exponent.
  PuiseuxSeries qt = exponent_at("w", 2, {{-2, "t"}, {-1, "beta"}});
  LegendreResult rt = legendre_exponent(qt, FlDirection::InfToInfHat);
  CHECK(scalar_equal(rt.location.location, S("-t")));
  CHECK(puiseux_same(rt.qhat, exponent_at("w", 2, {{-1, "beta"}})));
}

TEST_CASE("stationary phase: ramified slope 3/2 at infinity") {
  // q = -(2/3) sqrt(b) u^-3 with u^2 = w transforms to -1/(3b) wh^-3,
  // unramified and even in the choice of square root.
  Scalar beta = scalar_root(S("b"), 2);
  PuiseuxSeries q;
  q.base_coord = sym("w");
  q.ram = 2;
  q.body = make_series(ramified_coordinate(sym("w"), 2),
                       {{-3, S("-2/3") * beta}});
  LegendreResult r = legendre_exponent(q, FlDirection::InfToInfHat);
  CHECK(r.location.at_infinity);
  CHECK(r.qhat.ram == 1);
  CHECK(puiseux_same(r.qhat, exponent_at("w", 1, {{-3, "-1/(3*b)"}})));
}

TEST_CASE("stationary phase: slope 1/2 from infinity lands at zero-hat") {
  PuiseuxSeries q = exponent_at("w", 2, {{-1, "beta"}});
  LegendreResult r = legendre_exponent(q, FlDirection::InfToZeroHat);
  CHECK(!r.location.at_infinity);
  CHECK(scalar_is_zero(r.location.location));
  CHECK(r.qhat.ram == 1);
  CHECK(r.qhat.base_coord == sym("z"));
  CHECK(puiseux_same(r.qhat, exponent_at("z", 1, {{-1, "beta^2/4"}})));
}

TEST_CASE("stationary phase: regular-slope pole from zero ramifies") {
  // q = c z^-1 transforms to 2 c g u^-1 with u^2 = wh and g^2 = -1/c; the
  // square of the leading coefficient is root-choice independent.
  PuiseuxSeries q = exponent_at("z", 1, {{-1, "c"}});
  LegendreResult r = legendre_exponent(q, FlDirection::ZeroToInfHat);
  CHECK(r.location.at_infinity);
  CHECK(r.qhat.ram == 2);
  CHECK(r.qhat.base_coord == sym("w"));
  CHECK(puiseux_valuation(r.qhat) == std::pair<int, int>(-1, 2));
  Scalar lead = r.qhat.body.coeff(-1);
  CHECK(scalar_is_zero(lead * lead + S("4*c")));

  // Round trip back to zero-hat composes to the pullback under negation.
  LegendreResult back = legendre_exponent(r.qhat, FlDirection::InfToZeroHat);
  CHECK(puiseux_same(exponent_sign_flip(back.qhat), q));
}

TEST_CASE("stationary phase: domain guards") {
  PuiseuxSeries zero = puiseux_zero(sym("w"));
  CHECK(code_of([&] {
          (void)legendre_exponent(zero, FlDirection::InfToInfHat);
        }) == Errc::SlopeOutOfDomain);

  PuiseuxSeries slope1 = exponent_at("w", 1, {{-1, "t"}});
  CHECK(code_of([&] {
          (void)legendre_exponent(slope1, FlDirection::InfToZeroHat);
        }) == Errc::SlopeOutOfDomain);

  PuiseuxSeries half = exponent_at("w", 2, {{-1, "beta"}});
  CHECK(code_of([&] {
          (void)legendre_exponent(half, FlDirection::InfToInfHat);
        }) == Errc::SlopeOutOfDomain);

  // A holomorphic (slope-zero) exponent has no critical point.
  PuiseuxSeries hol = exponent_at("z", 1, {{2, "c"}});
  CHECK(code_of([&] {
          (void)legendre_exponent(hol, FlDirection::ZeroToInfHat);
        }) == Errc::SlopeOutOfDomain);
}

TEST_CASE("exponent sign flip") {
  PuiseuxSeries q = exponent_at("w", 1, {{-2, "a"}, {-1, "b"}});
  CHECK(puiseux_same(exponent_sign_flip(q),
                     exponent_at("w", 1, {{-2, "a"}, {-1, "-b"}})));
  PuiseuxSeries q3 = exponent_at("w", 3, {{-3, "a"}, {-2, "b"}});
  CHECK(puiseux_same(exponent_sign_flip(q3),
                     exponent_at("w", 3, {{-3, "-a"}, {-2, "b"}})));
  PuiseuxSeries q2 = exponent_at("w", 2, {{-1, "beta"}});
  CHECK(code_of([&] { (void)exponent_sign_flip(q2); }) ==
        Errc::UnsupportedGermShape);
}

TEST_CASE("regular-singular rule and residue eigenvalues") {
  std::vector<TransformedSummand> out =
      reg_sing_rule({S("0"), S("lam2"), S("lam3")});
  REQUIRE(out.size() == 2);
  for (const auto& t : out) {
    CHECK(t.location.at_infinity);
    CHECK(t.summand.rank == 1);
    CHECK(t.summand.ramification == 1);
    CHECK(t.summand.exponent.known_zero());
    CHECK(t.provenance == "reg-sing-rule");
  }
  CHECK(scalar_equal(*out[0].summand.residue_exponents[0], S("lam2+1")));
  CHECK(scalar_equal(*out[1].summand.residue_exponents[0], S("lam3+1")));
  CHECK(reg_sing_rule({S("0")}).empty());
  CHECK(reg_sing_rule({}).empty());

  ConnectionGerm reg = germ_zero(
      3, {{-1, 1, 1, "lam2"}, {-1, 2, 2, "lam3"}});
  std::vector<Scalar> eig = semisimple_residue_eigenvalues(reg);
  REQUIRE(eig.size() == 3);
  CHECK(scalar_is_zero(eig[0]));
  CHECK(scalar_equal(eig[1], S("lam2")));
  CHECK(scalar_equal(eig[2], S("lam3")));

  // No residue matrix at all: all eigenvalues vanish.
  ConnectionGerm triv = germ_zero(2, {{0, 0, 0, "1"}});
  CHECK(semisimple_residue_eigenvalues(triv).size() == 2);

  CHECK(code_of([] {
          (void)semisimple_residue_eigenvalues(
              germ_zero(2, {{-1, 0, 1, "1"}}));
        }) == Errc::NonSemisimpleResidue);
  CHECK(code_of([] {
          (void)semisimple_residue_eigenvalues(
              germ_zero(2, {{-2, 0, 0, "t"}}));
        }) == Errc::UnsupportedGermShape);
}

TEST_CASE("slope-one rule") {
  TransformedSummand s = slope_one_rule(S("t"), S("0"));
  CHECK(point_equal(s.location, point_finite(S("-t"))));
  CHECK(s.summand.rank == 1);
  CHECK(s.summand.exponent.known_zero());
  CHECK(scalar_equal(*s.summand.residue_exponents[0], S("-1")));
  CHECK(s.provenance == "slope-one-rule");

  TransformedSummand u = slope_one_rule(S("1"), S("b2"));
  CHECK(point_equal(u.location, point_finite(S("-1"))));
  CHECK(scalar_equal(*u.summand.residue_exponents[0], S("b2-1")));

  CHECK(code_of([] { (void)slope_one_rule(S("0"), S("c")); }) ==
        Errc::ZeroLeadingCoefficient);
}

TEST_CASE("microlocal rank at infinity") {
  // Slope-one diagonal entries contribute nothing.
  ConnectionGerm g6 = germ_inf(3, {{-2, 1, 1, "1"},
                                   {-2, 2, 2, "t"},
                                   {-1, 1, 1, "lam2"},
                                   {-1, 2, 2, "lam3"}});
  CHECK(microlocal_rank(g6, Chart::AtInfinity) == 0);

  // A slope-two line contributes swan - rank = 1.
  ConnectionGerm line = germ_inf(1, {{-3, 0, 0, "t"}});
  CHECK(microlocal_rank(line, Chart::AtInfinity) == 1);

  // Coupled cycle of slope 3/2 (swan 3, rank 2) plus a slope-two line.
  ConnectionGerm g2 = germ_inf(3, {{-3, 0, 1, "1"},
                                   {-2, 1, 0, "b"},
                                   {-3, 2, 2, "t"}});
  CHECK(microlocal_rank(g2, Chart::AtInfinity) == 2);

  // Nilpotent second-order block with regular diagonal: nothing survives.
  ConnectionGerm g5 = germ_inf(2, {{-2, 0, 1, "1"},
                                   {-1, 0, 0, "r1"},
                                   {-1, 1, 1, "r2"}});
  CHECK(microlocal_rank(g5, Chart::AtInfinity) == 0);

  CHECK(code_of([&] { (void)microlocal_rank(g6, Chart::AtZero); }) ==
        Errc::ChartMismatch);
}

TEST_CASE("microlocal rank at zero") {
  // Regular singular with residues 0, lam2, lam3: two directions survive.
  ConnectionGerm g = germ_zero(3, {{-1, 1, 1, "lam2"}, {-1, 2, 2, "lam3"}});
  CHECK(microlocal_rank(g, Chart::AtZero) == 2);

  // The trivial germ vanishes microlocally.
  ConnectionGerm triv = germ_zero(1, {{0, 0, 0, "1"}});
  CHECK(microlocal_rank(triv, Chart::AtZero) == 0);

  // An integer residue is still nonzero as an exponent here.
  ConnectionGerm one = germ_zero(1, {{-1, 0, 0, "1"}});
  CHECK(microlocal_rank(one, Chart::AtZero) == 1);
}

TEST_CASE("relation extraction ignores the residue order") {
  ConnectionGerm g = germ_inf(2, {{-3, 0, 1, "1"},
                                  {-2, 1, 0, "b"},
                                  {-1, 0, 0, "lam"},
                                  {0, 1, 1, "5"}});
  RelationSystem rel = relations_of_germ(g);
  CHECK(rel.coord == germ_coordinate(g));
  REQUIRE(rel.rows.size() == 2);
  CHECK(series_same(rel.rows[0][1], series_monomial(rel.coord, -3, S("1"))));
  CHECK(series_same(rel.rows[1][0], series_monomial(rel.coord, -2, S("b"))));
  CHECK(rel.rows[0][0].known_zero());
  CHECK(rel.rows[1][1].known_zero());
}

TEST_CASE("normal form at infinity-hat: elimination to a diagonal system") {
  // d q0 = w^-3 q1, d q1 = b w^-2 q0, d q2 = t w^-3 q2.  The first
  // generator is eliminated; the survivors decouple.
  ConnectionGerm g = germ_inf(3, {{-3, 0, 1, "1"},
                                  {-2, 1, 0, "b"},
                                  {-3, 2, 2, "t"}});
  NormalForm nf = normal_form_solver(relations_of_germ(g), point_infinity());
  CHECK(nf.location.at_infinity);
  CHECK(nf.basis == std::vector<int>{1, 2});
  const int w = sym("w");
  CHECK(series_same(nf.matrix[0][0], series_monomial(w, -4, S("1/b"))));
  CHECK(nf.matrix[0][1].known_zero());
  CHECK(nf.matrix[1][0].known_zero());
  CHECK(series_same(nf.matrix[1][1], series_monomial(w, -3, S("-1/t"))));
}

TEST_CASE("normal form at infinity-hat: coupled system without elimination") {
  ConnectionGerm g = germ_inf(2, {{-3, 0, 1, "1"}, {-3, 1, 0, "1"}});
  NormalForm nf = normal_form_solver(relations_of_germ(g), point_infinity());
  CHECK(nf.basis == std::vector<int>{0, 1});
  const int w = sym("w");
  CHECK(nf.matrix[0][0].known_zero());
  CHECK(series_same(nf.matrix[0][1], series_monomial(w, -3, S("-1"))));
  CHECK(series_same(nf.matrix[1][0], series_monomial(w, -3, S("-1"))));
  CHECK(nf.matrix[1][1].known_zero());
}

TEST_CASE("normal form at infinity-hat: seeds and degenerate generators") {
  // d q1 = (t w^-3 + b w^-2) q1 and no relation row involving q0 beyond
  // the transform itself: q0 dies, q1 survives with the integrable entry.
  ConnectionGerm g = germ_inf(2, {{-3, 1, 1, "t"}, {-2, 1, 1, "b"}});
  RelationSystem rel = relations_of_germ(g);
  NormalForm nf = normal_form_solver(rel, point_infinity());
  CHECK(nf.basis == std::vector<int>{1});
  const int w = sym("w");
  CHECK(series_same(nf.matrix[0][0],
                    make_series(w, {{-3, S("-1/t")}, {-2, S("-b/t")}})));

  // The matching exponent is exactly the stationary-phase transform of the
  // original diagonal entry's antiderivative.
  PuiseuxSeries q = exponent_at("w", 1, {{-2, "-t/2"}, {-1, "-b"}});
  PuiseuxSeries seed = legendre_exponent(q, FlDirection::InfToInfHat).qhat;
  std::vector<std::optional<PuiseuxSeries>> seeds(2);
  seeds[1] = seed;
  CHECK(normal_form_solver(rel, point_infinity(), seeds).basis ==
        std::vector<int>{1});

  seeds[1] = exponent_at("w", 1, {{-2, "1/t"}});
  CHECK(code_of([&] {
          (void)normal_form_solver(rel, point_infinity(), seeds);
        }) == Errc::SeedMismatch);
}

TEST_CASE("normal form at zero-hat: nilpotent closed form") {
  ConnectionGerm g = germ_inf(2, {{-2, 0, 1, "1"}});
  NormalForm nf = normal_form_solver(relations_of_germ(g),
                                     point_finite(S("0")));
  CHECK(nf.basis == std::vector<int>{0, 1});
  const int z = sym("z");
  CHECK(series_same(nf.matrix[0][0], series_monomial(z, -1, S("-1"))));
  CHECK(series_same(nf.matrix[0][1], series_monomial(z, -2, S("1"))));
  CHECK(nf.matrix[1][0].known_zero());
  CHECK(series_same(nf.matrix[1][1], series_monomial(z, -1, S("-1"))));

  ConnectionGerm g3 = germ_inf(3, {{-2, 0, 1, "1"}, {-2, 1, 2, "1"}});
  NormalForm nf3 = normal_form_solver(relations_of_germ(g3),
                                      point_finite(S("0")));
  CHECK(series_same(nf3.matrix[0][1], series_monomial(z, -2, S("1"))));
  CHECK(series_same(nf3.matrix[0][2], series_monomial(z, -3, S("-1"))));
  CHECK(series_same(nf3.matrix[1][2], series_monomial(z, -2, S("1"))));
  CHECK(nf3.matrix[1][0].known_zero());
  CHECK(nf3.matrix[2][0].known_zero());
  CHECK(nf3.matrix[2][1].known_zero());
}

TEST_CASE("normal form solver: rejection of out-of-scope systems") {
  // Slope-one-or-more content toward zero-hat.
  ConnectionGerm diag = germ_inf(1, {{-2, 0, 0, "1"}});
  CHECK(code_of([&] {
          (void)normal_form_solver(relations_of_germ(diag),
                                   point_finite(S("0")));
        }) == Errc::InconsistentRelations);
  ConnectionGerm steep = germ_inf(1, {{-3, 0, 0, "1"}});
  CHECK(code_of([&] {
          (void)normal_form_solver(relations_of_germ(steep),
                                   point_finite(S("0")));
        }) == Errc::InconsistentRelations);

  // Residue-order entries are not part of a relation system.
  RelationSystem bad;
  bad.coord = sym("w");
  bad.rows = {{series_monomial(sym("w"), -1, S("1"))}};
  CHECK(code_of([&] {
          (void)normal_form_solver(bad, point_infinity());
        }) == Errc::InconsistentRelations);

  // Inexact coefficients cannot be consumed.
  RelationSystem coarse;
  coarse.coord = sym("w");
  LaurentSeries cut = series_monomial(sym("w"), -2, S("1"));
  series_set_trunc(cut, 4);
  coarse.rows = {{cut}};
  CHECK(code_of([&] {
          (void)normal_form_solver(coarse, point_infinity());
        }) == Errc::TruncationTooCoarse);

  // Only the origin and infinity are valid targets.
  CHECK(code_of([&] {
          (void)normal_form_solver(relations_of_germ(diag),
                                   point_finite(S("1")));
        }) == Errc::UnsupportedGermShape);
}
