#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <string>

#include "flconn/germ.hpp"

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

bool slopes_are(const std::vector<SlopeEntry>& got,
                const std::vector<std::pair<Rational, int>>& want) {
  if (got.size() != want.size()) return false;
  for (size_t i = 0; i < got.size(); ++i)
    if (got[i].slope != want[i].first || got[i].rank != want[i].second)
      return false;
  return true;
}

// Germ at infinity with sparse entries given as (k, i, j, scalar text).
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

PuiseuxSeries exponent_inf(const std::map<int, std::string>& terms) {
  std::map<int, Scalar> t;
  for (const auto& [k, text] : terms) t.emplace(k, S(text));
  return puiseux_from_laurent(make_series(sym("w"), std::move(t)));
}

}  // namespace

TEST_CASE("points, construction, and basic validation") {
  CHECK(point_equal(point_finite(S("-t")), point_finite(S("-t"))));
  CHECK(!point_equal(point_finite(S("0")), point_infinity()));
  CHECK(!point_equal(point_finite(S("1")), point_finite(S("-1"))));
  CHECK(point_print(point_infinity()) == "inf");

  CHECK(code_of([] { germ_make(point_infinity(), 0, {}); }) ==
        Errc::ParseError);
  CHECK(code_of([] {
          germ_make(point_infinity(), 2, {{-1, matrix_zero(3)}});
        }) == Errc::ParseError);

  // Identically zero coefficient matrices are dropped.
  ConnectionGerm g =
      germ_make(point_infinity(), 2, {{-5, matrix_zero(2)}});
  CHECK(g.matrix_coefficients.empty());
  CHECK(g.pole_order() == 0);

  ConnectionGerm h = germ_inf(2, {{-3, 0, 1, "1"}, {0, 0, 0, "t"}});
  CHECK(h.pole_order() == 3);
}

TEST_CASE("characteristic polygon: irregular block shapes") {
  // Block [[0, w^-3], [b w^-2, 0]]: eigenvalue growth 5/2, system slope 3/2.
  ConnectionGerm g2 = germ_inf(2, {{-3, 0, 1, "1"}, {-2, 1, 0, "b"}});
  NewtonPolygon np = char_newton_polygon(g2);
  REQUIRE(np.lower_hull.size() == 1);
  CHECK(np.zero_eigenvalues == 0);
  CHECK(np.points == std::vector<std::pair<int, int>>{{0, -5}, {2, 0}});
  CHECK(np.lower_hull[0].ascent == Rational(5, 2));
  CHECK(np.lower_hull[0].length == 2);
  CHECK(slopes_are(polygon_slopes(np), {{Rational(3, 2), 2}}));
  CHECK(swan_from_slopes(polygon_slopes(np)) == 3);

  // Scalar t w^-3: growth 3, system slope 2.
  ConnectionGerm g1 = germ_inf(1, {{-3, 0, 0, "t"}});
  CHECK(slopes_are(polygon_slopes(char_newton_polygon(g1)), {{Rational(2), 1}}));

  // Cyclic rank-3 shape with product w^-5: slope 2/3 with multiplicity 3.
  ConnectionGerm g3 = germ_inf(
      3, {{-1, 0, 1, "1"}, {-2, 1, 2, "1"}, {-2, 2, 0, "b0"}});
  NewtonPolygon np3 = char_newton_polygon(g3);
  REQUIRE(np3.lower_hull.size() == 1);
  CHECK(np3.lower_hull[0].ascent == Rational(5, 3));
  CHECK(slopes_are(polygon_slopes(np3), {{Rational(2, 3), 3}}));
  CHECK(swan_from_slopes(polygon_slopes(np3)) == 2);
}

TEST_CASE("characteristic polygon: regular and degenerate cases") {
  // Pure residue with distinct nonzero eigenvalues: all system slopes 0.
  ConnectionGerm reg =
      germ_inf(2, {{-1, 0, 0, "lam"}, {-1, 1, 1, "mu"}});
  CHECK(slopes_are(polygon_slopes(char_newton_polygon(reg)),
                   {{Rational(0), 2}}));

  // Nilpotent residue: characteristic polynomial collapses to X^2.
  ConnectionGerm nil = germ_inf(2, {{-1, 0, 1, "1"}});
  CHECK(code_of([&] { (void)char_newton_polygon(nil); }) ==
        Errc::DegeneratePolygon);
  // The decomposition route still classifies it as regular.
  CHECK(slopes_are(slopes(nil), {{Rational(0), 2}}));
  CHECK(swan(nil) == 0);

  // Smooth germ: no polygon at all.
  ConnectionGerm smooth = germ_inf(1, {{0, 0, 0, "t"}});
  CHECK(code_of([&] { (void)char_newton_polygon(smooth); }) ==
        Errc::UnsupportedGermShape);
  CHECK(slopes_are(slopes(smooth), {{Rational(0), 1}}));

  // Vanishing determinant: the zero eigenvalue is counted, not drawn.
  ConnectionGerm half = germ_inf(2, {{-2, 1, 1, "t"}});
  NewtonPolygon nph = char_newton_polygon(half);
  CHECK(nph.zero_eigenvalues == 1);
  REQUIRE(nph.lower_hull.size() == 1);
  CHECK(nph.lower_hull[0].ascent == Rational(2));
  CHECK(slopes_are(polygon_slopes(nph), {{Rational(0), 1}, {Rational(1), 1}}));
  CHECK(slopes_are(slopes(half), {{Rational(0), 1}, {Rational(1), 1}}));
}

TEST_CASE("formal decomposition: diagonal germs") {
  // diag(0, 1, t) w^-2 + diag(b0, b1, b2) w^-1.
  ConnectionGerm g = germ_inf(3, {{-2, 1, 1, "1"},
                                  {-2, 2, 2, "t"},
                                  {-1, 0, 0, "b0"},
                                  {-1, 1, 1, "b1"},
                                  {-1, 2, 2, "b2"}});
  FormalType t = formal_decompose(g);
  REQUIRE(t.summands.size() == 3);
  CHECK(t.rank == 3);

  CHECK(t.summands[0].exponent.known_zero());
  CHECK(t.summands[0].slope() == Rational(0));
  REQUIRE(t.summands[0].residue_exponents.size() == 1);
  CHECK(scalar_equal(*t.summands[0].residue_exponents[0], S("b0")));

  CHECK(puiseux_same(t.summands[1].exponent, exponent_inf({{-1, "-1"}})));
  REQUIRE(t.summands[1].residue_exponents.size() == 1);
  CHECK(scalar_equal(*t.summands[1].residue_exponents[0], S("b1")));

  CHECK(puiseux_same(t.summands[2].exponent, exponent_inf({{-1, "-t"}})));
  CHECK(scalar_equal(*t.summands[2].residue_exponents[0], S("b2")));

  CHECK(slopes_are(type_slopes(t), {{Rational(0), 1}, {Rational(1), 2}}));
  CHECK(type_swan(t) == 2);
  CHECK(type_katz(t) == Rational(1));
  // Same multiset through the cross-checked entry point.
  CHECK(slopes_are(slopes(g), {{Rational(0), 1}, {Rational(1), 2}}));

  // Generic variant: all three leading entries nonzero gives slopes 1,1,1.
  ConnectionGerm gen = germ_inf(
      3, {{-2, 0, 0, "a0"}, {-2, 1, 1, "a1"}, {-2, 2, 2, "a2"}});
  CHECK(slopes_are(slopes(gen), {{Rational(1), 3}}));
  CHECK(swan(gen) == 3);
  CHECK(katz(gen) == Rational(1));
}

TEST_CASE("formal decomposition: pole order three diagonal") {
  // diag entries t_i w^-3 + b_i w^-2 + c_i w^-1 and one regular direction.
  ConnectionGerm g = germ_inf(3, {{-1, 0, 0, "c0"},
                                  {-3, 1, 1, "t1"},
                                  {-2, 1, 1, "b1"},
                                  {-1, 1, 1, "c1"},
                                  {-3, 2, 2, "t2"},
                                  {-2, 2, 2, "b2"},
                                  {-1, 2, 2, "c2"}});
  FormalType t = formal_decompose(g);
  REQUIRE(t.summands.size() == 3);
  CHECK(t.summands[0].exponent.known_zero());
  CHECK(scalar_equal(*t.summands[0].residue_exponents[0], S("c0")));
  CHECK(puiseux_same(t.summands[1].exponent,
                     exponent_inf({{-2, "-t1/2"}, {-1, "-b1"}})));
  CHECK(puiseux_same(t.summands[2].exponent,
                     exponent_inf({{-2, "-t2/2"}, {-1, "-b2"}})));
  CHECK(scalar_equal(*t.summands[1].residue_exponents[0], S("c1")));
  CHECK(slopes_are(slopes(g), {{Rational(0), 1}, {Rational(2), 2}}));
  CHECK(swan(g) == 4);
  CHECK(katz(g) == Rational(2));
}

TEST_CASE("formal decomposition: ramified nilpotent-plus-corner block") {
  // [[0, w^-2],[b0 w^-1, 0]] ⊕ [t w^-2]: slope-1/2 rank-2 summand plus
  // a rank-1 summand with exponent -t w^-1.
  ConnectionGerm g = germ_inf(
      3, {{-2, 0, 1, "1"}, {-1, 1, 0, "b0"}, {-2, 2, 2, "t"}});
  FormalType t = formal_decompose(g);
  REQUIRE(t.summands.size() == 2);

  const FormalSummand& ram = t.summands[0];
  CHECK(ram.rank == 2);
  CHECK(ram.ramification == 2);
  CHECK(ram.slope() == Rational(1, 2));
  REQUIRE(ram.residue_exponents.size() == 2);
  CHECK(!ram.residue_exponents[0].has_value());
  CHECK(!ram.residue_exponents[1].has_value());
  // Exponent -2 sqrt(b0) u^-1 with u^2 = w; check u-support and slope only
  // (the square root enters as a bound parameter).
  CHECK(ram.exponent.ram == 2);
  CHECK(puiseux_valuation(ram.exponent) == std::pair<int, int>(-1, 2));

  const FormalSummand& tail = t.summands[1];
  CHECK(tail.rank == 1);
  CHECK(puiseux_same(tail.exponent, exponent_inf({{-1, "-t"}})));

  CHECK(slopes_are(slopes(g), {{Rational(1, 2), 2}, {Rational(1), 1}}));
  CHECK(swan(g) == 2);
  CHECK(katz(g) == Rational(1));
}

TEST_CASE("formal decomposition: unsupported coupled shapes") {
  // Non-binomial coupled block (nilpotent leading part at pole order 2 with
  // a diagonal residue): decomposition refuses, polygon still answers.
  ConnectionGerm g = germ_inf(2, {{-2, 0, 1, "1"},
                                  {-1, 0, 0, "-1"},
                                  {-1, 1, 1, "-1"}});
  CHECK(code_of([&] { (void)formal_decompose(g); }) ==
        Errc::UnsupportedGermShape);
  CHECK(slopes_are(slopes(g), {{Rational(0), 2}}));

  // Nilpotent characteristic data at an irregular pole is not representable.
  ConnectionGerm bad = germ_inf(2, {{-2, 0, 1, "1"}});
  CHECK(code_of([&] { (void)formal_decompose(bad); }) ==
        Errc::UnsupportedGermShape);
}

TEST_CASE("swan integrality guard reports NonIntegralSwan") {
  CHECK(code_of([] {
          (void)swan_from_slopes({{Rational(1, 2), 1}});
        }) == Errc::NonIntegralSwan);
  CHECK(swan_from_slopes({{Rational(1, 2), 2}, {Rational(5, 3), 3}}) == 6);
}

TEST_CASE("residue trace validation across a global connection") {
  ConnectionGerm at0 = germ_make(
      point_finite(S("0")), 2,
      {{-1, Matrix{{S("t"), S("0")}, {S("0"), S("b")}}}});
  ConnectionGerm atinf_ok = germ_inf(2, {{-1, 0, 0, "-t"}, {-1, 1, 1, "-b"}});
  ConnectionGerm atinf_bad = germ_inf(2, {{-1, 0, 0, "-t"}});

  TraceCheck ok = validate_residue_trace(global_make({at0, atinf_ok}));
  CHECK(ok.ok);
  TraceCheck bad = validate_residue_trace(global_make({at0, atinf_bad}));
  CHECK(!bad.ok);
  CHECK(bad.violation.find("!= 0") != std::string::npos);

  CHECK(code_of([] { (void)global_make({}); }) == Errc::ParseError);
  ConnectionGerm r1 = germ_inf(1, {{-1, 0, 0, "t"}});
  CHECK(code_of([&] { (void)global_make({at0, r1}); }) == Errc::ParseError);
}

TEST_CASE("twists") {
  ConnectionGerm g = germ_inf(3, {{-2, 1, 1, "1"},
                                  {-2, 2, 2, "t"},
                                  {-1, 0, 0, "lam1"},
                                  {-1, 1, 1, "lam2"},
                                  {-1, 2, 2, "lam3"}});

  // Logarithmic twist by -lam1 kills the first residue eigenvalue.
  FormalType t1 = formal_decompose(twist_log(g, S("-lam1")));
  CHECK(scalar_is_zero(*t1.summands[0].residue_exponents[0]));
  CHECK(scalar_equal(*t1.summands[1].residue_exponents[0], S("lam2-lam1")));
  CHECK(scalar_equal(*t1.summands[2].residue_exponents[0], S("lam3-lam1")));

  // Integer bundle twist shifts every residue exponent by k.
  FormalType t2 = formal_decompose(twist_bundle(g, 2));
  CHECK(scalar_equal(*t2.summands[0].residue_exponents[0], S("lam1+2")));

  // Twist by the zero exponent is the identity.
  CHECK(germ_serialize(twist_exponent(g, series_zero(sym("w")))) ==
        germ_serialize(g));

  // Twist by a slope-2 exponent dominates every slope below 2.
  LaurentSeries q0 = make_series(sym("w"), {{-2, S("c")}});
  CHECK(slopes_are(slopes(g), {{Rational(0), 1}, {Rational(1), 2}}));
  CHECK(slopes_are(slopes(twist_exponent(g, q0)), {{Rational(2), 3}}));
  CHECK(swan(twist_exponent(g, q0)) == 6);

  // Twist by a holomorphic exponent changes no slope.
  LaurentSeries hol = make_series(sym("w"), {{1, S("5")}});
  CHECK(slopes_are(slopes(twist_exponent(g, hol)),
                   {{Rational(0), 1}, {Rational(1), 2}}));

  // The exponent must live in the germ's coordinate.
  CHECK(code_of([&] {
          (void)twist_exponent(g, series_zero(sym("z")));
        }) == Errc::CoordinateMismatch);
}

TEST_CASE("serialization round-trips and rejects malformed input") {
  ConnectionGerm at0 = germ_make(
      point_finite(S("0")), 2,
      {{-1, Matrix{{S("t"), S("1")}, {S("0"), S("-t")}}}});
  ConnectionGerm atinf = germ_inf(2, {{-3, 0, 1, "1"}, {-2, 1, 0, "b"}});
  GlobalConnection g = global_make({at0, atinf});

  std::string text = global_serialize(g);
  GlobalConnection back = global_parse_text(text);
  CHECK(global_serialize(back) == text);
  CHECK(back.rank == 2);
  REQUIRE(back.germs.size() == 2);
  CHECK(point_equal(back.germs[0].point, point_finite(S("0"))));
  CHECK(back.germs[1].point.at_infinity);
  CHECK(slopes_are(slopes(back.germs[1]), {{Rational(3, 2), 2}}));

  // A single bare germ block parses too (comments and blanks ignored).
  GlobalConnection single = global_parse_text(
      "# round-trip\ngerm\npoint inf\nrank 1\na -2 0 0 t^2-1\nend\n");
  CHECK(scalar_equal(single.germs[0].matrix_coefficients.at(-2)[0][0],
                     S("t^2-1")));

  CHECK(code_of([] {
          (void)global_parse_text("germ\npoint inf\nrank 0\nend\n");
        }) == Errc::ParseError);
  CHECK(code_of([] {
          (void)global_parse_text("germ\npoint inf\nrank 1\na -1 0 2 1\nend\n");
        }) == Errc::ParseError);
  CHECK(code_of([] { (void)global_parse_text("germ\npoint inf\nrank 1\n"); }) ==
        Errc::ParseError);
  CHECK(code_of([] { (void)global_parse_text("banana\n"); }) ==
        Errc::ParseError);
  CHECK(code_of([] { (void)global_parse_text("global\ngerm\npoint 0\nrank 1\n"
                                             "end\n"); }) == Errc::ParseError);

  // FormalType serialization shows ramification and unknown residues.
  ConnectionGerm ramified =
      germ_inf(2, {{-2, 0, 1, "1"}, {-1, 1, 0, "b0"}});
  std::string ft = formal_type_serialize(formal_decompose(ramified));
  CHECK(ft.find("ram 2 rank 2") != std::string::npos);
  CHECK(ft.find("?") != std::string::npos);
}
