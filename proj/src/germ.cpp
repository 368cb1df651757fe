#include "flconn/germ.hpp"

#include <algorithm>
#include <sstream>

namespace flconn {

// ---------------------------------------------------------------------------
// Points and matrices
// ---------------------------------------------------------------------------

Point point_finite(const Scalar& c) { return Point{false, c}; }
Point point_infinity() { return Point{true, Scalar(0)}; }

bool point_equal(const Point& a, const Point& b) {
  if (a.at_infinity != b.at_infinity) return false;
  return a.at_infinity || scalar_equal(a.location, b.location);
}

std::string point_print(const Point& p) {
  return p.at_infinity ? "inf" : scalar_print(p.location);
}

Matrix matrix_zero(int n) {
  return Matrix(n, std::vector<Scalar>(n, Scalar(0)));
}

Matrix matrix_identity(int n) {
  Matrix m = matrix_zero(n);
  for (int i = 0; i < n; ++i) m[i][i] = Scalar(1);
  return m;
}

// ---------------------------------------------------------------------------
// Germ construction
// ---------------------------------------------------------------------------

int ConnectionGerm::pole_order() const {
  int order = 0;
  for (const auto& [k, m] : matrix_coefficients) {
    (void)m;
    if (k < 0) order = std::max(order, -k);
  }
  return order;
}

ConnectionGerm germ_make(Point point, int rank, std::map<int, Matrix> coeffs) {
  if (rank < 1)
    fail(Errc::ParseError, "germ rank must be positive, got " +
                               std::to_string(rank));
  ConnectionGerm g;
  g.point = point;
  g.rank = rank;
  for (auto& [k, m] : coeffs) {
    if ((int)m.size() != rank)
      fail(Errc::ParseError, "coefficient matrix is not rank x rank");
    bool nonzero = false;
    for (auto& row : m) {
      if ((int)row.size() != rank)
        fail(Errc::ParseError, "coefficient matrix is not rank x rank");
      for (auto& e : row) nonzero = nonzero || !e.syntactically_zero();
    }
    if (nonzero) g.matrix_coefficients.emplace(k, std::move(m));
  }
  return g;
}

int germ_coordinate(const ConnectionGerm& g) {
  return SymbolTable::instance().intern(g.point.at_infinity ? "w" : "z");
}

LaurentSeries germ_polar_entry(const ConnectionGerm& g, int i, int j) {
  std::map<int, Scalar> terms;
  for (const auto& [k, m] : g.matrix_coefficients)
    if (k < 0 && !m[i][j].syntactically_zero()) terms.emplace(k, m[i][j]);
  return make_series(germ_coordinate(g), std::move(terms));
}

std::vector<std::vector<int>> polar_blocks(const ConnectionGerm& g) {
  const int n = g.rank;
  std::vector<std::vector<int>> adj(n);
  for (const auto& [k, mat] : g.matrix_coefficients) {
    if (k >= 0) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && !scalar_is_zero(mat[i][j])) {
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
  }
  std::vector<int> seen(n, 0);
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<int> block, stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      block.push_back(v);
      for (int u : adj[v])
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  return blocks;
}

ConnectionGerm polar_subgerm(const ConnectionGerm& g,
                             const std::vector<int>& block) {
  const int m = (int)block.size();
  std::map<int, Matrix> coeffs;
  for (const auto& [k, mat] : g.matrix_coefficients) {
    Matrix sub = matrix_zero(m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) sub[a][b] = mat[block[a]][block[b]];
    coeffs[k] = std::move(sub);
  }
  return germ_make(g.point, m, std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Characteristic polynomial of a Laurent-series matrix
// ---------------------------------------------------------------------------

namespace {

// Polynomial in the eigenvalue variable X with Laurent-series coefficients;
// index = X-degree.
using XPoly = std::vector<LaurentSeries>;

XPoly xp_mul(const XPoly& a, const XPoly& b, int coord) {
  XPoly out(a.size() + b.size() - 1, series_zero(coord));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      out[i + j] = series_add(out[i + j], series_mul(a[i], b[j]));
  return out;
}

void xp_acc(XPoly& a, const XPoly& b, bool negate, int coord) {
  if (a.size() < b.size()) a.resize(b.size(), series_zero(coord));
  for (size_t i = 0; i < b.size(); ++i)
    a[i] = negate ? series_sub(a[i], b[i]) : series_add(a[i], b[i]);
}

XPoly xp_det(const std::vector<std::vector<XPoly>>& m, int coord) {
  size_t n = m.size();
  if (n == 1) return m[0][0];
  XPoly out{series_zero(coord)};
  for (size_t j = 0; j < n; ++j) {
    std::vector<std::vector<XPoly>> minor;
    for (size_t r = 1; r < n; ++r) {
      std::vector<XPoly> row;
      for (size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    xp_acc(out, xp_mul(m[0][j], xp_det(minor, coord), coord), j % 2 == 1,
           coord);
  }
  return out;
}

// det(X I - P) for a rank x rank Laurent matrix P.
XPoly char_poly(const std::vector<std::vector<LaurentSeries>>& p, int coord) {
  size_t n = p.size();
  if (n > 8)
    fail(Errc::UnsupportedGermShape,
         "rank too large for the determinant routine");
  std::vector<std::vector<XPoly>> entries(n, std::vector<XPoly>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      XPoly e{series_neg(p[i][j])};
      if (i == j) e.push_back(series_monomial(coord, 0, Scalar(1)));
      entries[i][j] = std::move(e);
    }
  XPoly out = xp_det(entries, coord);
  out.resize(n + 1, series_zero(coord));
  return out;
}

std::vector<std::vector<LaurentSeries>> polar_matrix(const ConnectionGerm& g) {
  std::vector<std::vector<LaurentSeries>> p(
      g.rank, std::vector<LaurentSeries>(g.rank));
  for (int i = 0; i < g.rank; ++i)
    for (int j = 0; j < g.rank; ++j) p[i][j] = germ_polar_entry(g, i, j);
  return p;
}

long long cross(std::pair<int, int> a, std::pair<int, int> b,
                std::pair<int, int> c) {
  return (long long)(b.first - a.first) * (c.second - a.second) -
         (long long)(b.second - a.second) * (c.first - a.first);
}

}  // namespace

NewtonPolygon char_newton_polygon(const ConnectionGerm& g) {
  if (g.pole_order() < 1)
    fail(Errc::UnsupportedGermShape,
         "a germ without poles has no characteristic polygon");
  int coord = germ_coordinate(g);
  XPoly c = char_poly(polar_matrix(g), coord);
  NewtonPolygon np;
  for (int i = 0; i <= g.rank; ++i)
    if (!c[i].known_zero()) np.points.push_back({i, c[i].valuation()});
  if (np.points.size() == 1)
    fail(Errc::DegeneratePolygon,
         "characteristic polynomial collapses to X^rank over a nonzero "
         "polar part");
  np.zero_eigenvalues = np.points.front().first;
  std::vector<std::pair<int, int>> hull;
  for (const auto& pt : np.points) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), pt) <= 0)
      hull.pop_back();
    hull.push_back(pt);
  }
  int total = np.zero_eigenvalues;
  Rational prev;
  for (size_t i = 1; i < hull.size(); ++i) {
    HullSegment seg;
    seg.length = hull[i].first - hull[i - 1].first;
    seg.ascent = Rational(hull[i].second - hull[i - 1].second, seg.length);
    if (i > 1 && seg.ascent <= prev)
      fail(Errc::InternalCheckFailure, "hull ascents are not increasing");
    prev = seg.ascent;
    total += seg.length;
    np.lower_hull.push_back(seg);
  }
  if (total != g.rank)
    fail(Errc::InternalCheckFailure,
         "hull lengths do not account for the full rank");
  return np;
}

std::vector<SlopeEntry> polygon_slopes(const NewtonPolygon& np) {
  std::map<Rational, int> merged;
  if (np.zero_eigenvalues > 0) merged[Rational(0)] += np.zero_eigenvalues;
  for (const auto& seg : np.lower_hull) {
    Rational s = seg.ascent - 1;
    if (s < 0) s = 0;
    merged[s] += seg.length;
  }
  std::vector<SlopeEntry> out;
  for (const auto& [s, r] : merged) out.push_back({s, r});
  return out;
}

std::string slopes_print(const std::vector<SlopeEntry>& entries) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& e : entries) {
    if (!first) os << ", ";
    first = false;
    os << e.slope << " x" << e.rank;
  }
  os << "}";
  return os.str();
}

// ---------------------------------------------------------------------------
// Formal decomposition
// ---------------------------------------------------------------------------

Rational FormalSummand::slope() const {
  if (exponent.known_zero()) return Rational(0);
  auto [num, den] = puiseux_valuation(exponent);
  Rational s(-num, den);
  return s < 0 ? Rational(0) : s;
}

// Canonical exponent: only the polar part matters (e^h is a unit for
// holomorphic h, so nonnegative orders are gauge).  A branch truncated at a
// nonnegative order is therefore exactly known as an exponent.
PuiseuxSeries exponent_polar_part(const PuiseuxSeries& a) {
  PuiseuxSeries out = a;
  for (auto it = out.body.terms.begin(); it != out.body.terms.end();)
    it = (it->first >= 0) ? out.body.terms.erase(it) : ++it;
  if (out.body.trunc >= 0) series_set_trunc(out.body, kExactOrder);
  return puiseux_normalize(out);
}

namespace {

// Strip exponents >= -1 from a polar series (residue handled separately,
// holomorphic parts ignored).
LaurentSeries polar_proper(const LaurentSeries& a) {
  LaurentSeries out = a;
  for (auto it = out.terms.begin(); it != out.terms.end();)
    it = (it->first >= -1) ? out.terms.erase(it) : ++it;
  return out;
}

// Drop the tau^{-1} coefficient of a Puiseux branch (its residue contribution
// is not reliably determined by the characteristic polynomial).
PuiseuxSeries drop_log_order(const PuiseuxSeries& a) {
  PuiseuxSeries out = a;
  out.body.terms.erase(-out.ram);
  return out;
}

FormalSummand rank_one_summand(const LaurentSeries& diag_entry) {
  FormalSummand s;
  LaurentSeries proper = polar_proper(diag_entry);
  s.exponent = puiseux_from_laurent(series_integrate(proper));
  s.ramification = 1;
  s.rank = 1;
  s.residue_exponents = {diag_entry.coeff(-1)};
  return s;
}

}  // namespace

FormalType formal_decompose(const ConnectionGerm& g) {
  int n = g.rank;
  int coord = germ_coordinate(g);
  auto p = polar_matrix(g);
  FormalType type;
  type.rank = n;

  // Coupling components of the polar part.
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int seed = 0; seed < n; ++seed) {
    if (comp[seed] >= 0) continue;
    std::vector<int> stack{seed};
    comp[seed] = ncomp;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        if (comp[j] >= 0) continue;
        if (!p[i][j].known_zero() || !p[j][i].known_zero()) {
          comp[j] = ncomp;
          stack.push_back(j);
        }
      }
    }
    ++ncomp;
  }

  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (comp[i] == c) idx.push_back(i);
    int m = (int)idx.size();
    if (m == 1) {
      type.summands.push_back(rank_one_summand(p[idx[0]][idx[0]]));
      continue;
    }
    std::vector<std::vector<LaurentSeries>> sub(
        m, std::vector<LaurentSeries>(m));
    int sub_pole = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        sub[i][j] = p[idx[i]][idx[j]];
        if (!sub[i][j].known_zero())
          sub_pole = std::max(sub_pole, -sub[i][j].valuation());
      }
    XPoly cp = char_poly(sub, coord);
    bool binomial = true;
    for (int i = 1; i < m; ++i) binomial = binomial && cp[i].known_zero();
    if (!binomial)
      fail(Errc::UnsupportedGermShape,
           "coupled block without a binomial characteristic polynomial");
    if (cp[0].known_zero()) {
      if (sub_pole == 1) {
        // Nilpotent residue: regular singular, all exponents zero.
        FormalSummand s;
        s.exponent = puiseux_zero(coord);
        s.rank = m;
        s.residue_exponents.assign(m, Scalar(0));
        type.summands.push_back(std::move(s));
        continue;
      }
      fail(Errc::UnsupportedGermShape,
           "nilpotent characteristic data at an irregular pole");
    }
    // X^m = -c0: eigenvalue branches by Puiseux root.
    PuiseuxSeries branch =
        puiseux_root(puiseux_from_laurent(series_neg(cp[0])), m);
    int d = branch.ram;
    if (d == m) {
      FormalSummand s;
      s.exponent =
          exponent_polar_part(puiseux_integrate(drop_log_order(branch)));
      s.ramification = m;
      s.rank = m;
      s.residue_exponents.assign(m, std::nullopt);
      type.summands.push_back(std::move(s));
    } else if (m == 2 && d == 1) {
      for (int sign = 0; sign < 2; ++sign) {
        PuiseuxSeries b = sign ? puiseux_neg(branch) : branch;
        FormalSummand s;
        s.exponent = exponent_polar_part(puiseux_integrate(drop_log_order(b)));
        s.ramification = 1;
        s.rank = 1;
        s.residue_exponents.assign(1, std::nullopt);
        type.summands.push_back(std::move(s));
      }
    } else {
      fail(Errc::UnsupportedGermShape,
           "branch orbits of this ramification are not representable");
    }
  }

  int total = 0;
  for (const auto& s : type.summands) total += s.rank;
  if (total != n)
    fail(Errc::InternalCheckFailure, "summand ranks do not sum to the rank");
  return type;
}

std::vector<SlopeEntry> type_slopes(const FormalType& t) {
  std::map<Rational, int> merged;
  for (const auto& s : t.summands) merged[s.slope()] += s.rank;
  std::vector<SlopeEntry> out;
  for (const auto& [s, r] : merged) out.push_back({s, r});
  return out;
}

int swan_from_slopes(const std::vector<SlopeEntry>& entries) {
  Rational total(0);
  for (const auto& e : entries) total += e.slope * e.rank;
  if (denominator(total) != 1 || total < 0)
    fail(Errc::NonIntegralSwan,
         "slope-weighted rank sum is not a nonnegative integer: " +
             total.str());
  return (int)numerator(total);
}

int type_swan(const FormalType& t) { return swan_from_slopes(type_slopes(t)); }

Rational type_katz(const FormalType& t) {
  Rational k(0);
  for (const auto& s : t.summands) k = std::max(k, s.slope());
  return k;
}

std::string formal_type_serialize(const FormalType& t) {
  std::ostringstream os;
  os << "formal-type rank " << t.rank << "\n";
  for (const auto& s : t.summands) {
    os << "summand ram " << s.ramification << " rank " << s.rank
       << " residues [";
    bool first = true;
    for (const auto& r : s.residue_exponents) {
      if (!first) os << "; ";
      first = false;
      os << (r ? scalar_print(*r) : std::string("?"));
    }
    os << "] exponent " << puiseux_print(s.exponent) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Slopes with the dual-route cross-check
// ---------------------------------------------------------------------------

namespace {

bool slope_lists_equal(const std::vector<SlopeEntry>& a,
                       const std::vector<SlopeEntry>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].slope != b[i].slope || a[i].rank != b[i].rank) return false;
  return true;
}

}  // namespace

std::vector<SlopeEntry> slopes(const ConnectionGerm& g) {
  bool have_polygon = false, have_type = false;
  std::vector<SlopeEntry> from_polygon, from_type;
  try {
    from_polygon = polygon_slopes(char_newton_polygon(g));
    have_polygon = true;
  } catch (const Error& e) {
    if (e.code() != Errc::DegeneratePolygon &&
        e.code() != Errc::UnsupportedGermShape)
      throw;
  }
  try {
    from_type = type_slopes(formal_decompose(g));
    have_type = true;
  } catch (const Error& e) {
    if (e.code() != Errc::UnsupportedGermShape) throw;
  }
  if (have_polygon && have_type) {
    if (!slope_lists_equal(from_polygon, from_type))
      fail(Errc::OracleDisagreement,
           "polygon slopes " + slopes_print(from_polygon) +
               " disagree with decomposition slopes " +
               slopes_print(from_type));
    return from_polygon;
  }
  if (have_polygon) return from_polygon;
  if (have_type) return from_type;
  fail(Errc::UnsupportedGermShape,
       "neither the polygon nor the decomposition path supports this germ");
}

int swan(const ConnectionGerm& g) { return swan_from_slopes(slopes(g)); }

Rational katz(const ConnectionGerm& g) {
  Rational k(0);
  for (const auto& e : slopes(g)) k = std::max(k, e.slope);
  return k;
}

// ---------------------------------------------------------------------------
// Global connections
// ---------------------------------------------------------------------------

GlobalConnection global_make(std::vector<ConnectionGerm> germs) {
  if (germs.empty())
    fail(Errc::ParseError, "a global connection needs at least one germ");
  GlobalConnection g;
  g.rank = germs.front().rank;
  for (const auto& germ : germs)
    if (germ.rank != g.rank)
      fail(Errc::ParseError, "all germs must share one rank");
  g.germs = std::move(germs);
  return g;
}

TraceCheck validate_residue_trace(const GlobalConnection& g) {
  Scalar total(0);
  for (const auto& germ : g.germs) {
    auto it = germ.matrix_coefficients.find(-1);
    if (it == germ.matrix_coefficients.end()) continue;
    for (int i = 0; i < germ.rank; ++i) total += it->second[i][i];
  }
  if (scalar_is_zero(total)) return {true, ""};
  return {false, scalar_print(total) + " != 0"};
}

// ---------------------------------------------------------------------------
// Twists
// ---------------------------------------------------------------------------

ConnectionGerm twist_log(const ConnectionGerm& g, const Scalar& lambda) {
  auto coeffs = g.matrix_coefficients;
  auto [it, inserted] = coeffs.emplace(-1, matrix_zero(g.rank));
  (void)inserted;
  for (int i = 0; i < g.rank; ++i) it->second[i][i] += lambda;
  return germ_make(g.point, g.rank, std::move(coeffs));
}

ConnectionGerm twist_bundle(const ConnectionGerm& g, int k) {
  return twist_log(g, Scalar(k));
}

ConnectionGerm twist_exponent(const ConnectionGerm& g,
                              const LaurentSeries& q0) {
  if (q0.coord != germ_coordinate(g))
    fail(Errc::CoordinateMismatch,
         "twist exponent is not in the germ's local coordinate");
  LaurentSeries dq = series_derive(q0);
  auto coeffs = g.matrix_coefficients;
  for (const auto& [k, c] : dq.terms) {
    auto [it, inserted] = coeffs.emplace(k, matrix_zero(g.rank));
    (void)inserted;
    for (int i = 0; i < g.rank; ++i) it->second[i][i] += c;
  }
  return germ_make(g.point, g.rank, std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string germ_serialize(const ConnectionGerm& g) {
  std::ostringstream os;
  os << "germ\n";
  os << "point " << point_print(g.point) << "\n";
  os << "rank " << g.rank << "\n";
  for (const auto& [k, m] : g.matrix_coefficients)
    for (int i = 0; i < g.rank; ++i)
      for (int j = 0; j < g.rank; ++j)
        if (!m[i][j].syntactically_zero())
          os << "a " << k << " " << i << " " << j << " "
             << scalar_print(m[i][j]) << "\n";
  os << "end\n";
  return os.str();
}

std::string global_serialize(const GlobalConnection& g) {
  std::ostringstream os;
  os << "global\n";
  for (const auto& germ : g.germs) os << germ_serialize(germ);
  os << "end\n";
  return os.str();
}

namespace {

std::string next_word(std::istringstream& line) {
  std::string w;
  line >> w;
  return w;
}

ConnectionGerm parse_germ_block(std::istream& in) {
  Point point;
  bool have_point = false;
  int rank = 0;
  std::map<int, Matrix> coeffs;
  struct Entry {
    int k, i, j;
    Scalar value;
  };
  std::vector<Entry> entries;
  std::string raw;
  while (std::getline(in, raw)) {
    std::istringstream line(raw);
    std::string head = next_word(line);
    if (head.empty() || head[0] == '#') continue;
    if (head == "end") {
      if (!have_point) fail(Errc::ParseError, "germ block without a point");
      if (rank < 1) fail(Errc::ParseError, "germ block without a valid rank");
      std::map<int, Matrix> mats;
      for (const auto& e : entries) {
        if (e.i < 0 || e.i >= rank || e.j < 0 || e.j >= rank)
          fail(Errc::ParseError, "matrix entry index out of range");
        auto [it, inserted] = mats.emplace(e.k, matrix_zero(rank));
        (void)inserted;
        it->second[e.i][e.j] = e.value;
      }
      return germ_make(point, rank, std::move(mats));
    }
    if (head == "point") {
      std::string rest;
      std::getline(line, rest);
      size_t b = rest.find_first_not_of(" \t");
      if (b == std::string::npos)
        fail(Errc::ParseError, "point line without a value");
      rest = rest.substr(b);
      point = rest == "inf" ? point_infinity()
                            : point_finite(scalar_parse(rest));
      have_point = true;
    } else if (head == "rank") {
      if (!(line >> rank))
        fail(Errc::ParseError, "rank line without an integer");
    } else if (head == "a") {
      Entry e{0, 0, 0, Scalar(0)};
      if (!(line >> e.k >> e.i >> e.j))
        fail(Errc::ParseError, "matrix entry line needs k i j indices");
      std::string rest;
      std::getline(line, rest);
      e.value = scalar_parse(rest);
      entries.push_back(std::move(e));
    } else {
      fail(Errc::ParseError, "unknown germ directive: " + head);
    }
  }
  fail(Errc::ParseError, "germ block not closed with 'end'");
}

}  // namespace

GlobalConnection global_parse_text(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::vector<ConnectionGerm> germs;
  bool in_global = false, closed = false;
  while (std::getline(in, raw)) {
    std::istringstream line(raw);
    std::string head = next_word(line);
    if (head.empty() || head[0] == '#') continue;
    if (head == "global") {
      in_global = true;
    } else if (head == "germ") {
      germs.push_back(parse_germ_block(in));
    } else if (head == "end") {
      if (!in_global)
        fail(Errc::ParseError, "'end' outside of a global block");
      closed = true;
    } else {
      fail(Errc::ParseError, "unknown directive: " + head);
    }
  }
  if (in_global && !closed)
    fail(Errc::ParseError, "global block not closed with 'end'");
  return global_make(std::move(germs));
}

}  // namespace flconn
