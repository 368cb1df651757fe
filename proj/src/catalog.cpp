#include "flconn/catalog.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

namespace flconn {
namespace {

using nlohmann::json;
using Params = std::map<std::string, Scalar>;

// ---------------------------------------------------------------------------
// Builders.  Each case is a rank-3 germ at infinity with fixed leading slots,
// free residue parameters, and one residue slot derived so the traces sum to
// zero; the order-2 cases add a regular origin with residue diag(0, lam2,
// lam3).
// ---------------------------------------------------------------------------

ConnectionGerm origin_residues(const Scalar& lam2, const Scalar& lam3) {
  Matrix res = matrix_zero(3);
  res[1][1] = lam2;
  res[2][2] = lam3;
  return germ_make(point_finite(Scalar(0)), 3, {{-1, res}});
}

ConnectionGerm inf_germ(
    const std::vector<std::tuple<int, int, int, Scalar>>& entries) {
  std::map<int, Matrix> coeffs;
  for (const auto& [k, i, j, v] : entries) {
    auto [it, inserted] = coeffs.emplace(k, matrix_zero(3));
    (void)inserted;
    it->second[i][j] = v;
  }
  return germ_make(point_infinity(), 3, std::move(coeffs));
}

void require_nonzero(const std::string& cs, const Scalar& v,
                     const std::string& name) {
  if (scalar_is_zero(v))
    fail(Errc::ConstraintViolation, cs + " requires " + name + " != 0");
}

void require_distinct(const std::string& cs, const Scalar& a, const Scalar& b,
                      const std::string& what) {
  if (scalar_equal(a, b))
    fail(Errc::ConstraintViolation, cs + " requires " + what);
}

Scalar sym(const std::string& name) { return scalar_parse(name); }

struct CaseDef {
  CatalogInfo info;
  std::string derived;  // trace-bound residue name, not bindable
  std::function<void(const Params&)> constraints;
  std::function<GlobalConnection(const Params&)> build;
  std::function<ConnectionGerm()> generic;
};

const std::vector<CaseDef>& case_table() {
  static const std::vector<CaseDef> table = [] {
    std::vector<CaseDef> t;

    t.push_back(CaseDef{
        {"JKTVI",
         {{"t", "t"}, {"b1", "0"}, {"b2", "0"}, {"lam2", "lam2"},
          {"lam3", "lam3"}},
         {"t != 0", "t != 1"}},
        "b0",
        [](const Params& p) {
          require_nonzero("JKTVI", p.at("t"), "t");
          require_distinct("JKTVI", p.at("t"), Scalar(1), "t != 1");
        },
        [](const Params& p) {
          const Scalar b0 =
              -p.at("lam2") - p.at("lam3") - p.at("b1") - p.at("b2");
          ConnectionGerm inf = inf_germ({{-2, 1, 1, Scalar(1)},
                                         {-2, 2, 2, p.at("t")},
                                         {-1, 0, 0, b0},
                                         {-1, 1, 1, p.at("b1")},
                                         {-1, 2, 2, p.at("b2")}});
          return global_make(
              {origin_residues(p.at("lam2"), p.at("lam3")), inf});
        },
        [] {
          return inf_germ({{-2, 0, 0, sym("a0")},
                           {-2, 1, 1, sym("a1")},
                           {-2, 2, 2, sym("a2")},
                           {-1, 0, 0, sym("b0")},
                           {-1, 1, 1, sym("b1")},
                           {-1, 2, 2, sym("b2")}});
        }});

    t.push_back(CaseDef{
        {"JKTV",
         {{"t", "t"}, {"b", "b"}, {"b1", "0"}, {"lam2", "lam2"},
          {"lam3", "lam3"}},
         {"t != 0", "b != 0"}},
        "b2",
        [](const Params& p) {
          require_nonzero("JKTV", p.at("t"), "t");
          require_nonzero("JKTV", p.at("b"), "b");
        },
        [](const Params& p) {
          const Scalar b2 = -p.at("lam2") - p.at("lam3") - p.at("b1");
          ConnectionGerm inf = inf_germ({{-2, 0, 1, Scalar(1)},
                                         {-2, 2, 2, p.at("t")},
                                         {-1, 1, 0, p.at("b")},
                                         {-1, 1, 1, p.at("b1")},
                                         {-1, 2, 2, b2}});
          return global_make(
              {origin_residues(p.at("lam2"), p.at("lam3")), inf});
        },
        [] {
          return inf_germ({{-2, 0, 1, Scalar(1)},
                           {-2, 2, 2, sym("t")},
                           {-1, 1, 0, sym("b0")},
                           {-1, 1, 1, sym("b1")},
                           {-1, 2, 2, sym("b2")}});
        }});

    t.push_back(CaseDef{
        {"JKTIVa",
         {{"b", "b"}, {"b1", "b1"}, {"lam2", "lam2"}, {"lam3", "lam3"}},
         {"b != 0"}},
        "b2",
        [](const Params& p) { require_nonzero("JKTIVa", p.at("b"), "b"); },
        [](const Params& p) {
          const Scalar b2 = -p.at("lam2") - p.at("lam3");
          ConnectionGerm inf = inf_germ({{-2, 0, 1, Scalar(1)},
                                         {-2, 1, 2, Scalar(1)},
                                         {-1, 2, 0, p.at("b")},
                                         {-1, 2, 1, p.at("b1")},
                                         {-1, 2, 2, b2}});
          return global_make(
              {origin_residues(p.at("lam2"), p.at("lam3")), inf});
        },
        [] {
          return inf_germ({{-2, 0, 1, Scalar(1)},
                           {-2, 1, 2, Scalar(1)},
                           {-1, 2, 0, sym("b0")},
                           {-1, 2, 1, sym("b1")},
                           {-1, 2, 2, sym("b2")}});
        }});

    t.push_back(CaseDef{
        {"JKTIVb",
         {{"t1", "t1"}, {"t2", "t2"}, {"b1", "b1"}, {"b2", "b2"},
          {"c1", "c1"}, {"c2", "c2"}},
         {"t1 != 0", "t2 != 0", "t1 != t2"}},
        "c0",
        [](const Params& p) {
          require_nonzero("JKTIVb", p.at("t1"), "t1");
          require_nonzero("JKTIVb", p.at("t2"), "t2");
          require_distinct("JKTIVb", p.at("t1"), p.at("t2"), "t1 != t2");
        },
        [](const Params& p) {
          const Scalar c0 = -p.at("c1") - p.at("c2");
          ConnectionGerm inf = inf_germ({{-3, 1, 1, p.at("t1")},
                                         {-3, 2, 2, p.at("t2")},
                                         {-2, 1, 1, p.at("b1")},
                                         {-2, 2, 2, p.at("b2")},
                                         {-1, 0, 0, c0},
                                         {-1, 1, 1, p.at("c1")},
                                         {-1, 2, 2, p.at("c2")}});
          return global_make({inf});
        },
        [] {
          return inf_germ({{-3, 0, 0, sym("a0")},
                           {-3, 1, 1, sym("a1")},
                           {-3, 2, 2, sym("a2")},
                           {-2, 0, 0, sym("b0")},
                           {-2, 1, 1, sym("b1")},
                           {-2, 2, 2, sym("b2")},
                           {-1, 0, 0, sym("c0")},
                           {-1, 1, 1, sym("c1")},
                           {-1, 2, 2, sym("c2")}});
        }});

    t.push_back(CaseDef{
        {"JKTII",
         {{"t", "t"}, {"b", "b"}, {"c0", "c0"}, {"c1", "c1"}},
         {"t != 0", "b != 0"}},
        "c2",
        [](const Params& p) {
          require_nonzero("JKTII", p.at("t"), "t");
          require_nonzero("JKTII", p.at("b"), "b");
        },
        [](const Params& p) {
          ConnectionGerm inf = inf_germ({{-3, 0, 1, Scalar(1)},
                                         {-3, 2, 2, p.at("t")},
                                         {-2, 1, 0, p.at("b")},
                                         {-1, 1, 0, p.at("c0")},
                                         {-1, 1, 1, p.at("c1")},
                                         {-1, 2, 2, -p.at("c1")}});
          return global_make({inf});
        },
        [] {
          return inf_germ({{-3, 0, 1, Scalar(1)},
                           {-3, 2, 2, sym("t")},
                           {-2, 1, 0, sym("b")},
                           {-1, 1, 0, sym("c0")},
                           {-1, 1, 1, sym("c1")},
                           {-1, 2, 2, sym("c2")}});
        }});

    t.push_back(CaseDef{
        {"JKTI",
         {{"b", "b"}, {"c0", "c0"}, {"c1", "c1"}},
         {"b != 0"}},
        "c2",
        [](const Params& p) { require_nonzero("JKTI", p.at("b"), "b"); },
        [](const Params& p) {
          ConnectionGerm inf = inf_germ({{-3, 0, 1, Scalar(1)},
                                         {-3, 1, 2, Scalar(1)},
                                         {-2, 2, 0, p.at("b")},
                                         {-1, 2, 0, p.at("c0")},
                                         {-1, 2, 1, p.at("c1")}});
          return global_make({inf});
        },
        [] {
          return inf_germ({{-3, 0, 1, Scalar(1)},
                           {-3, 1, 2, Scalar(1)},
                           {-2, 2, 0, sym("b")},
                           {-1, 2, 0, sym("c0")},
                           {-1, 2, 1, sym("c1")},
                           {-1, 2, 2, sym("c2")}});
        }});

    return t;
  }();
  return table;
}

const CaseDef& case_def(const std::string& name) {
  for (const auto& c : case_table())
    if (c.info.name == name) return c;
  std::string known;
  for (const auto& c : case_table())
    known += (known.empty() ? "" : ", ") + c.info.name;
  fail(Errc::ParseError, "unknown case " + name + " (expected one of " +
                             known + ")");
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : case_table()) n.push_back(c.info.name);
    return n;
  }();
  return names;
}

const CatalogInfo& catalog_info(const std::string& name) {
  return case_def(name).info;
}

GlobalConnection build_case(const std::string& name,
                            const std::map<std::string, Scalar>& params) {
  const CaseDef& def = case_def(name);
  Params resolved;
  for (const auto& [pname, dflt] : def.info.parameters)
    resolved[pname] = scalar_parse(dflt);
  for (const auto& [pname, value] : params) {
    if (!resolved.count(pname)) {
      if (pname == def.derived)
        fail(Errc::ParseError, name + " derives " + pname +
                                   " from the residue trace; it cannot be "
                                   "bound");
      fail(Errc::ParseError, name + " has no parameter " + pname);
    }
    resolved[pname] = value;
  }
  def.constraints(resolved);
  GlobalConnection g = def.build(resolved);
  TraceCheck trace = validate_residue_trace(g);
  if (!trace.ok)
    fail(Errc::InternalCheckFailure,
         "catalog build lost the residue-trace balance: " + trace.violation);
  return g;
}

ConnectionGerm generic_infinity_germ(const std::string& name) {
  return case_def(name).generic();
}

// ---------------------------------------------------------------------------
// Recorded templates.
// ---------------------------------------------------------------------------

namespace {

std::string point_label(const Point& p) {
  if (p.at_infinity) return "inf-hat";
  if (scalar_is_zero(p.location)) return "zero-hat";
  return scalar_print(p.location);
}

bool location_matches(const std::string& label, const Point& p) {
  if (label == "zero-hat") return !p.at_infinity && scalar_is_zero(p.location);
  if (label == "inf-hat") return p.at_infinity;
  return !p.at_infinity && scalar_equal(scalar_parse(label), p.location);
}

Rational rational_from_text(const std::string& text) {
  try {
    return Rational(text);
  } catch (const std::exception&) {
    fail(Errc::ParseError, "bad rational in template: " + text);
  }
}

ExpectedReport template_from_json(const json& doc) {
  ExpectedReport out;
  out.name = doc.at("name").get<std::string>();
  out.rank_hat = doc.at("rank-hat").get<int>();
  for (const json& jp : doc.at("points")) {
    ExpectedPoint p;
    p.location = jp.at("location").get<std::string>();
    p.rank = jp.at("rank").get<int>();
    p.swan = jp.at("swan").get<int>();
    if (jp.contains("slopes")) {
      std::vector<SlopeEntry> entries;
      for (const json& js : jp.at("slopes"))
        entries.push_back({rational_from_text(js.at(0).get<std::string>()),
                           js.at(1).get<int>()});
      p.slopes = std::move(entries);
    }
    if (jp.contains("summands")) {
      std::vector<ExpectedSummand> summands;
      for (const json& js : jp.at("summands")) {
        ExpectedSummand s;
        if (js.contains("ramification"))
          s.ramification = js.at("ramification").get<int>();
        if (js.contains("rank")) s.rank = js.at("rank").get<int>();
        if (js.contains("slope"))
          s.slope = rational_from_text(js.at("slope").get<std::string>());
        if (js.contains("residues")) {
          std::vector<std::optional<Scalar>> res;
          for (const json& jr : js.at("residues"))
            res.push_back(jr.is_null()
                              ? std::optional<Scalar>()
                              : std::optional<Scalar>(
                                    scalar_parse(jr.get<std::string>())));
          s.residues = std::move(res);
        }
        summands.push_back(std::move(s));
      }
      p.summands = std::move(summands);
    }
    if (jp.contains("matrix")) {
      const json& jm = jp.at("matrix");
      ExpectedMatrix m;
      m.basis_size = jm.at("basis").get<int>();
      if (jm.contains("entries"))
        for (const json& je : jm.at("entries"))
          m.entries.emplace_back(je.at(0).get<int>(), je.at(1).get<int>(),
                                 je.at(2).get<int>(),
                                 scalar_parse(je.at(3).get<std::string>()));
      if (jm.contains("zeros"))
        for (const json& je : jm.at("zeros"))
          m.zeros.emplace_back(je.at(0).get<int>(), je.at(1).get<int>(),
                               je.at(2).get<int>());
      p.matrix = std::move(m);
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

void compare_point(const ExpectedPoint& e, const TransformedPoint& g,
                   std::vector<std::string>& diffs) {
  const std::string at = "point " + e.location + ": ";
  if (!location_matches(e.location, g.location)) {
    diffs.push_back(at + "expected this location, found " +
                    point_label(g.location));
    return;
  }
  if (g.numerics.rank != e.rank)
    diffs.push_back(at + "rank: expected " + std::to_string(e.rank) +
                    ", found " + std::to_string(g.numerics.rank));
  if (g.numerics.swan != e.swan)
    diffs.push_back(at + "swan: expected " + std::to_string(e.swan) +
                    ", found " + std::to_string(g.numerics.swan));
  if (e.slopes) {
    LocalNumerics want = numerics_make(*e.slopes);
    if (!numerics_equal(want, g.numerics))
      diffs.push_back(at + "slopes: expected " + slopes_print(*e.slopes) +
                      ", found " + slopes_print(g.numerics.slope_multiset));
  }
  if (e.summands) {
    if (g.type.summands.size() != e.summands->size()) {
      diffs.push_back(at + "summand count: expected " +
                      std::to_string(e.summands->size()) + ", found " +
                      std::to_string(g.type.summands.size()));
    } else {
      for (size_t i = 0; i < e.summands->size(); ++i) {
        const ExpectedSummand& es = (*e.summands)[i];
        const FormalSummand& gs = g.type.summands[i];
        const std::string sat = at + "summand " + std::to_string(i) + ": ";
        if (es.ramification && gs.ramification != *es.ramification)
          diffs.push_back(sat + "ramification: expected " +
                          std::to_string(*es.ramification) + ", found " +
                          std::to_string(gs.ramification));
        if (es.rank && gs.rank != *es.rank)
          diffs.push_back(sat + "rank: expected " +
                          std::to_string(*es.rank) + ", found " +
                          std::to_string(gs.rank));
        if (es.slope && gs.slope() != *es.slope)
          diffs.push_back(sat + "slope mismatch");
        if (es.residues) {
          if (gs.residue_exponents.size() != es.residues->size()) {
            diffs.push_back(sat + "residue count: expected " +
                            std::to_string(es.residues->size()) + ", found " +
                            std::to_string(gs.residue_exponents.size()));
            continue;
          }
          for (size_t j = 0; j < es.residues->size(); ++j) {
            if (!(*es.residues)[j]) continue;
            const Scalar& want = *(*es.residues)[j];
            const std::string rat =
                sat + "residue " + std::to_string(j) + ": ";
            if (!gs.residue_exponents[j])
              diffs.push_back(rat + "expected " + scalar_print(want) +
                              ", unknown in the report");
            else if (!scalar_equal(*gs.residue_exponents[j], want))
              diffs.push_back(rat + "expected " + scalar_print(want) +
                              ", found " +
                              scalar_print(*gs.residue_exponents[j]));
          }
        }
      }
    }
  }
  if (e.matrix) {
    if (!g.matrix) {
      diffs.push_back(at + "matrix: expected a presentation, none recorded");
      return;
    }
    if ((int)g.matrix->basis.size() != e.matrix->basis_size) {
      diffs.push_back(at + "matrix basis: expected " +
                      std::to_string(e.matrix->basis_size) + " generators, "
                      "found " + std::to_string(g.matrix->basis.size()));
      return;
    }
    auto slot = [&](int i, int j, int k) {
      return at + "matrix entry (" + std::to_string(i) + ", " +
             std::to_string(j) + ") at order " + std::to_string(k) + ": ";
    };
    auto coeff_or_diff = [&](int i, int j, int k) -> std::optional<Scalar> {
      try {
        return g.matrix->matrix[i][j].coeff(k);
      } catch (const Error&) {
        diffs.push_back(slot(i, j, k) +
                        "not determined at this truncation");
        return std::nullopt;
      }
    };
    for (const auto& [i, j, k, want] : e.matrix->entries) {
      std::optional<Scalar> got = coeff_or_diff(i, j, k);
      if (got && !scalar_equal(*got, want))
        diffs.push_back(slot(i, j, k) + "expected " + scalar_print(want) +
                        ", found " + scalar_print(*got));
    }
    for (const auto& [i, j, k] : e.matrix->zeros) {
      std::optional<Scalar> got = coeff_or_diff(i, j, k);
      if (got && !scalar_is_zero(*got))
        diffs.push_back(slot(i, j, k) + "expected 0, found " +
                        scalar_print(*got));
    }
  }
}

}  // namespace

ExpectedReport expected_report(const std::string& name) {
  (void)case_def(name);  // validate the name first
  const std::string path =
      std::string(FLCONN_DATA_DIR) + "/expected/" + name + ".json";
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open template " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, "template " + path + ": " + e.what());
  }
  try {
    return template_from_json(doc);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, "template " + path + ": " + e.what());
  }
}

VerifyResult compare_with_expected(const TransformReport& r,
                                   const ExpectedReport& e) {
  VerifyResult out;
  if (r.rank_hat != e.rank_hat)
    out.diffs.push_back("rank-hat: expected " + std::to_string(e.rank_hat) +
                        ", found " + std::to_string(r.rank_hat));
  for (const auto& c : r.checks)
    if (!c.pass)
      out.diffs.push_back("check " + c.name + " failed: " + c.details);
  if (r.points.size() != e.points.size()) {
    out.diffs.push_back("point count: expected " +
                        std::to_string(e.points.size()) + ", found " +
                        std::to_string(r.points.size()));
  } else {
    for (size_t i = 0; i < e.points.size(); ++i)
      compare_point(e.points[i], r.points[i], out.diffs);
  }
  out.pass = out.diffs.empty();
  return out;
}

VerifyResult verify_case(const std::string& name) {
  return compare_with_expected(fourier_transform(build_case(name)),
                               expected_report(name));
}

}  // namespace flconn
