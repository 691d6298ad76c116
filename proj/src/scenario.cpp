// SPDX-License-Identifier: Apache-2.0
#include "rext/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <set>

#include <json.hpp>

#include "rext/bachflat.hpp"
#include "rext/curvature.hpp"
#include "rext/invariants.hpp"
#include "rext/metric.hpp"

namespace rext {

using Json = nlohmann::ordered_json;

namespace {

// Column order of the per-point quantities.
const char* const kColumns[] = {"detG",     "R2323",     "tau",   "normRho2",  "normR2",     "classifier",
                                "classifier2", "normDR2", "normDW2", "cubic",   "beta1",      "beta2",
                                "blocks",   "zeros",     "bach",  "thm11",     "p1",         "p2",
                                "q3",       "bachMixed", "bachFiber", "brinkmann", "einstein", "WminusE1E1",
                                "WplusE1E2", "WplusMax", "WminusMax"};

const std::map<std::string, std::vector<std::string>> kCheckQuantities{
    {"curvature", {"detG", "R2323", "tau", "bach"}},
    {"bachflat", {"bach"}},
    {"invariants", {"tau", "normRho2", "normR2", "beta1", "beta2"}},
    {"vsi", {"tau", "normRho2", "normR2", "classifier", "classifier2", "normDR2", "normDW2", "cubic"}},
    {"walker", {"beta1", "beta2", "blocks"}},
    {"zeros", {"zeros", "R2323"}},
    {"conformal", {"brinkmann", "einstein"}},
    {"identities", {"q3", "p1", "p2", "bachMixed", "bachFiber"}},
    {"frame", {"WminusE1E1", "WplusE1E2", "WplusMax", "WminusMax"}},
};

std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json jnum(double v) { return std::isfinite(v) ? Json(v) : Json(num(v)); }

std::string timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json convention_json() {
  const ConventionRecord& c = conventions();
  return Json{{"curvature_operator", c.curvature_operator},
              {"riemann_components", c.riemann_components},
              {"ricci", c.ricci},
              {"scalar", c.scalar},
              {"weyl", c.weyl},
              {"covariant_derivative", c.covariant_derivative},
              {"divergence", c.divergence},
              {"bach", c.bach},
              {"theta", c.theta},
              {"two_forms", c.two_forms},
              {"affine_ricci_sign", kAffineRicciSign},
              {"classify_tolerance", kClassifyTolerance},
              {"coordinates", "(x1, x2, y1, y2), component names 1-based"},
              {"second_operator_form", "corrected"}};
}

double matrix_max(const Matrix4& e) {
  double r = 0.0;
  for (const auto& row : e)
    for (double x : row) r = std::max(r, std::abs(x));
  return r;
}

double sym_max(const JetTensor& t) {
  double r = 0.0;
  for (std::size_t n = 0; n < t.size(); ++n) r = std::max(r, std::abs(t.flat(n).value()));
  return r;
}

struct PointRecord {
  Point4 p;
  std::map<std::string, double> q;
  std::set<std::string> undefined;
  std::vector<std::string> flags;
  Json details = Json::object();
};

class Evaluator {
 public:
  Evaluator(const ScenarioConfig& c, const std::vector<std::string>& checks)
      : c_(c), metric_(build_scenario_metric(c)), spec_(scenario_nilpotent(c)) {
    for (const std::string& ch : checks)
      for (const std::string& q : kCheckQuantities.at(ch)) want_.insert(q);
    for (const Expectation& x : c.expectations) want_.insert(x.quantity);
    checks_ = std::set<std::string>(checks.begin(), checks.end());
    if (checks_.count("bachflat") && c.endo_kind == "canonical" && !c.mirrored) want_.insert("thm11");
    if (!c.conformal_factor.empty()) phi_ = ScalarField(scenario_expr(c, "conformal_factor", c.conformal_factor));
    if ((want_.count("brinkmann") || want_.count("einstein")) && !phi_)
      throw Error(ErrorCode::InvalidArgument, "conformal checks need evaluation.conformal_factor");
    if ((want_.count("p1") || want_.count("p2") || want_.count("q3") || want_.count("bachMixed") ||
         want_.count("bachFiber")) &&
        !spec_)
      throw Error(ErrorCode::InvalidArgument, "operator identities need endomorphism kind nilpotent_spec");
  }

  const ExtensionMetric& metric() const { return metric_; }

  PointRecord at(const Point4& p) const {
    PointRecord r;
    r.p = p;
    auto want = [&](std::initializer_list<const char*> names) {
      for (const char* n : names)
        if (want_.count(n)) return true;
      return false;
    };

    const JordanClass jc = classify_point(metric_.endo(), p);
    r.details["jordan"] = Json{{"kind", to_string(jc.kind)},
                               {"lambda1", {jnum(jc.lambda1.real()), jnum(jc.lambda1.imag())}},
                               {"lambda2", {jnum(jc.lambda2.real()), jnum(jc.lambda2.imag())}}};

    if (want_.count("detG")) r.q["detG"] = determinant(metric_values(metric_.field(), p));

    const bool need_bach = want({"bach"}) || checks_.count("curvature");
    const bool need_pack = need_bach || want({"R2323", "tau", "normRho2", "normR2", "classifier", "classifier2",
                                              "brinkmann", "WminusE1E1", "WplusE1E2", "WplusMax", "WminusMax"});
    std::optional<CurvaturePack> pack;
    if (need_pack) {
      PackOptions po;
      po.order = need_bach ? c_.order : std::min(c_.order, 3);
      po.bach = need_bach;
      po.weyl_derivatives = need_bach;
      pack = curvature_pack(metric_.field(), p, po);
      r.q["R2323"] = pack->riemann(1, 2, 1, 2).value();
      const QuadraticInvariants qi = quadratic_invariants(*pack);
      r.q["tau"] = qi.tau;
      r.q["normRho2"] = qi.norm_rho2;
      r.q["normR2"] = qi.norm_r2;
      r.q["classifier"] = classifier_primary(qi);
      r.q["classifier2"] = classifier_secondary(qi);
      if (pack->bach) r.q["bach"] = sym_max(*pack->bach);
    }

    if (checks_.count("curvature")) {
      Json comp = Json::object();
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            for (int l = k + 1; l < 4; ++l)
              if (4 * i + j <= 4 * k + l)
                comp[component_name("R", {i, j, k, l})] = jnum(pack->riemann(i, j, k, l).value());
      Json ric = Json::object();
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) ric[component_name("rho", {i, j})] = jnum(pack->ricci(i, j).value());
      Json bach = Json::object();
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) bach[component_name("B", {i, j})] = jnum((*pack->bach)(i, j).value());
      r.details["curvature"] = Json{{"riemann", comp},
                                    {"ricci", ric},
                                    {"weyl_max", jnum(pack->weyl.max_abs_value())},
                                    {"bach", bach},
                                    {"bach_trace_max", jnum(std::abs(max_trace_bach(*pack)))}};
    }

    if (want({"thm11"})) {
      const auto t = thm11_check(metric_.surface(), p);
      r.q["thm11"] = std::max(t[0], t[1]);
    }

    if (checks_.count("vsi") || want({"normDR2", "normDW2", "cubic"})) {
      if (checks_.count("vsi")) {
        const VsiReport v = vsi_classify(metric_, p, c_.tol, true);
        r.details["vsi"] = Json{{"verdict", to_string(v.verdict)},
                                {"witness", v.witness},
                                {"witness_value", jnum(v.witness_value)},
                                {"nilpotent_by_classifier", v.nilpotent_by_classifier},
                                {"nilpotent_by_eigenvalues", v.nilpotent_by_eigenvalues},
                                {"consistent", v.consistent}};
        if (!v.consistent) r.flags.push_back("vsi:inconsistent");
        if (v.derivative) {
          r.q["normDR2"] = v.derivative->norm_dr2;
          r.q["normDW2"] = v.derivative->norm_dw2;
          r.q["cubic"] = v.derivative->cubic;
        }
      } else {
        const DerivativeInvariants d = derivative_level_invariants(metric_.field(), p, std::max(c_.order, 4));
        r.q["normDR2"] = d.norm_dr2;
        r.q["normDW2"] = d.norm_dw2;
        r.q["cubic"] = d.cubic;
      }
    }

    if (want({"beta1", "beta2", "blocks"})) {
      const bool strict = checks_.count("walker") > 0 || walker_expected();
      try {
        const WalkerInvariants w = walker_invariants(metric_, p);
        auto put = [&](const char* name, const std::optional<double>& v, WalkerFlag f) {
          if (v) {
            r.q[name] = *v;
          } else {
            r.undefined.insert(name);
            r.flags.push_back(std::string(name) + ":" + to_string(f));
          }
        };
        put("beta1", w.beta1, w.beta1_flag);
        put("beta2", w.beta2, w.beta2_flag);
        Json wj{{"mirrored", w.mirrored},
                {"rho_h", {{w.rho_h[0][0], w.rho_h[0][1]}, {w.rho_h[1][0], w.rho_h[1][1]}}},
                {"Omega_h", jnum(w.omega_h)}};
        if (w.omega_form) wj["omega_h"] = {jnum((*w.omega_form)[0]), jnum((*w.omega_form)[1])};
        r.details["walker"] = wj;
        if (want_.count("blocks")) {
          if (w.mirrored) {
            r.undefined.insert("blocks");
            r.flags.push_back("blocks:mirrored");
          } else {
            r.q["blocks"] = walker_blocks(metric_, p).max();
          }
        }
      } catch (const Error& e) {
        if (strict || e.code() != ErrorCode::InvalidArgument) throw;
        for (const char* n : {"beta1", "beta2", "blocks"}) r.undefined.insert(n);
        r.flags.push_back("beta:not-walker");
      }
    }

    if (want({"zeros"})) {
      const StructuralZerosReport z = structural_zeros(metric_, p);
      r.q["zeros"] = z.max_violation;
      r.q["R2323"] = z.r2323;
      Json viol = Json::array();
      for (const ZeroEntry& e : z.violations) viol.push_back({{"name", e.name}, {"value", jnum(e.value)}});
      r.details["zeros"] = Json{{"ok", z.ok}, {"violations", viol}, {"allowed_checked", z.allowed.size()}};
    }

    if (phi_ && (want({"brinkmann", "einstein"}) || checks_.count("conformal"))) {
      const double f = phi_->value(p);
      if (!(f > 0)) throw Error(ErrorCode::Domain, "conformal factor must be positive at the sample points");
      r.q["brinkmann"] = matrix_max(brinkmann_e(*pack, *phi_, p)) / f;
      r.q["einstein"] = einstein_residual(metric_.field(), *phi_, p);
    }

    if (want({"p1", "p2", "q3", "bachMixed", "bachFiber"})) {
      const QIdentityReport q = q_identities(metric_.surface(), *spec_, p, metric_.deformation());
      r.q["p1"] = q.p1;
      r.q["p2"] = q.p2;
      r.q["q3"] = q.q3_residual;
      r.q["bachMixed"] = q.mixed_block;
      r.q["bachFiber"] = q.fiber_block;
      r.details["identities"] = Json{{"B_11", jnum(q.b11)},         {"B_12", jnum(q.b12)},
                                     {"B_22", jnum(q.b22)},         {"alpha", jnum(q.alpha)},
                                     {"xi", jnum(q.xi)},            {"Q3", jnum(q.q3)},
                                     {"b11_residual", jnum(q.b11_residual)},
                                     {"b12_residual", jnum(q.b12_residual)},
                                     {"b22_residual", jnum(q.b22_residual)}};
    }

    if (want({"WminusE1E1", "WplusE1E2", "WplusMax", "WminusMax"})) {
      const FrameSD f = frame_sd(*pack);
      double wp = 0.0, wm = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          wp = std::max(wp, std::abs(f.w_plus[a][b].value()));
          wm = std::max(wm, std::abs(f.w_minus[a][b].value()));
        }
      r.q["WminusE1E1"] = f.w_minus[0][0].value();
      r.q["WplusE1E2"] = f.w_plus[0][1].value();
      r.q["WplusMax"] = wp;
      r.q["WminusMax"] = wm;
    }

    // Keep only what was asked for.
    for (auto it = r.q.begin(); it != r.q.end();) it = want_.count(it->first) ? std::next(it) : r.q.erase(it);
    return r;
  }

 private:
  static double max_trace_bach(const CurvaturePack& pack) {
    double t = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t += pack.g_inv[i][j].value() * (*pack.bach)(i, j).value();
    return t;
  }
  bool walker_expected() const {
    for (const Expectation& x : c_.expectations)
      if (x.quantity == "beta1" || x.quantity == "beta2" || x.quantity == "blocks") return true;
    return false;
  }

  const ScenarioConfig& c_;
  ExtensionMetric metric_;
  std::optional<NilpotentSpec> spec_;
  std::optional<ScalarField> phi_;
  std::set<std::string> want_;
  std::set<std::string> checks_;
};

Assertion evaluate(const ScenarioConfig& c, const Expectation& x, const std::vector<PointRecord>& rows) {
  Assertion a;
  a.name = c.name + (c.sweep_label.empty() ? "" : "[" + c.sweep_label + "]") + "." + x.name;
  a.quantity = x.quantity;
  a.citation = x.citation;
  a.provenance = x.provenance;
  a.bound = to_string(x.bound);
  a.tol = x.bound == Expectation::Bound::Equal ? (x.tol < 0 ? c.tol : x.tol) : 0.0;
  const Expr expected = scenario_expr(c, "expect." + x.name + ".value", x.value);
  int used = 0, undefined = 0;
  bool first = true;
  for (const PointRecord& r : rows) {
    const auto it = r.q.find(x.quantity);
    if (it == r.q.end()) {
      ++undefined;
      continue;
    }
    ++used;
    const double v = it->second, e = expected.eval(r.p);
    double res = 0.0;
    switch (x.bound) {
      case Expectation::Bound::Equal:
        res = std::abs(v - e) / (x.relative ? std::max(1.0, std::abs(e)) : 1.0);
        break;
      case Expectation::Bound::Upper:
      case Expectation::Bound::Lower:
        res = v - e;
        break;
    }
    if (first || res > a.residual || std::isnan(res)) {
      a.residual = res;
      a.value = v;
      a.expected = e;
      first = false;
    }
  }
  if (used == 0) {
    a.pass = x.allow_undefined && undefined > 0;
    a.note = undefined ? "undefined at every sample point" : "no sample points";
    return a;
  }
  if (undefined && !x.allow_undefined) {
    a.pass = false;
    a.note = std::to_string(undefined) + " sample points where the quantity is undefined";
    return a;
  }
  switch (x.bound) {
    case Expectation::Bound::Equal: a.pass = a.residual <= a.tol; break;
    case Expectation::Bound::Upper: a.pass = a.residual <= 0.0; break;
    case Expectation::Bound::Lower: a.pass = a.residual > 0.0; break;
  }
  if (undefined) a.note = std::to_string(undefined) + " sample points skipped as undefined";
  return a;
}

void enforce_tags(Assertion& a) {
  static const std::set<std::string> kProvenance{"PAPER", "DERIVED", "TRIVIAL"};
  if (!a.citation.empty() && kProvenance.count(a.provenance)) return;
  a.pass = false;
  a.note = "missing or invalid citation/provenance tag";
}

Json assertion_json(const Assertion& a) {
  Json j{{"name", a.name},         {"quantity", a.quantity},  {"bound", a.bound},
         {"value", jnum(a.value)}, {"expected", jnum(a.expected)}, {"residual", jnum(a.residual)},
         {"tol", jnum(a.tol)},     {"pass", a.pass},          {"citation", a.citation},
         {"provenance", a.provenance}};
  if (!a.note.empty()) j["note"] = a.note;
  return j;
}

Json scenario_json(const ScenarioConfig& c, const std::vector<std::string>& checks) {
  Json consts = Json::object();
  for (const auto& [k, v] : c.constants) consts[k] = v;
  Json surf{{"kind", c.surface_kind}, {"constants", consts}};
  for (const auto& [k, v] : c.surface) surf[k] = v;
  Json endo{{"kind", c.endo_kind}};
  for (const auto& [k, v] : c.endo) endo[k] = v;
  if (c.endo_kind == "canonical") endo["mirrored"] = c.mirrored;
  Json j{{"name", c.name}};
  if (!c.sweep_label.empty()) j["sweep"] = c.sweep_label;
  if (!c.description.empty()) j["description"] = c.description;
  j["surface"] = surf;
  j["endomorphism"] = endo;
  j["deformation"] = {{"phi11", c.deformation[0]}, {"phi12", c.deformation[1]}, {"phi22", c.deformation[2]}};
  j["evaluation"] = {{"order", c.order},
                     {"tol", c.tol},
                     {"seed", c.seed},
                     {"random", c.random_points},
                     {"checks", checks}};
  if (!c.conformal_factor.empty()) j["evaluation"]["conformal_factor"] = c.conformal_factor;
  return j;
}

Json report_header(const std::string& name, bool timestamp) {
  Json j{{"report", name}};
  if (timestamp) j["generated_at"] = timestamp_now();
  j["conventions"] = convention_json();
  return j;
}

std::string finish(Json& j, const RunReport& r) {
  Json all = Json::array();
  for (const Assertion& a : r.assertions) all.push_back(assertion_json(a));
  j["assertions"] = all;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

}  // namespace

RunReport run_scenarios(std::span<const ScenarioConfig> scenarios, const std::string& name, const RunOptions& opt,
                        std::vector<Assertion> extra) {
  RunReport report;
  report.name = name;
  Json j = report_header(name, opt.timestamp);
  Json arr = Json::array();

  std::vector<std::string> columns;
  std::vector<std::pair<std::string, PointRecord>> all_rows;
  std::set<std::string> present;

  for (ScenarioConfig c : scenarios) {
    if (opt.seed) c.seed = *opt.seed;
    if (opt.order) c.order = *opt.order;
    if (opt.tol) c.tol = *opt.tol;
    if (opt.points) {
      c.points = *opt.points;
      c.random_points = 0;
    }
    std::vector<std::string> checks = opt.checks.empty() ? c.checks : opt.checks;
    if (checks.empty() && c.expectations.empty()) checks = {"curvature"};
    for (const std::string& ch : checks)
      if (!kCheckQuantities.count(ch)) throw Error(ErrorCode::InvalidArgument, "unknown check '" + ch + "'");

    const Evaluator ev(c, checks);
    const std::vector<Point4> pts = sample_points(c);
    std::vector<PointRecord> rows;
    rows.reserve(pts.size());
    for (const Point4& p : pts) rows.push_back(ev.at(p));

    Json sj = scenario_json(c, checks);
    Json pj = Json::array();
    const std::string label = c.name + (c.sweep_label.empty() ? "" : "[" + c.sweep_label + "]");
    for (const PointRecord& r : rows) {
      Json vals = Json::object();
      for (const char* col : kColumns) {
        if (r.q.count(col)) {
          vals[col] = jnum(r.q.at(col));
          present.insert(col);
        } else if (r.undefined.count(col)) {
          vals[col] = nullptr;
          present.insert(col);
        }
      }
      pj.push_back(Json{{"x1", r.p.x1}, {"x2", r.p.x2}, {"y1", r.p.y1}, {"y2", r.p.y2}, {"values", vals},
                        {"flags", r.flags}, {"details", r.details}});
      all_rows.emplace_back(label, r);
    }
    sj["points"] = pj;
    Json aj = Json::array();
    for (const Expectation& x : c.expectations) {
      Assertion a = evaluate(c, x, rows);
      if (opt.require_tags) enforce_tags(a);
      aj.push_back(assertion_json(a));
      report.pass = report.pass && a.pass;
      report.assertions.push_back(std::move(a));
    }
    sj["assertions"] = aj;
    arr.push_back(sj);
  }
  j["scenarios"] = arr;
  if (!extra.empty()) {
    Json ej = Json::array();
    for (Assertion& a : extra) {
      if (opt.require_tags) enforce_tags(a);
      ej.push_back(assertion_json(a));
      report.pass = report.pass && a.pass;
      report.assertions.push_back(std::move(a));
    }
    j["identities"] = ej;
  }
  report.json = finish(j, report);

  for (const char* col : kColumns)
    if (present.count(col)) columns.emplace_back(col);
  const bool multi = scenarios.size() > 1;
  std::string csv = multi ? "scenario,x1,x2,y1,y2" : "x1,x2,y1,y2";
  for (const std::string& col : columns) csv += "," + col;
  csv += ",flags\n";
  for (const auto& [label, r] : all_rows) {
    if (multi) csv += "\"" + label + "\",";
    csv += num(r.p.x1) + "," + num(r.p.x2) + "," + num(r.p.y1) + "," + num(r.p.y2);
    for (const std::string& col : columns) {
      const auto it = r.q.find(col);
      csv += "," + (it == r.q.end() ? std::string() : num(it->second));
    }
    std::string flags;
    for (const std::string& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    csv += "," + flags + "\n";
  }
  report.csv = csv;
  return report;
}

RunReport run_scenario(const ScenarioConfig& scenario, const RunOptions& opt) {
  return run_scenarios(std::span(&scenario, 1), scenario.name, opt);
}

RunReport solve_pde_report(const AffineSurface& s, const PdeRequest& req, bool timestamp) {
  RunReport report;
  report.name = "solve_pde";
  const ConvergenceReport c = bach_convergence(s, req.data, req.grid, req.levels, {}, req.march);
  Json j = report_header(report.name, timestamp);
  j["surface"] = s.label();
  j["cauchy_data"] = {{"xi0", req.data.xi0.to_string()},
                      {"alpha0", req.data.alpha0.to_string()},
                      {"alpha1", req.data.alpha1.to_string()}};
  j["march"] = {{"stepper", to_string(req.march.stepper)},
                {"cfl", req.march.cfl},
                {"cap", req.march.cap},
                {"alpha_floor", req.march.alpha_floor}};
  Json lv = Json::array();
  for (const ConvergenceLevel& l : c.levels)
    lv.push_back({{"L", l.grid.length},
                  {"n1", l.grid.n1},
                  {"n2", l.grid.n2},
                  {"h1", l.grid.h1()},
                  {"h2", l.grid.h2()},
                  {"residual_p1", jnum(l.residual.p1)},
                  {"residual_p2", jnum(l.residual.p2)},
                  {"max_bach", jnum(l.bach)}});
  j["levels"] = lv;
  j["bach_ratios"] = c.bach_ratios;
  j["residual_ratios"] = c.residual_ratios;

  auto add = [&](std::string name, double value, double expected, bool pass, std::string bound) {
    Assertion a;
    a.name = std::move(name);
    a.quantity = "bach";
    a.citation = "Theorem 1.4";
    a.provenance = "DERIVED";
    a.bound = std::move(bound);
    a.value = value;
    a.expected = expected;
    a.residual = value - expected;
    a.pass = pass;
    report.pass = report.pass && pass;
    report.assertions.push_back(a);
  };
  const double finest = c.levels.back().bach;
  add("solve_pde.finest_bach", finest, req.bach_tol, finest <= req.bach_tol, "upper");
  for (std::size_t k = 0; k < c.bach_ratios.size(); ++k)
    add("solve_pde.bach_ratio_" + std::to_string(k), c.bach_ratios[k], req.min_ratio,
        c.bach_ratios[k] >= req.min_ratio, "lower");
  report.json = finish(j, report);

  const StripGrid fine = c.levels.back().grid;
  const FieldOnGrid f =
      solve_p2(s, solve_p1(s, req.data.xi0, fine, req.march), req.data.alpha0, req.data.alpha1, req.march);
  std::string csv = "i,j,x1,x2,xi,alpha,alpha_x1\n";
  for (int i = 0; i <= fine.n1; ++i)
    for (int jj = 0; jj < fine.n2; ++jj) {
      const int n = fine.index(i, jj);
      csv += std::to_string(i) + "," + std::to_string(jj) + "," + num(fine.x1(i)) + "," + num(fine.x2(jj)) + "," +
             num(f.xi[n]) + "," + num(f.alpha[n]) + "," + num(f.alpha_x1[n]) + "\n";
    }
  report.csv = csv;
  return report;
}

RunReport normalize_report(const EndoField& t, const Point4& p0, const NormalizeOptions& opt, double tol,
                           bool timestamp) {
  RunReport report;
  report.name = "normalize";
  const NormalizationResult n = normalize_nilpotent(t, p0, opt);
  Json j = report_header(report.name, timestamp);
  j["endomorphism"] = t.label();
  j["base_point"] = {p0.x1, p0.x2};
  j["grid"] = {{"n1", n.n1}, {"n2", n.n2}, {"width", opt.width}, {"height", opt.height}, {"step", opt.step}};
  j["kernel_column"] = n.column + 1;
  j["residual"] = jnum(n.residual);
  j["nilpotency_residual"] = jnum(n.nilpotency_residual);
  j["bracket_residual"] = jnum(n.bracket_residual);
  Assertion a;
  a.name = "normalize.pushforward";
  a.quantity = "pushforward_residual";
  a.citation = "normalization of nilpotent structures";
  a.provenance = "DERIVED";
  a.bound = "upper";
  a.value = n.residual;
  a.expected = tol;
  a.residual = n.residual - tol;
  a.tol = tol;
  a.pass = n.residual < tol;
  report.pass = a.pass;
  report.assertions.push_back(a);
  report.json = finish(j, report);
  std::string csv = "z1,z2,x1,x2,u1,u2,f,g\n";
  for (int i = 0; i < n.n1; ++i)
    for (int k = 0; k < n.n2; ++k) {
      const std::size_t m = n.node(i, k);
      csv += num(n.z1[i]) + "," + num(n.z2[k]) + "," + num(n.base[m][0]) + "," + num(n.base[m][1]) + "," +
             num(n.coords[m][0]) + "," + num(n.coords[m][1]) + "," + num(n.f[m]) + "," + num(n.g[m]) + "\n";
    }
  report.csv = csv;
  return report;
}

int exit_status(const RunReport& r) { return r.pass ? 0 : 1; }

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotFound:
      return 2;
    case ErrorCode::Domain:
    case ErrorCode::Order:
    case ErrorCode::Singular:
    case ErrorCode::Numerical:
      return 3;
  }
  return 3;
}

}  // namespace rext
