#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "rext/config.hpp"
#include "rext/error.hpp"
#include "rext/rext.h"
#include "rext/scenario.hpp"

using namespace rext;

namespace {

const char* kTypeA = R"cfg(name = "typea"
[surface]
kind = "typeA"
G12_1 = 1
G12_2 = 1
[endomorphism]
kind = "nilpotent_spec"
alpha = "sqrt(exp(2*x1) + 1)"
xi = "0"
[evaluation]
random = 3
seed = 7
checks = ["bachflat"]
[expect.flat]
quantity = "bach"
bound = "upper"
value = "1e-8"
citation = "Example 4.2"
provenance = "PAPER"
)cfg";

struct Report {
  rext_report* p = nullptr;
  ~Report() { rext_report_free(p); }
};

struct Scenario {
  rext_scenario* p = nullptr;
  ~Scenario() { rext_scenario_free(p); }
};

}  // namespace

TEST(Config, ParsesSectionsAndValues) {
  const auto secs = parse_config_text("a = 1\n[s.t]\nb = \"x\" # note\nc = [1, 2.5]\nd = true\n");
  ASSERT_EQ(secs.size(), 2u);
  EXPECT_EQ(secs[1].name, "s.t");
  EXPECT_EQ(secs[1].entries[0].value.text, "x");
  EXPECT_EQ(secs[1].entries[1].value.items.size(), 2u);
  EXPECT_TRUE(secs[1].entries[2].value.boolean);
}

TEST(Config, UnknownKeyIsRejected) {
  try {
    parse_scenarios("[surface]\nkind = \"typeA\"\nbogus = 1\n");
    FAIL() << "accepted an unknown key";
  } catch (const Error& e) {
    EXPECT_EQ(exit_status(e.code()), 2);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  EXPECT_THROW(parse_scenarios("[nowhere]\nx = 1\n"), Error);
  EXPECT_THROW(parse_scenarios("[surface]\nkind = \"typeA\"\nphi = \"x1\"\n"), Error);
}

TEST(Config, MalformedExpressionReportsPosition) {
  try {
    build_scenario_metric(parse_scenarios("[deformation]\nphi11 = \"x1 + * 2\"\n").front());
    FAIL() << "accepted a malformed expression";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    EXPECT_NE(std::string(e.what()).find("position"), std::string::npos);
  }
  EXPECT_THROW(build_surface(parse_scenarios("[surface]\nkind = \"typeA\"\nG11_1 = \"x1\"\n").front()), Error);
}

TEST(Config, SweepsExpandCombinatorially) {
  const auto cs = parse_scenarios(
      "[surface]\nkind = \"typeA\"\nG11_1 = [0, 1, 2]\n[deformation]\nphi11 = [\"x1\", \"x2\"]\n"
      "[evaluation]\npoints = [[0, 0, 0, 0]]\n");
  ASSERT_EQ(cs.size(), 6u);
  std::set<std::string> labels;
  for (const auto& c : cs) {
    labels.insert(c.sweep_label);
    EXPECT_EQ(c.points.size(), 1u);
  }
  EXPECT_EQ(labels.size(), 6u);
}

TEST(Config, SamplePointsAreSeeded) {
  auto c = parse_scenarios("[evaluation]\nrandom = 4\nseed = 3\nbox = [0, 1, 0, 1, -1, 1, -1, 1]\n").front();
  const auto a = sample_points(c), b = sample_points(c);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].x1, b[k].x1);
    EXPECT_GE(a[k].x1, 0.0);
    EXPECT_LE(a[k].x1, 1.0);
  }
  c.seed = 4;
  EXPECT_NE(sample_points(c)[0].x1, a[0].x1);
}

TEST(Scenario, RunsExpectationsAndReports) {
  const RunReport r = run_scenarios(parse_scenarios(kTypeA, "typea"), "typea", {.timestamp = false});
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.assertions.size(), 1u);
  EXPECT_EQ(r.assertions[0].provenance, "PAPER");
  const auto j = nlohmann::json::parse(r.json);
  EXPECT_EQ(j["report"], "typea");
  EXPECT_FALSE(j.contains("generated_at"));
  EXPECT_EQ(j["conventions"]["second_operator_form"], "corrected");
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')).substr(0, 14), "x1,x2,y1,y2,ba");
}

TEST(Scenario, FailingExpectationFailsTheRun) {
  std::string text = kTypeA;
  text.replace(text.find("sqrt(exp(2*x1) + 1)"), 19, "1 + x1^2");
  const RunReport r = run_scenarios(parse_scenarios(text), "bad", {.timestamp = false});
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(exit_status(r), 1);
}

TEST(Catalog, ListsEveryEntry) {
  std::set<std::string> names;
  for (const CatalogEntry& e : catalog()) names.insert(e.name);
  EXPECT_EQ(names.size(), 10u);
  EXPECT_TRUE(names.count("example_6_4_case1"));
  EXPECT_TRUE(names.count("s23_mixed_jordan"));
  EXPECT_THROW(catalog_entry("example_9_9"), Error);
}

TEST(Catalog, EveryEntryPasses) {
  for (const CatalogEntry& e : catalog()) {
    const RunReport r = catalog_run(e.name, {.timestamp = false});
    EXPECT_TRUE(r.pass) << e.name;
    for (const Assertion& a : r.assertions) {
      EXPECT_TRUE(a.pass) << a.name << " residual " << a.residual;
      EXPECT_FALSE(a.provenance.empty()) << a.name;
    }
  }
}

TEST(Catalog, TypeABeta1Vanishes) {
  const RunReport r = catalog_run("example_6_3", {.timestamp = false});
  const auto j = nlohmann::json::parse(r.json);
  int seen = 0;
  for (const auto& s : j["scenarios"])
    for (const auto& p : s["points"]) {
      if (p["values"]["beta1"].is_null()) continue;
      EXPECT_LT(std::abs(p["values"]["beta1"].get<double>()), 1e-10);
      ++seen;
    }
  EXPECT_GT(seen, 0);
}

TEST(CApi, DeterministicWithoutTimestamp) {
  rext_options o;
  rext_options_init(&o);
  o.timestamp = 0;
  Report a, b;
  ASSERT_EQ(rext_catalog_run("example_5_1_theta_pi3", &o, &a.p), REXT_OK);
  ASSERT_EQ(rext_catalog_run("example_5_1_theta_pi3", &o, &b.p), REXT_OK);
  EXPECT_STREQ(rext_report_json(a.p), rext_report_json(b.p));
  EXPECT_STREQ(rext_report_csv(a.p), rext_report_csv(b.p));
  EXPECT_TRUE(rext_report_passed(a.p));
}

TEST(CApi, StatusCodesAndMessages) {
  Scenario s;
  EXPECT_EQ(rext_scenario_parse("[surface]\nkind = \"typeZ\"\n", "x", &s.p), REXT_ERR_PARSE);
  EXPECT_EQ(s.p, nullptr);
  EXPECT_NE(std::string(rext_last_error()), "");
  EXPECT_EQ(rext_exit_code(REXT_ERR_PARSE), 2);
  EXPECT_EQ(rext_exit_code(REXT_ERR_NUMERICAL), 3);
  EXPECT_EQ(rext_exit_code(REXT_ERR_INTERNAL), 3);
  Report r;
  EXPECT_EQ(rext_catalog_run("nope", nullptr, &r.p), REXT_ERR_NOT_FOUND);
  double v = 0;
  const double p[4] = {0, 0, 0, 0};
  EXPECT_EQ(rext_expr_eval("1 +", p, &v), REXT_ERR_PARSE);
  EXPECT_EQ(rext_expr_eval("q1", p, &v), REXT_ERR_UNKNOWN_IDENTIFIER);
  EXPECT_EQ(rext_scenario_run(nullptr, nullptr, &r.p), REXT_ERR_INVALID_ARGUMENT);
}

TEST(CApi, MetricAndBach) {
  Scenario s;
  ASSERT_EQ(rext_scenario_parse(kTypeA, "typea", &s.p), REXT_OK);
  EXPECT_EQ(rext_scenario_count(s.p), 1u);
  rext_metric* m = nullptr;
  ASSERT_EQ(rext_metric_create(s.p, 0, &m), REXT_OK);
  const double p[4] = {0.2, 0.1, 0.3, -0.4};
  double g[16], b[16];
  ASSERT_EQ(rext_metric_value(m, p, g), REXT_OK);
  EXPECT_EQ(g[0 * 4 + 2], 1.0);
  EXPECT_EQ(g[1 * 4 + 3], 1.0);
  ASSERT_EQ(rext_metric_bach(m, p, 4, b), REXT_OK);
  for (double x : b) EXPECT_LT(std::abs(x), 1e-8);
  rext_metric_free(m);
  EXPECT_EQ(rext_metric_create(s.p, 5, &m), REXT_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SetPointsOverridesSampling) {
  Scenario s;
  ASSERT_EQ(rext_scenario_parse(kTypeA, "typea", &s.p), REXT_OK);
  const double pts[8] = {0.1, 0.2, 0.3, 0.4, -0.1, 0.5, 0.0, 1.0};
  ASSERT_EQ(rext_scenario_set_points(s.p, pts, 2), REXT_OK);
  rext_options o;
  rext_options_init(&o);
  o.timestamp = 0;
  Report r;
  ASSERT_EQ(rext_scenario_run(s.p, &o, &r.p), REXT_OK);
  const auto j = nlohmann::json::parse(rext_report_json(r.p));
  EXPECT_EQ(j["scenarios"][0]["points"].size(), 2u);
}

TEST(CApi, PdeReportAndValidation) {
  rext_pde_params pp;
  rext_pde_params_init(&pp);
  pp.xi0 = "0.1*sin(x2)";
  pp.alpha0 = "1 + 0.1*cos(x2)";
  pp.length = 0.5;
  pp.n1 = 32;
  pp.n2 = 32;
  rext_options o;
  rext_options_init(&o);
  o.timestamp = 0;
  Report r;
  ASSERT_EQ(rext_solve_pde(nullptr, &pp, &o, &r.p), REXT_OK) << rext_last_error();
  EXPECT_GE(rext_report_assertion_count(r.p), 2u);
  pp.xi0 = "x1";
  Report bad;
  EXPECT_EQ(rext_solve_pde(nullptr, &pp, &o, &bad.p), REXT_ERR_INVALID_ARGUMENT);
}

TEST(CApi, NormalizeReport) {
  Scenario s;
  ASSERT_EQ(rext_scenario_parse("[endomorphism]\nkind = \"nilpotent_spec\"\nalpha = \"exp(x2)\"\nxi = \"0\"\n", "n",
                                &s.p),
            REXT_OK);
  rext_normalize_params np;
  rext_normalize_params_init(&np);
  np.step = 1.0 / 32;
  Report r;
  ASSERT_EQ(rext_normalize(s.p, &np, nullptr, &r.p), REXT_OK) << rext_last_error();
  EXPECT_TRUE(rext_report_passed(r.p));
  EXPECT_EQ(std::string(rext_report_csv(r.p)).substr(0, 8), "z1,z2,x1");
}
