// SPDX-License-Identifier: Apache-2.0
// Command-line front end over the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rext/rext.h"

namespace {

struct Globals {
  std::string out;
  long long seed = -1;
  int order = 0;
  double tol = 0.0;
  std::string format = "json";
  bool no_timestamp = false;
};

class Failure {
 public:
  explicit Failure(rext_status s) : status(s) {}
  rext_status status;
};

void check(rext_status s) {
  if (s != REXT_OK) throw Failure(s);
}

rext_options options(const Globals& g, const std::string& checks = {}) {
  rext_options o;
  rext_options_init(&o);
  if (g.seed >= 0) {
    o.has_seed = 1;
    o.seed = static_cast<uint64_t>(g.seed);
  }
  o.order = g.order;
  o.tol = g.tol;
  o.timestamp = g.no_timestamp ? 0 : 1;
  static std::string keep;
  keep = checks;
  o.checks = keep.empty() ? nullptr : keep.c_str();
  return o;
}

// RAII holders for the opaque handles.
struct Scenario {
  rext_scenario* p = nullptr;
  ~Scenario() { rext_scenario_free(p); }
};
struct Report {
  rext_report* p = nullptr;
  ~Report() { rext_report_free(p); }
};

void load(Scenario& s, const std::string& path, const std::vector<std::string>& points) {
  check(rext_scenario_load(path.c_str(), &s.p));
  if (points.empty()) return;
  std::vector<double> xs;
  for (const std::string& text : points) {
    std::stringstream ss(text);
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0) throw CLI::ValidationError("--point", "expected four comma-separated numbers: " + text);
      xs.push_back(v);
      ++n;
    }
    if (n != 4) throw CLI::ValidationError("--point", "expected four comma-separated numbers: " + text);
  }
  check(rext_scenario_set_points(s.p, xs.data(), xs.size() / 4));
}

void write_file(const std::filesystem::path& path, const char* text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

// Writes the report to --out (both formats) or prints the selected format.
int emit(const Globals& g, const Report& r, const std::string& name, bool print = true) {
  if (!g.out.empty()) {
    std::filesystem::create_directories(g.out);
    write_file(std::filesystem::path(g.out) / (name + ".json"), rext_report_json(r.p));
    write_file(std::filesystem::path(g.out) / (name + ".csv"), rext_report_csv(r.p));
  } else if (print) {
    std::cout << (g.format == "csv" ? rext_report_csv(r.p) : rext_report_json(r.p));
  }
  const std::size_t n = rext_report_assertion_count(r.p);
  for (std::size_t i = 0; i < n; ++i)
    if (!rext_report_assertion_passed(r.p, i)) std::cerr << "FAIL " << rext_report_assertion_name(r.p, i) << "\n";
  return rext_report_passed(r.p) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature, Bach-flatness and invariants of modified Riemannian extensions"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "directory for JSON and CSV reports");
  app.add_option("--seed", g.seed, "random seed for sampled points")->check(CLI::NonNegativeNumber);
  app.add_option("--order", g.order, "jet order")->check(CLI::Range(2, 6));
  app.add_option("--tol", g.tol, "default tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--no-timestamp", g.no_timestamp, "omit generated_at for byte-identical reports");

  int code = 0;

  auto* cat = app.add_subcommand("catalog", "worked examples");
  cat->require_subcommand(1);
  cat->add_subcommand("list", "list catalog entries")->callback([&] {
    for (std::size_t i = 0; i < rext_catalog_size(); ++i)
      std::cout << rext_catalog_name(i) << "\t" << rext_catalog_citation(i) << "\t" << rext_catalog_summary(i)
                << "\n";
  });
  auto* cat_run = cat->add_subcommand("run", "run catalog entries");
  std::vector<std::string> names;
  bool all = false;
  cat_run->add_option("names", names, "entry names");
  cat_run->add_flag("--all", all, "run every entry");
  cat_run->callback([&] {
    if (all) {
      names.clear();
      for (std::size_t i = 0; i < rext_catalog_size(); ++i) names.emplace_back(rext_catalog_name(i));
    }
    if (names.empty()) throw CLI::ValidationError("catalog run", "name an entry or pass --all");
    const rext_options o = options(g);
    for (const std::string& n : names) {
      Report r;
      check(rext_catalog_run(n.c_str(), &o, &r.p));
      const int c = emit(g, r, n, names.size() == 1);
      std::cerr << (c == 0 ? "PASS " : "FAIL ") << n << " (" << rext_report_assertion_count(r.p)
                << " assertions)\n";
      code = std::max(code, c);
    }
  });

  std::string config;
  std::vector<std::string> points;
  auto scenario_command = [&](CLI::App* sub, const std::string& checks) {
    sub->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--point", points, "evaluation point x1,x2,y1,y2 (repeatable)");
    sub->callback([&, sub, checks] {
      Scenario s;
      load(s, config, points);
      const rext_options o = options(g, checks);
      Report r;
      check(rext_scenario_run(s.p, &o, &r.p));
      code = emit(g, r, sub->get_name() == "run" ? std::filesystem::path(config).stem().string() : sub->get_name());
    });
  };

  scenario_command(app.add_subcommand("run", "run a scenario file with its own checks and expectations"), "");

  auto* eval = app.add_subcommand("eval", "metric and curvature at points, or an expression");
  std::string expr;
  eval->add_option("--expr", expr, "evaluate an expression instead of a scenario");
  eval->add_option("config", config, "scenario file")->check(CLI::ExistingFile);
  eval->add_option("--point", points, "evaluation point x1,x2,y1,y2 (repeatable)");
  eval->callback([&] {
    if (!expr.empty()) {
      if (points.empty()) points.emplace_back("0,0,0,0");
      for (const std::string& p : points) {
        double x[4] = {0, 0, 0, 0};
        if (std::sscanf(p.c_str(), "%lf,%lf,%lf,%lf", &x[0], &x[1], &x[2], &x[3]) != 4)
          throw CLI::ValidationError("--point", "expected four comma-separated numbers: " + p);
        double v = 0.0;
        check(rext_expr_eval(expr.c_str(), x, &v));
        std::printf("%.17g\n", v);
      }
      return;
    }
    if (config.empty()) throw CLI::ValidationError("eval", "give a scenario file or --expr");
    Scenario s;
    load(s, config, points);
    const rext_options o = options(g, "curvature");
    Report r;
    check(rext_scenario_run(s.p, &o, &r.p));
    code = emit(g, r, "eval");
  });

  auto* chk = app.add_subcommand("check", "bachflat | conformal | vsi | zeros");
  chk->require_subcommand(1);
  for (const char* kind : {"bachflat", "conformal", "vsi", "zeros"})
    scenario_command(chk->add_subcommand(kind, std::string("check ") + kind), kind);
  scenario_command(app.add_subcommand("invariants", "quadratic and Walker invariants"), "invariants");
  scenario_command(app.add_subcommand("identities", "operator identities of nilpotent structures"), "identities");

  auto* solve = app.add_subcommand("solve", "numerical constructions");
  solve->require_subcommand(1);
  auto* pde = solve->add_subcommand("pde", "solve the nilpotent Bach-flat system on a strip");
  rext_pde_params pp;
  rext_pde_params_init(&pp);
  std::string xi0 = pp.xi0, alpha0 = pp.alpha0, alpha1 = pp.alpha1, surface;
  bool rk2 = false;
  pde->add_option("--xi0", xi0, "xi on x1 = 0 as a function of x2");
  pde->add_option("--alpha0", alpha0, "alpha on x1 = 0");
  pde->add_option("--alpha1", alpha1, "d alpha / d x1 on x1 = 0");
  pde->add_option("--L", pp.length, "strip length in x1")->check(CLI::PositiveNumber);
  pde->add_option("--n1", pp.n1, "steps in x1");
  pde->add_option("--n2", pp.n2, "nodes in x2 (periodic)");
  pde->add_option("--levels", pp.levels, "grids in the convergence study");
  pde->add_option("--surface", surface, "scenario file supplying the surface")->check(CLI::ExistingFile);
  pde->add_flag("--rk2", rk2, "two-stage stepper");
  pde->callback([&] {
    pp.xi0 = xi0.c_str();
    pp.alpha0 = alpha0.c_str();
    pp.alpha1 = alpha1.c_str();
    pp.rk2 = rk2 ? 1 : 0;
    Scenario s;
    if (!surface.empty()) check(rext_scenario_load(surface.c_str(), &s.p));
    const rext_options o = options(g);
    Report r;
    check(rext_solve_pde(s.p, &pp, &o, &r.p));
    code = emit(g, r, "solve_pde");
  });

  auto* norm = app.add_subcommand("normalize", "coordinates bringing a nilpotent T to d_x1 (x) dx2");
  rext_normalize_params np;
  rext_normalize_params_init(&np);
  norm->add_option("config", config, "scenario file with the endomorphism")->required()->check(CLI::ExistingFile);
  norm->add_option("--x1", np.x1, "base point x1");
  norm->add_option("--x2", np.x2, "base point x2");
  norm->add_option("--width", np.width, "extent in z1")->check(CLI::PositiveNumber);
  norm->add_option("--height", np.height, "extent in z2")->check(CLI::PositiveNumber);
  norm->add_option("--step", np.step, "grid step")->check(CLI::PositiveNumber);
  norm->callback([&] {
    Scenario s;
    check(rext_scenario_load(config.c_str(), &s.p));
    if (g.tol > 0) np.tol = g.tol;
    const rext_options o = options(g);
    Report r;
    check(rext_normalize(s.p, &np, &o, &r.p));
    code = emit(g, r, "normalize");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Failure& f) {
    std::cerr << "error: " << rext_last_error() << "\n";
    return rext_exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return code;
}
