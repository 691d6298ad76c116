// SPDX-License-Identifier: Apache-2.0
#include "rext/rext.h"

#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "rext/curvature.hpp"
#include "rext/error.hpp"
#include "rext/metric.hpp"
#include "rext/scenario.hpp"

struct rext_scenario {
  std::vector<rext::ScenarioConfig> configs;
};

struct rext_report {
  rext::RunReport report;
};

struct rext_metric {
  rext::ExtensionMetric metric;
};

namespace {

thread_local std::string g_last_error;

template <class F>
rext_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return REXT_OK;
  } catch (const rext::Error& e) {
    g_last_error = e.what();
    return static_cast<rext_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return REXT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return REXT_ERR_INTERNAL;
  }
}

rext_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return REXT_ERR_INVALID_ARGUMENT;
}

rext::RunOptions run_options(const rext_options* opt) {
  rext::RunOptions o;
  if (!opt) return o;
  if (opt->has_seed) o.seed = opt->seed;
  if (opt->order > 0) o.order = opt->order;
  if (opt->tol > 0) o.tol = opt->tol;
  if (opt->checks && *opt->checks) {
    std::stringstream ss(opt->checks);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) o.checks.push_back(item);
  }
  o.timestamp = opt->timestamp != 0;
  return o;
}

rext::Point4 point(const double p[4]) { return {p[0], p[1], p[2], p[3]}; }

}  // namespace

extern "C" {

void rext_options_init(rext_options* opt) {
  if (!opt) return;
  *opt = rext_options{};
  opt->timestamp = 1;
}

const char* rext_version(void) { return "1.0.0"; }

const char* rext_last_error(void) { return g_last_error.c_str(); }

int rext_exit_code(rext_status status) {
  if (status == REXT_OK) return 0;
  if (status == REXT_ERR_INTERNAL) return 3;
  return rext::exit_status(static_cast<rext::ErrorCode>(status));
}

rext_status rext_expr_eval(const char* text, const double p[4], double* value) {
  if (!text || !p || !value) return null_argument("rext_expr_eval");
  return guard([&] { *value = rext::parse_expr(text).eval(point(p)); });
}

rext_status rext_scenario_parse(const char* text, const char* name, rext_scenario** out) {
  if (!text || !out) return null_argument("rext_scenario_parse");
  *out = nullptr;
  return guard([&] {
    auto s = std::make_unique<rext_scenario>();
    s->configs = rext::parse_scenarios(text, name ? name : "scenario");
    *out = s.release();
  });
}

rext_status rext_scenario_load(const char* path, rext_scenario** out) {
  if (!path || !out) return null_argument("rext_scenario_load");
  *out = nullptr;
  return guard([&] {
    auto s = std::make_unique<rext_scenario>();
    s->configs = rext::load_scenarios(path);
    *out = s.release();
  });
}

size_t rext_scenario_count(const rext_scenario* s) { return s ? s->configs.size() : 0; }

rext_status rext_scenario_set_points(rext_scenario* s, const double* xyzw, size_t n) {
  if (!s || (!xyzw && n)) return null_argument("rext_scenario_set_points");
  return guard([&] {
    std::vector<rext::Point4> pts;
    for (size_t k = 0; k < n; ++k) pts.push_back(point(xyzw + 4 * k));
    for (rext::ScenarioConfig& c : s->configs) {
      c.points = pts;
      c.random_points = 0;
    }
  });
}

void rext_scenario_free(rext_scenario* s) { delete s; }

rext_status rext_scenario_run(const rext_scenario* s, const rext_options* opt, rext_report** out) {
  if (!s || !out) return null_argument("rext_scenario_run");
  *out = nullptr;
  return guard([&] {
    const std::string name = s->configs.empty() ? "scenario" : s->configs.front().name;
    *out = new rext_report{rext::run_scenarios(s->configs, name, run_options(opt))};
  });
}

size_t rext_catalog_size(void) { return rext::catalog().size(); }

const char* rext_catalog_name(size_t i) { return i < rext::catalog().size() ? rext::catalog()[i].name.c_str() : nullptr; }

const char* rext_catalog_citation(size_t i) {
  return i < rext::catalog().size() ? rext::catalog()[i].citation.c_str() : nullptr;
}

const char* rext_catalog_summary(size_t i) {
  return i < rext::catalog().size() ? rext::catalog()[i].summary.c_str() : nullptr;
}

rext_status rext_catalog_run(const char* name, const rext_options* opt, rext_report** out) {
  if (!name || !out) return null_argument("rext_catalog_run");
  *out = nullptr;
  return guard([&] { *out = new rext_report{rext::catalog_run(name, run_options(opt))}; });
}

rext_status rext_metric_create(const rext_scenario* s, size_t index, rext_metric** out) {
  if (!s || !out) return null_argument("rext_metric_create");
  *out = nullptr;
  return guard([&] {
    if (index >= s->configs.size()) throw rext::Error(rext::ErrorCode::InvalidArgument, "scenario index out of range");
    *out = new rext_metric{rext::build_scenario_metric(s->configs[index])};
  });
}

rext_status rext_metric_value(const rext_metric* m, const double p[4], double g[16]) {
  if (!m || !p || !g) return null_argument("rext_metric_value");
  return guard([&] {
    const auto v = rext::metric_values(m->metric.field(), point(p));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g[4 * i + j] = v[i][j];
  });
}

rext_status rext_metric_bach(const rext_metric* m, const double p[4], int order, double b[16]) {
  if (!m || !p || !b) return null_argument("rext_metric_bach");
  return guard([&] {
    rext::PackOptions po;
    if (order > 0) po.order = order;
    const rext::CurvaturePack pack = rext::curvature_pack(m->metric, point(p), po);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) b[4 * i + j] = (*pack.bach)(i, j).value();
  });
}

void rext_metric_free(rext_metric* m) { delete m; }

void rext_pde_params_init(rext_pde_params* p) {
  if (!p) return;
  *p = rext_pde_params{};
  p->xi0 = "0";
  p->alpha0 = "1";
  p->alpha1 = "0";
  p->length = 1.0;
  p->n1 = 128;
  p->n2 = 64;
  p->levels = 2;
}

rext_status rext_solve_pde(const rext_scenario* surface, const rext_pde_params* p, const rext_options* opt,
                           rext_report** out) {
  if (!p || !out || !p->xi0 || !p->alpha0 || !p->alpha1) return null_argument("rext_solve_pde");
  *out = nullptr;
  return guard([&] {
    rext::AffineSurface s;
    if (surface) {
      if (surface->configs.empty()) throw rext::Error(rext::ErrorCode::InvalidArgument, "empty surface scenario");
      s = rext::build_surface(surface->configs.front());
    }
    rext::PdeRequest req;
    req.data = {rext::parse_expr(p->xi0), rext::parse_expr(p->alpha0), rext::parse_expr(p->alpha1)};
    for (const rext::Expr* e : {&req.data.xi0, &req.data.alpha0, &req.data.alpha1})
      if (e->depends_on(0) || e->depends_on(2) || e->depends_on(3))
        throw rext::Error(rext::ErrorCode::InvalidArgument, "Cauchy data must be functions of x2 only");
    req.grid = {p->length, p->n1, p->n2};
    req.grid.validate();
    req.levels = p->levels;
    if (req.levels < 1 || req.levels > 4)
      throw rext::Error(rext::ErrorCode::InvalidArgument, "levels must be between 1 and 4");
    req.march.stepper = p->rk2 ? rext::Stepper::RK2 : rext::Stepper::RK4;
    *out = new rext_report{rext::solve_pde_report(s, req, !opt || opt->timestamp)};
  });
}

void rext_normalize_params_init(rext_normalize_params* p) {
  if (!p) return;
  const rext::NormalizeOptions d;
  *p = rext_normalize_params{0.0, 0.0, d.width, d.height, d.step, 1e-6};
}

rext_status rext_normalize(const rext_scenario* s, const rext_normalize_params* p, const rext_options* opt,
                           rext_report** out) {
  if (!s || !p || !out) return null_argument("rext_normalize");
  *out = nullptr;
  return guard([&] {
    if (s->configs.empty()) throw rext::Error(rext::ErrorCode::InvalidArgument, "empty scenario");
    rext::NormalizeOptions n;
    n.width = p->width;
    n.height = p->height;
    n.step = p->step;
    const rext::EndoField t = rext::build_endo(s->configs.front());
    *out = new rext_report{
        rext::normalize_report(t, {p->x1, p->x2, 0, 0}, n, p->tol > 0 ? p->tol : 1e-6, !opt || opt->timestamp)};
  });
}

int rext_report_passed(const rext_report* r) { return r && r->report.pass ? 1 : 0; }

size_t rext_report_assertion_count(const rext_report* r) { return r ? r->report.assertions.size() : 0; }

const char* rext_report_assertion_name(const rext_report* r, size_t i) {
  return r && i < r->report.assertions.size() ? r->report.assertions[i].name.c_str() : nullptr;
}

int rext_report_assertion_passed(const rext_report* r, size_t i) {
  return r && i < r->report.assertions.size() && r->report.assertions[i].pass ? 1 : 0;
}

const char* rext_report_json(const rext_report* r) { return r ? r->report.json.c_str() : ""; }

const char* rext_report_csv(const rext_report* r) { return r ? r->report.csv.c_str() : ""; }

void rext_report_free(rext_report* r) { delete r; }

}  // extern "C"
