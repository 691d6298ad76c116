/* SPDX-License-Identifier: Apache-2.0 */
#ifndef REXT_REXT_H
#define REXT_REXT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define REXT_API __declspec(dllexport)
#else
#define REXT_API __attribute__((visibility("default")))
#endif

/* Status codes. The non-zero values match the library's internal error codes. */
typedef enum rext_status {
  REXT_OK = 0,
  REXT_ERR_PARSE = 1,
  REXT_ERR_UNKNOWN_IDENTIFIER = 2,
  REXT_ERR_DOMAIN = 3,
  REXT_ERR_ORDER = 4,
  REXT_ERR_SINGULAR = 5,
  REXT_ERR_INVALID_ARGUMENT = 6,
  REXT_ERR_NUMERICAL = 7,
  REXT_ERR_NOT_FOUND = 8,
  REXT_ERR_INTERNAL = 9
} rext_status;

typedef struct rext_scenario rext_scenario; /* parsed scenario file, sweeps expanded */
typedef struct rext_report rext_report;     /* result of a run: JSON, CSV, assertions */
typedef struct rext_metric rext_metric;     /* extension metric built from one scenario */

/* Overrides applied to every run. Zero-initialised fields keep the scenario values. */
typedef struct rext_options {
  int has_seed;
  uint64_t seed;
  int order;          /* jet order; 0 keeps the scenario value */
  double tol;         /* default tolerance; <= 0 keeps the scenario value */
  const char* checks; /* comma-separated check names, or NULL */
  int timestamp;      /* non-zero adds a generated_at field to JSON reports */
} rext_options;

REXT_API void rext_options_init(rext_options* opt);

REXT_API const char* rext_version(void);
/* Message of the last failed call on this thread ("" if none). */
REXT_API const char* rext_last_error(void);
/* Process exit status for a status code: 0 ok, 2 parse or usage, 3 numerical. */
REXT_API int rext_exit_code(rext_status status);

/* Expressions in x1, x2, y1, y2. */
REXT_API rext_status rext_expr_eval(const char* text, const double point[4], double* value);

/* Scenarios. */
REXT_API rext_status rext_scenario_parse(const char* text, const char* name, rext_scenario** out);
REXT_API rext_status rext_scenario_load(const char* path, rext_scenario** out);
REXT_API size_t rext_scenario_count(const rext_scenario* s);
/* Replaces the sample points of every expanded scenario; `xyzw` holds 4 n values. */
REXT_API rext_status rext_scenario_set_points(rext_scenario* s, const double* xyzw, size_t n);
REXT_API void rext_scenario_free(rext_scenario* s);
REXT_API rext_status rext_scenario_run(const rext_scenario* s, const rext_options* opt, rext_report** out);

/* Worked-example catalog. */
REXT_API size_t rext_catalog_size(void);
REXT_API const char* rext_catalog_name(size_t i);
REXT_API const char* rext_catalog_citation(size_t i);
REXT_API const char* rext_catalog_summary(size_t i);
REXT_API rext_status rext_catalog_run(const char* name, const rext_options* opt, rext_report** out);

/* Metric evaluation for the expanded scenario number `index`. */
REXT_API rext_status rext_metric_create(const rext_scenario* s, size_t index, rext_metric** out);
REXT_API rext_status rext_metric_value(const rext_metric* m, const double point[4], double g[16]);
/* Bach tensor B_ij in coordinates (x1, x2, y1, y2), row-major. */
REXT_API rext_status rext_metric_bach(const rext_metric* m, const double point[4], int order, double b[16]);
REXT_API void rext_metric_free(rext_metric* m);

/* Method-of-lines solution of the nilpotent Bach-flat system on a strip. */
typedef struct rext_pde_params {
  const char* xi0;
  const char* alpha0;
  const char* alpha1;
  double length;
  int n1;
  int n2;
  int levels;
  int rk2; /* non-zero selects the two-stage stepper */
} rext_pde_params;

REXT_API void rext_pde_params_init(rext_pde_params* p);
/* `surface` may be NULL for the flat connection; otherwise its first scenario supplies the surface. */
REXT_API rext_status rext_solve_pde(const rext_scenario* surface, const rext_pde_params* p, const rext_options* opt,
                                    rext_report** out);

/* Sampled coordinates in which a nilpotent endomorphism becomes d_x1 (x) dx2. */
typedef struct rext_normalize_params {
  double x1;
  double x2;
  double width;
  double height;
  double step;
  double tol;
} rext_normalize_params;

REXT_API void rext_normalize_params_init(rext_normalize_params* p);
REXT_API rext_status rext_normalize(const rext_scenario* s, const rext_normalize_params* p, const rext_options* opt,
                                    rext_report** out);

/* Reports. Strings stay valid until the report is freed. */
REXT_API int rext_report_passed(const rext_report* r);
REXT_API size_t rext_report_assertion_count(const rext_report* r);
REXT_API const char* rext_report_assertion_name(const rext_report* r, size_t i);
REXT_API int rext_report_assertion_passed(const rext_report* r, size_t i);
REXT_API const char* rext_report_json(const rext_report* r);
REXT_API const char* rext_report_csv(const rext_report* r);
REXT_API void rext_report_free(rext_report* r);

#ifdef __cplusplus
}
#endif

#endif /* REXT_REXT_H */
