// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rext/config.hpp"
#include "rext/error.hpp"
#include "rext/pde.hpp"

namespace rext {

/// One checked expectation in a report.
struct Assertion {
  std::string name;
  std::string quantity;
  std::string citation;
  std::string provenance;
  std::string bound = "equal";
  double value = 0.0;     // worst observed value
  double expected = 0.0;  // expected value at the worst point
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

/// Overrides applied on top of a scenario file (the CLI global flags).
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> order;
  std::optional<double> tol;
  std::vector<std::string> checks;            // replaces the scenario checks when non-empty
  std::optional<std::vector<Point4>> points;  // replaces the sampled points
  bool timestamp = true;
  bool require_tags = false;  // fail assertions without citation and provenance
};

/// Result of running one or more scenarios. `json` embeds the convention
/// record; `csv` has one row per evaluated point.
struct RunReport {
  std::string name;
  bool pass = true;
  std::vector<Assertion> assertions;
  std::string json;
  std::string csv;
};

/// Evaluates the requested checks at every sample point and tests the
/// expectations. `extra` holds assertions evaluated elsewhere that are
/// appended to the report. Exceptions from the engine propagate.
RunReport run_scenarios(std::span<const ScenarioConfig> scenarios, const std::string& name,
                        const RunOptions& opt = {}, std::vector<Assertion> extra = {});
RunReport run_scenario(const ScenarioConfig& scenario, const RunOptions& opt = {});

/// Worked examples that can be re-run by name.
struct CatalogEntry {
  std::string name;
  std::string citation;
  std::string summary;
  /// Scenario files of the entry; some depend on the seed.
  std::function<std::vector<std::string>(std::uint64_t seed)> scenarios;
  /// Prefixes of `example_catalog_checks` names folded into the entry.
  std::vector<std::string> check_prefixes;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);  // throws NotFound

/// Runs an entry; assertions without citation or provenance tags fail.
RunReport catalog_run(const std::string& name, const RunOptions& opt = {});

/// Solve-and-verify report for the nilpotent Bach-flat system on a strip:
/// JSON convergence table and a CSV dump of the finest fields.
struct PdeRequest {
  CauchyData data{Expr(0.0), Expr(1.0), Expr(0.0)};
  StripGrid grid;
  int levels = 2;
  MarchOptions march;
  double bach_tol = 1e-3;
  double min_ratio = 3.5;
};
RunReport solve_pde_report(const AffineSurface& s, const PdeRequest& req, bool timestamp = true);

/// Normalization report for a nilpotent endomorphism.
RunReport normalize_report(const EndoField& t, const Point4& p0, const NormalizeOptions& opt, double tol = 1e-6,
                           bool timestamp = true);

/// Exit status for a report or an error code: 0 pass, 1 failed assertion,
/// 2 parse or usage error, 3 numerical failure.
int exit_status(const RunReport& r);
int exit_status(ErrorCode code);

}  // namespace rext
