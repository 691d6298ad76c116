// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rext/expr.hpp"
#include "rext/extension.hpp"
#include "rext/surface.hpp"

namespace rext {

/// A value in a scenario file: number, boolean, quoted string or list.
struct ConfigValue {
  enum class Type { Number, Bool, String, List };
  Type type = Type::Number;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<ConfigValue> items;
  std::size_t offset = 0;  // byte offset of the value in the source
  int line = 0;

  std::string render() const;
};

struct ConfigEntry {
  std::string key;
  ConfigValue value;
};

struct ConfigSection {
  std::string name;  // "" for keys before the first header
  std::vector<ConfigEntry> entries;
  int line = 0;
};

/// Parses the key/value subset of TOML used by scenario files: [section]
/// headers, `key = value` lines, # comments, double-quoted strings, numbers,
/// true/false and (possibly nested, possibly multi-line) lists. Throws
/// ParseError with the line number in the message.
std::vector<ConfigSection> parse_config_text(std::string_view text);

/// One expected result attached to a scenario, read from an [expect.NAME]
/// section. `value` is an expression in the coordinates and the surface
/// constants, evaluated at each sample point.
struct Expectation {
  enum class Bound { Equal, Upper, Lower };

  std::string name;
  std::string quantity;
  std::string value = "0";
  double tol = -1.0;  // negative: use the scenario tolerance
  bool relative = false;
  Bound bound = Bound::Equal;
  bool allow_undefined = false;
  std::string citation;
  std::string provenance;
};

const char* to_string(Expectation::Bound b);

/// A fully expanded scenario: every swept key has been fixed to one value.
struct ScenarioConfig {
  std::string name = "scenario";
  std::string description;
  std::string sweep_label;  // "key=value, ..." for expanded sweeps

  std::string surface_kind = "explicit";
  ConstantTable constants;
  std::map<std::string, std::string> surface;  // Christoffel keys, phi, c

  std::string endo_kind = "canonical";
  std::map<std::string, std::string> endo;  // T11.., alpha, xi
  bool mirrored = false;

  std::array<std::string, 3> deformation{"0", "0", "0"};

  std::vector<Point4> points;
  int random_points = 0;
  std::array<double, 8> box{-1, 1, -1, 1, -1, 1, -1, 1};
  int order = 4;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::vector<std::string> checks;
  std::string conformal_factor;

  std::vector<Expectation> expectations;
};

/// Parses a scenario file and expands every list-valued scalar key into the
/// cartesian product of its values, in file order.
std::vector<ScenarioConfig> parse_scenarios(std::string_view text, const std::string& name = "scenario");
std::vector<ScenarioConfig> load_scenarios(const std::string& path);

/// Parses `text` with the scenario constants; errors name the key.
Expr scenario_expr(const ScenarioConfig& c, const std::string& key, const std::string& text);

AffineSurface build_surface(const ScenarioConfig& c);
EndoField build_endo(const ScenarioConfig& c);
/// The (alpha, xi) pair when the endomorphism is given in that form.
std::optional<NilpotentSpec> scenario_nilpotent(const ScenarioConfig& c);
DeformationField build_deformation(const ScenarioConfig& c);
ExtensionMetric build_scenario_metric(const ScenarioConfig& c);

/// Explicit points followed by `random_points` seeded samples from the box.
std::vector<Point4> sample_points(const ScenarioConfig& c);

}  // namespace rext
