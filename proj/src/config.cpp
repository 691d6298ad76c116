// SPDX-License-Identifier: Apache-2.0
#include "rext/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "rext/error.hpp"

namespace rext {

namespace {

std::string format_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Reader {
 public:
  explicit Reader(std::string_view t) : t_(t) {}

  std::vector<ConfigSection> run() {
    std::vector<ConfigSection> out(1);
    std::set<std::string> seen{""};
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (t_[pos_] == '[') {
        const std::size_t start = pos_++;
        std::string name;
        while (!at_end() && t_[pos_] != ']' && t_[pos_] != '\n') name += t_[pos_++];
        if (at_end() || t_[pos_] != ']') fail("unterminated section header", start);
        ++pos_;
        name = trim(name);
        if (name.empty() || !std::all_of(name.begin(), name.end(), ident_char))
          fail("invalid section name '" + name + "'", start);
        if (!seen.insert(name).second) fail("duplicate section [" + name + "]", start);
        out.push_back({name, {}, line_of(start)});
        end_of_line();
        continue;
      }
      const std::size_t start = pos_;
      std::string key;
      while (!at_end() && ident_char(t_[pos_])) key += t_[pos_++];
      if (key.empty()) fail("expected a key", start);
      skip_spaces();
      if (at_end() || t_[pos_] != '=') fail("expected '=' after key '" + key + "'", pos_);
      ++pos_;
      skip_spaces();
      ConfigValue v = value();
      for (const ConfigEntry& e : out.back().entries)
        if (e.key == key) fail("duplicate key '" + key + "'", start);
      out.back().entries.push_back({key, std::move(v)});
      end_of_line();
    }
    return out;
  }

 private:
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  }
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
  }

  bool at_end() const { return pos_ >= t_.size(); }
  int line_of(std::size_t off) const {
    return 1 + static_cast<int>(std::count(t_.begin(), t_.begin() + static_cast<std::ptrdiff_t>(off), '\n'));
  }
  [[noreturn]] void fail(const std::string& msg, std::size_t off) const {
    throw ParseError("config line " + std::to_string(line_of(off)) + ": " + msg, off);
  }

  void skip_spaces() {
    while (!at_end() && (t_[pos_] == ' ' || t_[pos_] == '\t' || t_[pos_] == '\r')) ++pos_;
  }
  void skip_comment() {
    if (!at_end() && t_[pos_] == '#')
      while (!at_end() && t_[pos_] != '\n') ++pos_;
  }
  void skip_blank_lines() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (!at_end() && t_[pos_] == '\n') {
        ++pos_;
        continue;
      }
      return;
    }
  }
  void skip_all() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (!at_end() && t_[pos_] == '\n') {
        ++pos_;
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (t_[pos_] != '\n') fail("unexpected text after value", pos_);
    ++pos_;
  }

  ConfigValue value() {
    ConfigValue v;
    v.offset = pos_;
    v.line = line_of(pos_);
    if (at_end()) fail("missing value", pos_);
    const char c = t_[pos_];
    if (c == '"') {
      v.type = ConfigValue::Type::String;
      ++pos_;
      while (true) {
        if (at_end() || t_[pos_] == '\n') fail("unterminated string", v.offset);
        const char d = t_[pos_++];
        if (d == '"') break;
        if (d == '\\') {
          if (at_end()) fail("unterminated string", v.offset);
          const char e = t_[pos_++];
          if (e == 'n') v.text += '\n';
          else if (e == 't') v.text += '\t';
          else if (e == '"' || e == '\\') v.text += e;
          else fail(std::string("unknown escape '\\") + e + "'", pos_ - 2);
        } else {
          v.text += d;
        }
      }
      return v;
    }
    if (c == '[') {
      v.type = ConfigValue::Type::List;
      ++pos_;
      skip_all();
      while (true) {
        if (at_end()) fail("unterminated list", v.offset);
        if (t_[pos_] == ']') {
          ++pos_;
          return v;
        }
        v.items.push_back(value());
        skip_all();
        if (at_end()) fail("unterminated list", v.offset);
        if (t_[pos_] == ',') {
          ++pos_;
          skip_all();
        } else if (t_[pos_] != ']') {
          fail("expected ',' or ']' in list", pos_);
        }
      }
    }
    std::string word;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '.' ||
                         t_[pos_] == '+' || t_[pos_] == '-' || t_[pos_] == '_'))
      word += t_[pos_++];
    if (word == "true" || word == "false") {
      v.type = ConfigValue::Type::Bool;
      v.boolean = word == "true";
      return v;
    }
    std::string digits;
    for (char ch : word)
      if (ch != '_') digits += ch;
    double x = 0.0;
    const char* b = digits.data();
    const char* e = b + digits.size();
    if (!digits.empty() && *b == '+') ++b;
    const auto res = std::from_chars(b, e, x);
    if (digits.empty() || res.ec != std::errc() || res.ptr != e) fail("invalid value '" + word + "'", v.offset);
    v.type = ConfigValue::Type::Number;
    v.number = x;
    return v;
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

[[noreturn]] void bad(const ConfigValue& v, const std::string& msg) {
  throw ParseError("config line " + std::to_string(v.line) + ": " + msg, v.offset);
}

std::string as_text(const ConfigValue& v, const std::string& key) {
  if (v.type == ConfigValue::Type::String) return v.text;
  if (v.type == ConfigValue::Type::Number) return format_number(v.number);
  bad(v, "key '" + key + "' expects an expression string or a number");
}
std::string as_string(const ConfigValue& v, const std::string& key) {
  if (v.type != ConfigValue::Type::String) bad(v, "key '" + key + "' expects a string");
  return v.text;
}
double as_number(const ConfigValue& v, const std::string& key) {
  if (v.type != ConfigValue::Type::Number) bad(v, "key '" + key + "' expects a number");
  return v.number;
}
bool as_bool(const ConfigValue& v, const std::string& key) {
  if (v.type != ConfigValue::Type::Bool) bad(v, "key '" + key + "' expects true or false");
  return v.boolean;
}
long long as_int(const ConfigValue& v, const std::string& key) {
  const double x = as_number(v, key);
  if (x != std::floor(x)) bad(v, "key '" + key + "' expects an integer");
  return static_cast<long long>(x);
}

// Keys whose value is a list by nature and never a sweep axis.
bool native_list(const std::string& section, const std::string& key) {
  return section == "evaluation" && (key == "points" || key == "box" || key == "checks");
}

const std::set<std::string> kChristoffel{"G11_1", "G11_2", "G12_1", "G12_2", "G22_1", "G22_2"};
const std::set<std::string> kChecks{"curvature", "bachflat", "invariants", "vsi", "walker",
                                    "zeros",     "conformal", "identities", "frame"};
const std::set<std::string> kQuantities{
    "bach",    "tau",       "normRho2", "normR2",     "classifier", "classifier2", "normDR2",    "normDW2",
    "cubic",   "R2323",     "zeros",    "beta1",      "beta2",      "blocks",      "thm11",      "q3",
    "p1",      "p2",        "bachMixed", "bachFiber", "brinkmann",  "einstein",    "WminusE1E1", "WplusE1E2",
    "WplusMax", "WminusMax", "detG"};

void apply_section(ScenarioConfig& c, const ConfigSection& s) {
  auto unknown = [&](const ConfigEntry& e) -> void {
    const std::string where = s.name.empty() ? "top level" : "[" + s.name + "]";
    bad(e.value, "unknown key '" + e.key + "' in " + where);
  };
  if (s.name.empty()) {
    for (const ConfigEntry& e : s.entries) {
      if (e.key == "name") c.name = as_string(e.value, e.key);
      else if (e.key == "description") c.description = as_string(e.value, e.key);
      else unknown(e);
    }
  } else if (s.name == "surface") {
    for (const ConfigEntry& e : s.entries) {
      if (e.key == "kind") {
        c.surface_kind = as_string(e.value, e.key);
        if (c.surface_kind != "typeA" && c.surface_kind != "typeB" && c.surface_kind != "remark12" &&
            c.surface_kind != "explicit")
          bad(e.value, "surface kind must be typeA, typeB, remark12 or explicit");
      } else if (kChristoffel.count(e.key) || e.key == "phi" || e.key == "c") {
        c.surface[e.key] = as_text(e.value, e.key);
      } else {
        unknown(e);
      }
    }
  } else if (s.name == "surface.constants") {
    for (const ConfigEntry& e : s.entries) {
      if (e.key == "x1" || e.key == "x2" || e.key == "y1" || e.key == "y2" || e.key.find('.') != std::string::npos ||
          e.key.find('-') != std::string::npos || std::isdigit(static_cast<unsigned char>(e.key[0])))
        bad(e.value, "invalid constant name '" + e.key + "'");
      c.constants[e.key] = as_number(e.value, e.key);
    }
  } else if (s.name == "endomorphism") {
    for (const ConfigEntry& e : s.entries) {
      if (e.key == "kind") {
        c.endo_kind = as_string(e.value, e.key);
        if (c.endo_kind != "explicit" && c.endo_kind != "nilpotent_spec" && c.endo_kind != "canonical" &&
            c.endo_kind != "piecewise_s23")
          bad(e.value, "endomorphism kind must be explicit, nilpotent_spec, canonical or piecewise_s23");
      } else if (e.key == "T11" || e.key == "T12" || e.key == "T21" || e.key == "T22" || e.key == "alpha" ||
                 e.key == "xi") {
        c.endo[e.key] = as_text(e.value, e.key);
      } else if (e.key == "mirrored") {
        c.mirrored = as_bool(e.value, e.key);
      } else {
        unknown(e);
      }
    }
  } else if (s.name == "deformation") {
    for (const ConfigEntry& e : s.entries) {
      if (e.key == "phi11") c.deformation[0] = as_text(e.value, e.key);
      else if (e.key == "phi12") c.deformation[1] = as_text(e.value, e.key);
      else if (e.key == "phi22") c.deformation[2] = as_text(e.value, e.key);
      else unknown(e);
    }
  } else if (s.name == "evaluation") {
    for (const ConfigEntry& e : s.entries) {
      const ConfigValue& v = e.value;
      if (e.key == "points") {
        if (v.type != ConfigValue::Type::List) bad(v, "points expects a list of [x1, x2, y1, y2]");
        for (const ConfigValue& p : v.items) {
          if (p.type != ConfigValue::Type::List || p.items.size() != 4)
            bad(p, "each point must be a list of four numbers");
          c.points.push_back({as_number(p.items[0], "points"), as_number(p.items[1], "points"),
                              as_number(p.items[2], "points"), as_number(p.items[3], "points")});
        }
      } else if (e.key == "box") {
        if (v.type != ConfigValue::Type::List || (v.items.size() != 8 && v.items.size() != 6))
          bad(v, "box expects [x1lo, x1hi, x2lo, x2hi, y1lo, y1hi, y2lo, y2hi] or a shared y range");
        for (std::size_t k = 0; k < 6; ++k) c.box[k] = as_number(v.items[k], "box");
        for (std::size_t k = 6; k < 8; ++k) c.box[k] = as_number(v.items[v.items.size() == 8 ? k : k - 2], "box");
        for (int k = 0; k < 4; ++k)
          if (!(c.box[2 * k] <= c.box[2 * k + 1])) bad(v, "box bounds must be ordered");
      } else if (e.key == "checks") {
        if (v.type != ConfigValue::Type::List) bad(v, "checks expects a list of names");
        for (const ConfigValue& n : v.items) {
          const std::string name = as_string(n, "checks");
          if (!kChecks.count(name)) bad(n, "unknown check '" + name + "'");
          c.checks.push_back(name);
        }
      } else if (e.key == "random") {
        const long long n = as_int(v, e.key);
        if (n < 0 || n > 100000) bad(v, "random expects a count in [0, 100000]");
        c.random_points = static_cast<int>(n);
      } else if (e.key == "order") {
        const long long k = as_int(v, e.key);
        if (k < 0 || k > 8) bad(v, "order expects an integer in [0, 8]");
        c.order = static_cast<int>(k);
      } else if (e.key == "tol") {
        c.tol = as_number(v, e.key);
        if (!(c.tol > 0)) bad(v, "tol must be positive");
      } else if (e.key == "seed") {
        const long long s = as_int(v, e.key);
        if (s < 0) bad(v, "seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
      } else if (e.key == "conformal_factor") {
        c.conformal_factor = as_text(v, e.key);
      } else {
        unknown(e);
      }
    }
  } else if (s.name.rfind("expect.", 0) == 0 && s.name.size() > 7) {
    Expectation x;
    x.name = s.name.substr(7);
    for (const ConfigEntry& e : s.entries) {
      const ConfigValue& v = e.value;
      if (e.key == "quantity") {
        x.quantity = as_string(v, e.key);
        if (!kQuantities.count(x.quantity)) bad(v, "unknown quantity '" + x.quantity + "'");
      } else if (e.key == "value") {
        x.value = as_text(v, e.key);
      } else if (e.key == "tol") {
        x.tol = as_number(v, e.key);
        if (!(x.tol >= 0)) bad(v, "tol must be non-negative");
      } else if (e.key == "relative") {
        x.relative = as_bool(v, e.key);
      } else if (e.key == "bound") {
        const std::string b = as_string(v, e.key);
        if (b == "equal") x.bound = Expectation::Bound::Equal;
        else if (b == "upper") x.bound = Expectation::Bound::Upper;
        else if (b == "lower") x.bound = Expectation::Bound::Lower;
        else bad(v, "bound must be equal, upper or lower");
      } else if (e.key == "allow_undefined") {
        x.allow_undefined = as_bool(v, e.key);
      } else if (e.key == "citation") {
        x.citation = as_string(v, e.key);
      } else if (e.key == "provenance") {
        x.provenance = as_string(v, e.key);
      } else {
        unknown(e);
      }
    }
    if (x.quantity.empty()) throw ParseError("config line " + std::to_string(s.line) + ": [" + s.name +
                                                 "] needs a quantity", 0);
    c.expectations.push_back(std::move(x));
  } else {
    throw ParseError("config line " + std::to_string(s.line) + ": unknown section [" + s.name + "]", 0);
  }
}

void validate(const ScenarioConfig& c) {
  auto reject = [&](const std::string& msg) { throw ParseError("scenario '" + c.name + "': " + msg, 0); };
  for (const auto& [k, v] : c.surface) {
    (void)v;
    const bool remark = c.surface_kind == "remark12";
    if (remark && (k == "G11_1" || k == "G11_2" || k == "G12_2"))
      reject("surface kind remark12 determines " + k + " from phi and c");
    if (!remark && (k == "phi" || k == "c")) reject("key '" + k + "' only applies to surface kind remark12");
  }
  const std::string& kind = c.endo_kind;
  for (const auto& [k, v] : c.endo) {
    (void)v;
    const bool entry = k[0] == 'T';
    if (entry && kind != "explicit") reject("key '" + k + "' only applies to endomorphism kind explicit");
    if (k == "xi" && kind != "nilpotent_spec") reject("key 'xi' only applies to endomorphism kind nilpotent_spec");
    if (k == "alpha" && kind != "nilpotent_spec" && kind != "piecewise_s23")
      reject("key 'alpha' only applies to endomorphism kinds nilpotent_spec and piecewise_s23");
  }
  if (c.mirrored && kind != "canonical") reject("mirrored only applies to endomorphism kind canonical");
  if (kind == "nilpotent_spec" && !c.endo.count("alpha")) reject("nilpotent_spec needs alpha");
}

ScenarioConfig build_config(const std::vector<ConfigSection>& sections, const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  for (const ConfigSection& s : sections) apply_section(c, s);
  validate(c);
  return c;
}

}  // namespace

std::string ConfigValue::render() const {
  switch (type) {
    case Type::Number: return format_number(number);
    case Type::Bool: return boolean ? "true" : "false";
    case Type::String: return "\"" + text + "\"";
    case Type::List: {
      std::string s = "[";
      for (std::size_t k = 0; k < items.size(); ++k) s += (k ? ", " : "") + items[k].render();
      return s + "]";
    }
  }
  return {};
}

const char* to_string(Expectation::Bound b) {
  switch (b) {
    case Expectation::Bound::Equal: return "equal";
    case Expectation::Bound::Upper: return "upper";
    case Expectation::Bound::Lower: return "lower";
  }
  return "?";
}

std::vector<ConfigSection> parse_config_text(std::string_view text) { return Reader(text).run(); }

std::vector<ScenarioConfig> parse_scenarios(std::string_view text, const std::string& name) {
  const std::vector<ConfigSection> sections = parse_config_text(text);
  struct Axis {
    std::size_t section, entry;
  };
  std::vector<Axis> axes;
  for (std::size_t s = 0; s < sections.size(); ++s)
    for (std::size_t e = 0; e < sections[s].entries.size(); ++e) {
      const ConfigEntry& en = sections[s].entries[e];
      if (en.value.type != ConfigValue::Type::List || native_list(sections[s].name, en.key)) continue;
      if (en.value.items.empty()) bad(en.value, "sweep over '" + en.key + "' has no values");
      for (const ConfigValue& it : en.value.items)
        if (it.type == ConfigValue::Type::List) bad(it, "sweep values of '" + en.key + "' must be scalars");
      axes.push_back({s, e});
    }

  std::vector<ScenarioConfig> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    std::vector<ConfigSection> fixed = sections;
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      ConfigEntry& en = fixed[axes[a].section].entries[axes[a].entry];
      const ConfigValue chosen = en.value.items[idx[a]];
      en.value = chosen;
      label += (a ? ", " : "") + en.key + "=" + chosen.render();
    }
    ScenarioConfig c = build_config(fixed, name);
    c.sweep_label = label;
    out.push_back(std::move(c));
    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      const ConfigEntry& en = sections[axes[a].section].entries[axes[a].entry];
      if (++idx[a] < en.value.items.size()) break;
      idx[a] = 0;
    }
    if (a == axes.size()) break;
  }
  return out;
}

std::vector<ScenarioConfig> load_scenarios(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return parse_scenarios(ss.str(), stem);
}

Expr scenario_expr(const ScenarioConfig& c, const std::string& key, const std::string& text) {
  try {
    return parse_expr(text, c.constants);
  } catch (const ParseError& e) {
    throw ParseError("in '" + key + "' = \"" + text + "\": " + e.detail(), e.position());
  } catch (const Error& e) {
    throw Error(e.code(), "in '" + key + "' = \"" + text + "\": " + e.what());
  }
}

AffineSurface build_surface(const ScenarioConfig& c) {
  auto get = [&](const std::string& k) {
    const auto it = c.surface.find(k);
    return it == c.surface.end() ? Expr(0.0) : scenario_expr(c, k, it->second);
  };
  static const char* order[6] = {"G11_1", "G11_2", "G12_1", "G12_2", "G22_1", "G22_2"};
  if (c.surface_kind == "remark12")
    return remark12_surface(get("phi"), get("c"), get("G12_1"), get("G22_1"), get("G22_2"));
  if (c.surface_kind == "explicit") {
    std::array<Expr, 6> g;
    for (int k = 0; k < 6; ++k) g[k] = get(order[k]);
    return explicit_surface(g);
  }
  std::array<double, 6> v{};
  for (int k = 0; k < 6; ++k) {
    const Expr e = get(order[k]);
    for (int i = 0; i < 4; ++i)
      if (e.depends_on(i))
        throw Error(ErrorCode::InvalidArgument,
                    std::string("surface kind ") + c.surface_kind + " needs constant " + order[k]);
    v[k] = e.eval({});
  }
  return c.surface_kind == "typeA" ? type_a_surface(v) : type_b_surface(v);
}

std::optional<NilpotentSpec> scenario_nilpotent(const ScenarioConfig& c) {
  if (c.endo_kind != "nilpotent_spec") return std::nullopt;
  const auto xi = c.endo.find("xi");
  return NilpotentSpec{scenario_expr(c, "alpha", c.endo.at("alpha")),
                       xi == c.endo.end() ? Expr(0.0) : scenario_expr(c, "xi", xi->second)};
}

EndoField build_endo(const ScenarioConfig& c) {
  if (c.endo_kind == "canonical") return c.mirrored ? EndoField::mirrored() : EndoField::canonical();
  if (c.endo_kind == "nilpotent_spec") return scenario_nilpotent(c)->endo();
  if (c.endo_kind == "piecewise_s23") {
    const auto a = c.endo.find("alpha");
    return piecewise_endo(a == c.endo.end() ? parse_expr("x2^6") : scenario_expr(c, "alpha", a->second));
  }
  std::array<std::array<ScalarField, 2>, 2> t;
  static const char* keys[2][2] = {{"T11", "T12"}, {"T21", "T22"}};
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < 2; ++i) {
      const auto it = c.endo.find(keys[r][i]);
      t[r][i] = it == c.endo.end() ? ScalarField() : ScalarField(scenario_expr(c, keys[r][i], it->second));
    }
  return EndoField(t, "explicit");
}

DeformationField build_deformation(const ScenarioConfig& c) {
  static const char* keys[3] = {"phi11", "phi12", "phi22"};
  std::array<ScalarField, 3> f;
  for (int k = 0; k < 3; ++k) {
    const Expr e = scenario_expr(c, keys[k], c.deformation[k]);
    if (e.depends_on(2) || e.depends_on(3))
      throw Error(ErrorCode::InvalidArgument, std::string("deformation ") + keys[k] + " must not depend on y1, y2");
    f[k] = e.is_zero_literal() ? ScalarField() : ScalarField(e);
  }
  return {f[0], f[1], f[2]};
}

ExtensionMetric build_scenario_metric(const ScenarioConfig& c) {
  const AffineSurface s = build_surface(c);
  if (c.endo_kind == "piecewise_s23") {
    const auto a = c.endo.find("alpha");
    const ExtensionMetric m =
        mixed_jordan_example(a == c.endo.end() ? parse_expr("x2^6") : scenario_expr(c, "alpha", a->second), s);
    return ExtensionMetric(m.surface(), m.endo(), build_deformation(c));
  }
  return build_metric(s, build_endo(c), build_deformation(c));
}

std::vector<Point4> sample_points(const ScenarioConfig& c) {
  std::vector<Point4> pts = c.points;
  std::mt19937_64 rng(c.seed);
  std::array<std::uniform_real_distribution<double>, 4> u{
      std::uniform_real_distribution<double>(c.box[0], c.box[1]),
      std::uniform_real_distribution<double>(c.box[2], c.box[3]),
      std::uniform_real_distribution<double>(c.box[4], c.box[5]),
      std::uniform_real_distribution<double>(c.box[6], c.box[7])};
  for (int k = 0; k < c.random_points; ++k) {
    Point4 p;
    p.x1 = u[0](rng);
    p.x2 = u[1](rng);
    p.y1 = u[2](rng);
    p.y2 = u[3](rng);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace rext
