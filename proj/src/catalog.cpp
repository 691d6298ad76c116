// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <mutex>
#include <random>

#include "rext/bachflat.hpp"
#include "rext/scenario.hpp"

namespace rext {

namespace {

std::string expect(const std::string& name, const std::string& quantity, const std::string& value,
                   const std::string& bound, const std::string& citation, const std::string& provenance,
                   const std::string& extra = {}) {
  return "\n[expect." + name + "]\nquantity = \"" + quantity + "\"\nvalue = \"" + value + "\"\nbound = \"" + bound +
         "\"\ncitation = \"" + citation + "\"\nprovenance = \"" + provenance + "\"\n" + extra;
}

std::string seed_line(std::uint64_t seed) { return "seed = " + std::to_string(seed) + "\n"; }

std::vector<std::string> example_4_2(std::uint64_t seed) {
  return {R"cfg(name = "example_4_2"
description = "closed nilpotent family with xi = 0"
[surface]
kind = "typeA"
G12_1 = 1
G12_2 = 1
[endomorphism]
kind = "nilpotent_spec"
alpha = "(1 + 0.2*cos(x2))*sqrt(exp(2*x1) + 1 + 0.5*sin(x2))"
xi = "0"
[deformation]
phi11 = "x1*x2"
phi22 = "cos(x2)"
[evaluation]
random = 6
checks = ["bachflat", "identities"]
)cfg" + seed_line(seed) +
          expect("bach", "bach", "1e-8", "upper", "Example 4.2", "PAPER") +
          expect("p1", "p1", "0", "equal", "Example 4.2", "PAPER", "tol = 1e-12\n") +
          expect("p2", "p2", "0", "equal", "Example 4.2", "PAPER", "tol = 1e-9\n")};
}

std::vector<std::string> example_4_3(std::uint64_t seed) {
  const char* cases[3][3] = {{"1", "0", "y1*exp(-G121*x2)"},
                             {"2", "G122", "exp(-G122*x1 + G121*x2)"},
                             {"3", "G122", "y1*exp(-G121*x2)"}};
  std::vector<std::string> out;
  for (const auto& c : cases) {
    const std::string g111 = std::string(c[0]) == "3" ? "G122" : "0";
    out.push_back(std::string("name = \"example_4_3_case") + c[0] + R"cfg("
description = "conformally Einstein structure with the canonical nilpotent endomorphism"
[surface]
kind = "typeA"
G11_1 = ")cfg" + g111 + R"cfg("
G12_1 = "G121"
G12_2 = ")cfg" + c[1] + R"cfg("
G22_1 = "G221"
G22_2 = "G222"
[surface.constants]
G121 = 0.6
G122 = 0.8
G221 = 0.3
G222 = -0.5
[endomorphism]
kind = "canonical"
[evaluation]
random = 5
box = [-1, 1, -1, 1, 0.3, 1.2, -1, 1]
checks = ["conformal"]
conformal_factor = ")cfg" + c[2] + "\"\n" + seed_line(seed) +
                  expect("brinkmann", "brinkmann", "1e-8", "upper", "Example 4.3", "PAPER") +
                  expect("einstein", "einstein", "1e-8", "upper", "Example 4.3", "PAPER"));
  }
  return out;
}

std::vector<std::string> example_4_4(std::uint64_t seed) {
  return {R"cfg(name = "example_4_4_case1_1b"
description = "Type B structure with C22^2 = C12^1 (5 - 4 C12^2) and its conformal factor"
[surface]
kind = "typeB"
G11_1 = 1
G12_1 = "C121"
G12_2 = "C122"
G22_1 = "C221"
G22_2 = "C121*(5 - 4*C122)"
[surface.constants]
C121 = 0.7
C122 = 0.4
C221 = -0.3
[endomorphism]
kind = "canonical"
[deformation]
phi11 = "4*(C221 + 2*C121^2*(C122 - 1))/x1^2"
[evaluation]
random = 5
box = [0.6, 1.6, -0.5, 0.5, -1, 1, -1, 1]
checks = ["conformal"]
conformal_factor = "x1^(2 - C122)"
)cfg" + seed_line(seed) +
          expect("brinkmann", "brinkmann", "1e-8", "upper", "Example 4.4", "PAPER") +
          expect("einstein", "einstein", "1e-8", "upper", "Example 4.4", "PAPER")};
}

std::vector<std::string> example_4_5(std::uint64_t seed) {
  return {R"cfg(name = "example_4_5"
description = "nilpotent structure over a surface with the Bach-flat relations, f = f(x2)"
[surface]
kind = "remark12"
phi = "0.3*sin(x1) + 0.2*x2"
c = "0.5 + 0.1*x2"
G12_1 = "0.4*x2"
G22_1 = "x1"
G22_2 = -0.2
[endomorphism]
kind = "nilpotent_spec"
alpha = "exp(sin(x2))"
xi = 0
[evaluation]
random = 5
checks = ["bachflat"]
)cfg" + seed_line(seed) +
          expect("bach", "bach", "1e-8", "upper", "Example 4.5", "PAPER") +
          expect("relations", "thm11", "1e-10", "upper", "Theorem 1.1", "PAPER")};
}

std::vector<std::string> example_4_6(std::uint64_t seed) {
  return {R"cfg(name = "example_4_6"
description = "mirrored nilpotent structure exp(f) d2 (x) dx1"
[surface]
kind = "explicit"
G11_1 = "-0.3*cos(x1)"
G12_1 = "(0.5 + 0.2*x1)*exp(0.4)"
G12_2 = "-0.3*cos(x1) + (0.5 + 0.1*x2)*exp(0.3*sin(x1) + 0.2*x2)"
[endomorphism]
kind = "explicit"
T21 = "exp((0.5 + 0.2*x1)*exp(0.4)*x2 + 0.5*log(1 + 0.7*exp(-2*(0.5 + 0.2*x1)*exp(0.4)*x2)) + 0.2*x1)"
[evaluation]
random = 5
checks = ["bachflat"]
)cfg" + seed_line(seed) +
          expect("bach", "bach", "1e-8", "upper", "Example 4.6", "PAPER")};
}

std::vector<std::string> example_5_1(std::uint64_t seed) {
  return {R"cfg(name = "example_5_1_theta_pi3"
description = "rotation endomorphism r R(theta) at theta = pi/3 over the flat surface"
[surface]
kind = "explicit"
[surface.constants]
r = [1, 0.7]
th = 1.0471975511965976
[endomorphism]
kind = "explicit"
T11 = "r*cos(th)"
T12 = "r*sin(th)"
T21 = "-r*sin(th)"
T22 = "r*cos(th)"
[evaluation]
random = 4
checks = ["invariants", "vsi"]
)cfg" + seed_line(seed) +
          expect("tau", "tau", "0", "equal", "Example 5.1", "PAPER", "tol = 1e-10\n") +
          expect("normR2", "normR2", "0", "equal", "Example 5.1", "PAPER", "tol = 1e-10\n") +
          expect("normRho2", "normRho2", "-3*r^4", "equal", "Example 5.1", "DERIVED", "tol = 1e-10\n") +
          expect("classifier", "classifier", "-12*r^4", "equal", "Remark 5.2", "DERIVED", "tol = 1e-10\n")};
}

std::vector<std::string> example_6_3(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::string g;
  for (const char* k : {"G11_1", "G11_2", "G12_1", "G12_2", "G22_1", "G22_2"})
    g += std::string(k) + " = " + std::to_string(u(rng)) + "\n";
  return {R"cfg(name = "example_6_3"
description = "seeded Type A surface with the canonical nilpotent endomorphism"
[surface]
kind = "typeA"
)cfg" + g + R"cfg([endomorphism]
kind = "canonical"
[deformation]
phi11 = "x1*x2"
phi12 = "sin(x1)"
phi22 = "0.5 + x2^2"
[evaluation]
random = 5
checks = ["walker"]
)cfg" + seed_line(seed) +
          expect("beta1", "beta1", "0", "equal", "Example 6.3", "PAPER", "tol = 1e-10\nallow_undefined = true\n") +
          expect("blocks", "blocks", "1e-10", "upper", "Lemma 6.1", "PAPER")};
}

const char* kCase1General =
    "(2*(2 - cc)*cc*x1^2*(x1 + x2^2) - 4*(2 - cc)^2*cc*x1*y1 - (4*cc + 1)*C121^2 + 4*(cc - 2)*C221*cc^2 - C222^2"
    " + 2*(1 - 2*(cc - 1)*cc)*C121*C222)";
const char* kCase1Beta2 =
    "((cc + 3)^2*x1^2*(x1 + x2^2) + 2*(cc - 2)*(cc + 3)^2*x1*y1 - 2*(cc + 3)^2*cc*C221 - 2*((cc - 1)*cc + 3)*C222^2"
    " - 2*((4*cc + 9)*cc + 6)*C121^2 - 2*((3*cc - 4)*cc - 9)*C121*C222)";
const char* kCase1Equal =
    "(2*a*x1^2*(x1 + x2^2) - 4*a^2*x1*y1 - C222^2 - (4*a^2 + 1)*C121^2 - 4*a*C221 + 2*C121*C222)";
const char* kCase1EqualBeta2 =
    "(4*(a + 1)^2*x1^2*(x1 + x2^2) - 8*(a + 1)^2*a*x1*y1 - 2*(a + 2)*C222^2 - 8*(a + 1)^2*C221"
    " - 2*(a*(8*a + 9) + 2)*C121^2 + 4*(3*a + 2)*C121*C222)";

std::string type_b_walker(const std::string& name, const std::string& symbols, const std::string& constants,
                          bool mirrored, const std::string& deformation, std::uint64_t seed) {
  return "name = \"" + name + "\"\n[surface]\nkind = \"typeB\"\n" + symbols + "[surface.constants]\n" + constants +
         "[endomorphism]\nkind = \"canonical\"\nmirrored = " + (mirrored ? "true" : "false") + "\n[deformation]\n" +
         deformation + "[evaluation]\nrandom = 4\nbox = [0.8, 1.6, -0.5, 0.5, -1, 1, -1, 1]\nchecks = [\"walker\"]\n" +
         seed_line(seed);
}

std::vector<std::string> example_6_4_case1(std::uint64_t seed) {
  const std::string def = "phi11 = \"x1 + x2^2\"\nphi12 = \"x1*x2\"\nphi22 = 0.5\n";
  const std::string consts = "C121 = 0.7\nC221 = -0.3\nC222 = 0.9\n";
  const std::string rel = "tol = 1e-8\nrelative = true\n";
  return {
      type_b_walker("example_6_4_case1_general",
                    "G11_1 = 1\nG12_1 = \"C121\"\nG12_2 = \"cc\"\nG22_1 = \"C221\"\nG22_2 = \"C222\"\n",
                    consts + "cc = [0.4, 0, 2]\n", false, def, seed) +
          expect("beta1", "beta1", std::string("(C121 + C222)^2/") + kCase1General, "equal", "Example 6.4",
                 "PAPER", rel) +
          expect("beta2", "beta2", std::string(kCase1Beta2) + "/" + kCase1General, "equal", "Example 6.4", "PAPER",
                 rel),
      type_b_walker("example_6_4_case1_equal",
                    "G11_1 = \"a\"\nG12_1 = \"C121\"\nG12_2 = \"a\"\nG22_1 = \"C221\"\nG22_2 = \"C222\"\n",
                    consts + "a = [0.6, 0]\n", false, def, seed) +
          expect("beta1", "beta1", std::string("(C121 + C222)^2/") + kCase1Equal, "equal", "Example 6.4", "PAPER",
                 rel) +
          expect("beta2", "beta2", std::string(kCase1EqualBeta2) + "/" + kCase1Equal, "equal", "Example 6.4",
                 "PAPER", rel)};
}

std::vector<std::string> example_6_4_case2(std::uint64_t seed) {
  const std::string def = "phi11 = 0.3\nphi12 = \"x1*x2\"\nphi22 = \"x1 + x2^2\"\n";
  const std::string consts = "C111 = 0.6\nC112 = -0.5\nC121 = 0.7\n";
  const std::string rel = "tol = 1e-8\nrelative = true\n";
  const std::string d =
      "(C121^2*(-2*x1^2*(x1 + x2^2) - 4*C121*x1*y2 - 4*C111*C122 + 4*C112*C121 - 1))";
  const std::string b2 =
      "C121^2*(x1^2*(x1 + x2^2) + 2*C121*x1*y2 - 12*C122 - 2*C112*C121 - 4 - 2*C111^2 - 8*C122^2"
      " - 6*(C122 + 1)*C111)";
  return {
      type_b_walker("example_6_4_case2_general",
                    "G11_1 = \"C111\"\nG11_2 = \"C112\"\nG12_1 = \"C121\"\nG12_2 = \"C122\"\n",
                    consts + "C122 = 0.4\n", true, def, seed) +
          expect("beta1", "beta1", "C121^2/" + d, "equal", "Example 6.4", "PAPER", rel) +
          expect("beta2", "beta2", b2 + "/" + d, "equal", "Example 6.4", "PAPER", rel),
      type_b_walker("example_6_4_case2_special",
                    "G11_1 = \"C111\"\nG11_2 = \"C112\"\nG12_1 = \"C121\"\nG12_2 = \"C122\"\nG22_2 = \"C121\"\n",
                    consts + "C122 = 2\n", true, def, seed) +
          expect("beta1", "beta1", "-1/C122^2", "equal", "Example 6.4", "PAPER", "tol = 1e-10\n") +
          expect("beta2", "beta2", "-(x1^2*(x1 + x2^2) - 2*C121*x1*y2 - 4*C122^2 - 2*C122)/C122^2", "equal",
                 "Example 6.4", "DERIVED", rel)};
}

std::vector<std::string> s23(std::uint64_t seed) {
  return {R"cfg(name = "s23_mixed_jordan"
description = "endomorphism alpha Id for x2 <= 0 and alpha d1 (x) dx2 for x2 >= 0, alpha = x2^6"
[surface]
kind = "explicit"
[endomorphism]
kind = "piecewise_s23"
alpha = "x2^6"
[deformation]
phi11 = "x1*x2"
[evaluation]
points = [[0.3, -0.4, 0.2, -0.1], [-0.2, -0.7, 0.5, 0.3], [0.1, 0.4, -0.3, 0.6], [0.6, 0.8, 0.2, 0.2]]
random = 4
checks = ["bachflat", "curvature"]
)cfg" + seed_line(seed) +
          expect("bach", "bach", "1e-8", "upper", "mixed Jordan type example", "PAPER")};
}

std::vector<CatalogEntry> build_catalog() {
  return {
      {"example_4_2", "Example 4.2", "Bach-flat closed nilpotent families over a Type A surface", example_4_2,
       {"example_4_2."}},
      {"example_4_3", "Example 4.3", "conformally Einstein Type A structures and strictness sweeps", example_4_3,
       {"example_4_3"}},
      {"example_4_4", "Example 4.4", "Type B structures: displayed E components and sweeps", example_4_4,
       {"example_4_4"}},
      {"example_4_5", "Example 4.5", "Bach-flat structures from the surface relations", example_4_5,
       {"example_4_5"}},
      {"example_4_6", "Example 4.6", "mirrored and canonical structures on one surface", example_4_6,
       {"example_4_6"}},
      {"example_5_1_theta_pi3", "Example 5.1", "non-nilpotent rotation with vanishing tau and |R|^2", example_5_1,
       {}},
      {"example_6_3", "Example 6.3", "beta1 = 0 for Type A surfaces", example_6_3, {}},
      {"example_6_4_case1", "Example 6.4", "beta1, beta2 for Type B with T = d1 (x) dx2", example_6_4_case1, {}},
      {"example_6_4_case2", "Example 6.4", "beta1, beta2 for Type B with T = d2 (x) dx1", example_6_4_case2, {}},
      {"s23_mixed_jordan", "mixed Jordan type example", "Bach-flat structure changing Jordan type across x2 = 0",
       s23, {}},
  };
}

std::vector<CatalogCheck> cached_checks(std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::vector<CatalogCheck>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(seed);
  if (it == cache.end()) it = cache.emplace(seed, example_catalog_checks(seed)).first;
  return it->second;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const CatalogEntry& e : catalog())
    if (e.name == name) return e;
  throw Error(ErrorCode::NotFound, "unknown catalog entry '" + name + "'");
}

RunReport catalog_run(const std::string& name, const RunOptions& opt) {
  const CatalogEntry& entry = catalog_entry(name);
  const std::uint64_t seed = opt.seed.value_or(1);
  std::vector<ScenarioConfig> configs;
  for (const std::string& text : entry.scenarios(seed))
    for (ScenarioConfig& c : parse_scenarios(text, entry.name)) configs.push_back(std::move(c));

  std::vector<Assertion> extra;
  if (!entry.check_prefixes.empty()) {
    for (const CatalogCheck& c : cached_checks(seed)) {
      bool match = false;
      for (const std::string& p : entry.check_prefixes) match = match || c.name.rfind(p, 0) == 0;
      if (!match) continue;
      Assertion a;
      a.name = c.name;
      a.quantity = "identity";
      a.citation = c.citation;
      a.provenance = c.name.find("sweep") != std::string::npos ? "DERIVED" : "PAPER";
      a.bound = c.name.find("sweep") != std::string::npos ? "sweep" : "equal";
      a.value = c.value;
      a.expected = c.expected;
      a.residual = c.residual;
      a.tol = c.tol;
      a.pass = c.pass;
      a.note = c.note;
      extra.push_back(std::move(a));
    }
  }
  RunOptions o = opt;
  o.require_tags = true;
  return run_scenarios(configs, entry.name, o, std::move(extra));
}

}  // namespace rext
