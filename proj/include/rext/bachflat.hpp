// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rext/curvature.hpp"
#include "rext/extension.hpp"

namespace rext {

/// |Gamma_11^2| and |(Gamma_11^1)^2 - Gamma_11^1 Gamma_12^2 + d_1(Gamma_11^1 - Gamma_12^2)| at p.
std::array<double, 2> thm11_check(const AffineSurface& s, const Point4& p);

/// Value and base partial derivatives of a function of (x1, x2) up to second
/// order. `order` records how many derivative levels are valid.
struct BaseDerivatives {
  double v = 0.0;
  double d10 = 0.0;
  double d01 = 0.0;
  double d20 = 0.0;
  double d11 = 0.0;
  double d02 = 0.0;
  int order = 2;

  static BaseDerivatives from_jet(const Jet& j);
};

/// Inputs of the two Bach-flatness operators at one base point. Christoffel
/// symbols use the surface ordering G11_1, G11_2, G12_1, G12_2, G22_1, G22_2.
struct PDEOperands {
  BaseDerivatives xi;
  BaseDerivatives alpha;
  std::array<BaseDerivatives, 6> gamma;
};

PDEOperands pde_operands(const AffineSurface& s, const NilpotentSpec& spec, const Point4& p);

/// -xi^(1,0) + xi xi^(0,1) + G22_1 xi^3 - (2 G12_1 - G22_2) xi^2 + (G11_1 - 2 G12_2) xi + G11_2
double p1_eval(const PDEOperands& ops);
/// Which reading of the second operator to evaluate. As displayed, the first
/// bracket opens with 2 xi alpha^(0,1), which makes that group cubic in alpha;
/// the corrected reading uses 2 xi^(0,1) and satisfies B_22 = -4 P2 on every
/// solution of P1 = 0.
enum class P2Form { Corrected, AsDisplayed };

/// The second operator, one line per displayed group of monomials.
double p2_eval(const PDEOperands& ops, P2Form form = P2Form::Corrected);

/// Bach components B_ij = B(d_xi, d_xj) compared with the operator identities
/// Q3 = -4 alpha^2 P1^2 and (when P1 = 0) B_11 = -4 xi^2 P2, B_12 = -4 xi P2,
/// B_22 = -4 P2.
struct QIdentityReport {
  double b11 = 0.0, b12 = 0.0, b22 = 0.0;
  double alpha = 0.0, xi = 0.0;
  double p1 = 0.0, p2 = 0.0;
  double q3 = 0.0;
  double q3_residual = 0.0;  // |Q3 + 4 alpha^2 P1^2|
  double b11_residual = 0.0; // |B_11 + 4 xi^2 P2|
  double b12_residual = 0.0; // |B_12 + 4 xi P2|
  double b22_residual = 0.0; // |B_22 + 4 P2|
  double mixed_block = 0.0;  // max |B(d_x, d_y)|
  double fiber_block = 0.0;  // max |B(d_y, d_y)|
};

QIdentityReport q_identities(const AffineSurface& s, const NilpotentSpec& spec, const Point4& p,
                             const DeformationField& phi = {});

/// A candidate conformal factor for the conformally Einstein equation.
struct ConformalCandidate {
  ScalarField phi;
  std::string label;
};

/// A y1 + B y2 + psi with constant A, B.
ScalarField fiber_linear(double a, double b, const ScalarField& psi);
/// Pointwise product of two fields.
ScalarField product(const ScalarField& f, const ScalarField& g);

/// Solution P(x2) of 2 P'' + A P = 0 with P(0) = p0, P'(0) = p1 for constant A,
/// tabulated with a classical fourth-order Runge-Kutta step of size h. Jets of
/// every order are recovered from (P, P') through P^(n+2) = -A/2 P^(n).
ScalarField ode_profile(double a, double p0, double p1, double h = 1e-3);

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// 2 Hes(phi) + phi rho - 1/4 (2 Lap(phi) + phi tau) g.
Matrix4 brinkmann_e(const MetricField& g, const ScalarField& phi, const Point4& p);
/// Same, reusing a pack of order >= 2 built at p.
Matrix4 brinkmann_e(const CurvaturePack& pack, const ScalarField& phi, const Point4& p);

/// (div4 W)_ijk - W_ijkl g^lm d_m log(phi), flattened as [i][j][k].
std::array<std::array<std::array<double, 4>, 4>, 4> e_tilde(const MetricField& g, const ScalarField& phi,
                                                             const Point4& p);

/// ||rho - tau/4 g||_inf for the metric phi^-2 g.
double einstein_residual(const MetricField& g, const ScalarField& phi, const Point4& p);

struct BachScan {
  double max_abs = 0.0;
  Point4 worst{};
};

/// Largest |B_ij| over the given points.
BachScan bach_scan(const ExtensionMetric& m, std::span<const Point4> points, int order = 4);

/// Best candidate of a family for the conformally Einstein equation, scored by
/// max over points of ||E||_inf / |phi|.
struct CandidateSweep {
  int candidates = 0;
  double best_residual = 0.0;
  std::string best_label;
  bool none_below = true;  // no candidate below the tolerance
  double tol = 1e-4;
};

CandidateSweep candidate_sweep(const MetricField& g, std::span<const ConformalCandidate> family,
                               std::span<const Point4> points, double tol = 1e-4);

/// Candidates (x1)^(e + d) P(x2) for shifts d in {-1, -1/2, 0, 1/2, 1}, with P
/// from exp(a x2 + b x2^2), 2 + cos(w x2 + s) and solutions of 2 P'' + A P = 0,
/// each also with fiber-linear terms A y1 + B y2 added.
/// Extra ODE profiles are given as (A, P(0), P'(0)).
std::vector<ConformalCandidate> power_ansatz_family(double exponent,
                                                    std::span<const std::array<double, 3>> ode = {});
/// Candidates exp(r x2 / x1) x1^e exp(k x1) for r in {rate, -rate, 2 rate, 0},
/// each also with fiber-linear terms added.
std::vector<ConformalCandidate> exp_ansatz_family(double rate);

/// One re-evaluated closed-form identity of the worked examples.
struct CatalogCheck {
  std::string name;
  std::string citation;
  double value = 0.0;
  double expected = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<CatalogCheck> example_catalog_checks(std::uint64_t seed = 1);

}  // namespace rext
