// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rext/extension.hpp"
#include "rext/metric.hpp"
#include "rext/tensor.hpp"

namespace rext {

/// Sign and index conventions used by the curvature engine. Serialized into
/// every report so archived numbers are self-describing.
struct ConventionRecord {
  std::string curvature_operator = "R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]";
  std::string riemann_components = "R(d_i,d_j)d_k = R_ijk^l d_l, R_ijkl = g(R(d_i,d_j)d_l, d_k) = R_ijl^m g_mk";
  std::string ricci = "rho_jk = R_ijk^i";
  std::string scalar = "tau = g^jk rho_jk";
  std::string weyl =
      "W = R - 1/2 (rho_jl g_ik - rho_il g_jk + g_jl rho_ik - g_il rho_jk) + tau/6 (g_jl g_ik - g_il g_jk)";
  std::string covariant_derivative = "derivative index appended last: T_{a...;n}";
  std::string divergence = "(div4 W)_ijk = g^ln W_ijkl;n";
  std::string bach = "B_ij = g^ka g^lb W_kilj;b;a + 1/2 rho^kl W_kilj";
  std::string theta = "Theta_ijkl = 1/2 d_{y_i} d_{y_j} B_kl at y = 0";
  std::string two_forms =
      "W(E,E') = sum_{a<b,c<d} E_ab E'_cd eta_a eta_b eta_c eta_d W(e_a,e_b,e_d,e_c), eta = (1,1,-1,-1)";
};

const ConventionRecord& conventions();

struct PackOptions {
  int order = 4;              // jet order of the metric
  bool weyl_derivatives = true;
  bool bach = true;
  bool riemann_derivative = false;
};

/// Curvature quantities of a metric at one point, as jets in the base
/// coordinates. Index positions:
///   gamma(i,j,k) = Gamma_ij^k, riemann_up(i,j,k,l) = R_ijk^l,
///   riemann(i,j,k,l) = R_ijkl, ricci(j,k), weyl(i,j,k,l),
///   dweyl(a,b,c,d,n) = W_abcd;n, div_weyl(i,j,k), bach(i,j),
///   driemann(a,b,c,d,n) = R_abcd;n.
struct CurvaturePack {
  Point4 point;
  int order = 0;
  JetMatrix4 g;
  JetMatrix4 g_inv;
  JetTensor gamma;
  JetTensor riemann_up;
  JetTensor riemann;
  JetTensor ricci;
  Jet tau;
  JetTensor weyl;
  std::optional<JetTensor> dweyl;
  std::optional<JetTensor> div_weyl;
  std::optional<JetTensor> bach;
  std::optional<JetTensor> driemann;
};

CurvaturePack curvature_pack(const MetricField& g, const Point4& p, const PackOptions& opt = {});
inline CurvaturePack curvature_pack(const ExtensionMetric& m, const Point4& p, const PackOptions& opt = {}) {
  return curvature_pack(m.field(), p, opt);
}

/// Levi-Civita Christoffel symbols Gamma_ij^k from metric jets; result has
/// order one less than the metric.
JetTensor levi_civita(const JetMatrix4& g, const JetMatrix4& g_inv);

/// Covariant derivative of a fully covariant tensor; the derivative index
/// is appended as the last slot. The result order is
/// min(t.order() - 1, gamma.order()).
JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma);

/// Every contraction g^{ab} over two slots of a rank-4 covariant tensor;
/// returns the largest |value|.
double max_trace(const JetTensor& t, const JetMatrix4& g_inv);

/// Theta_ijkl (i,j,k,l in {0,1}), the quadratic fiber coefficients of the
/// Bach tensor at y = 0, for a constant endomorphism over the flat surface.
using ThetaTensor = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;
ThetaTensor theta_extract(const ExtensionMetric& m, const Point4& base);
ThetaTensor theta_extract(const Matrix2& t);

/// Orthonormal frame of signature (+,+,-,-) adapted to an extension metric,
/// the bases of self-dual and anti-self-dual 2-forms, and the Weyl
/// components on them.
struct FrameSD {
  std::array<std::array<Jet, 4>, 4> e;  // e[a][i]: coordinate components of e_{a+1}
  std::array<std::array<double, 6>, 3> e_plus;   // coefficients on e^{12}, e^{13}, e^{14}, e^{23}, e^{24}, e^{34}
  std::array<std::array<double, 6>, 3> e_minus;
  std::array<std::array<Jet, 3>, 3> w_plus;
  std::array<std::array<Jet, 3>, 3> w_minus;
  std::array<std::array<double, 4>, 4> frame_gram;  // g(e_a, e_b) values
};

FrameSD frame_sd(const ExtensionMetric& m, const Point4& p, int order = 3);
FrameSD frame_sd(const CurvaturePack& pack);

/// One coordinate component checked against the structural zero list.
struct ZeroEntry {
  std::string name;
  double value;
};

struct StructuralZerosReport {
  bool ok = true;
  double max_violation = 0.0;
  std::vector<ZeroEntry> violations;  // components outside the allowed list above tolerance
  std::vector<ZeroEntry> allowed;     // the allowed components and their values
  double r2323 = 0.0;
};

/// For T = d_{x^1} (x) dx^2, checks that every inverse-metric, Christoffel and
/// curvature component outside the known list of possibly non-zero entries
/// vanishes.
StructuralZerosReport structural_zeros(const ExtensionMetric& m, const Point4& p, double tol = 1e-10);

/// 1-based component name such as "R_2323" or "Gamma_12^3".
std::string component_name(const std::string& prefix, const std::vector<int>& idx, int upper_from = -1);

}  // namespace rext
