// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "rext/expr.hpp"
#include "rext/field.hpp"
#include "rext/metric.hpp"
#include "rext/surface.hpp"

namespace rext {

using EndoJets = std::array<std::array<Jet, 2>, 2>;  // [r][i] = T^r_i

/// Endomorphism field T = T^r_i d_{x^r} (x) dx^i on the surface.
class EndoField {
 public:
  EndoField();  // zero
  EndoField(std::array<std::array<ScalarField, 2>, 2> t, std::string label = "explicit");

  const ScalarField& entry(int r, int i) const { return t_[r][i]; }
  EndoJets jets(const Point4& p, int order) const;
  Matrix2 values(const Point4& p) const;
  const std::string& label() const { return label_; }

  /// The endomorphism d_{x^1} (x) dx^2.
  static EndoField canonical();
  /// The endomorphism d_{x^2} (x) dx^1.
  static EndoField mirrored();
  static EndoField scalar(const ScalarField& lambda);
  static EndoField constant(const Matrix2& m);

 private:
  std::array<std::array<ScalarField, 2>, 2> t_;
  std::string label_;
};

/// T = alpha * [[xi, 1], [-xi^2, -xi]]; squares to zero identically.
struct NilpotentSpec {
  Expr alpha;
  Expr xi;

  EndoField endo() const;
};

/// The same endomorphism for arbitrary scalar fields alpha and xi.
EndoField nilpotent_endo(const ScalarField& alpha, const ScalarField& xi, std::string label = "nilpotent");

/// Symmetric 2-tensor Phi on the surface.
struct DeformationField {
  ScalarField phi11;
  ScalarField phi12;
  ScalarField phi22;

  const ScalarField& entry(int i, int j) const { return i == j ? (i == 0 ? phi11 : phi22) : phi12; }
};

/// The modified Riemannian extension of (surface, T, Phi) on the cotangent
/// bundle, with metric
///   2 dx^i o dy_i + {1/2 y_r y_s (T^r_i T^s_j + T^r_j T^s_i) - 2 y_k Gamma_ij^k + Phi_ij} dx^i o dx^j.
class ExtensionMetric {
 public:
  ExtensionMetric(AffineSurface surface, EndoField endo, DeformationField deformation = {});

  JetMatrix4 metric(const Point4& p, int order) const;
  MetricField field() const;

  const AffineSurface& surface() const { return surface_; }
  const EndoField& endo() const { return endo_; }
  const DeformationField& deformation() const { return deformation_; }

 private:
  AffineSurface surface_;
  EndoField endo_;
  DeformationField deformation_;
};

ExtensionMetric build_metric(const AffineSurface& s, const EndoField& t, const DeformationField& phi = {});

enum class JordanKind { Zero, ScalarMultiple, NilpotentNonzero, GenericNonScalar };
const char* to_string(JordanKind k);

struct JordanClass {
  JordanKind kind = JordanKind::Zero;
  std::complex<double> lambda1;
  std::complex<double> lambda2;
  double deviation = 0.0;  // ||T - tr(T)/2 Id||_inf
};

inline constexpr double kClassifyTolerance = 1e-10;

JordanClass classify_matrix(const Matrix2& t, double tol = kClassifyTolerance);
JordanClass classify_point(const EndoField& t, const Point4& p, double tol = kClassifyTolerance);

/// Residuals of the two relations on a surface that make the extension with
/// T = d_{x^1} (x) dx^2 Bach flat: Gamma_11^2 and
/// (Gamma_11^1)^2 - Gamma_11^1 Gamma_12^2 + d_{x^1}(Gamma_11^1 - Gamma_12^2).
std::array<double, 2> canonical_bach_relations(const AffineSurface& s, const Point4& p);

struct NormalizeOptions {
  double width = 0.5;   // extent in z1
  double height = 0.5;  // extent in z2
  double step = 1.0 / 64.0;
  double nilpotency_tol = 1e-8;
};

/// Sampled coordinate change bringing a nilpotent T to d_{x^1} (x) dx^2.
///
/// The grid is indexed by (z1, z2), both centered on p0. `base` holds the
/// original coordinates of each node and `coords` the normalized ones.
struct NormalizationResult {
  int n1 = 0;
  int n2 = 0;
  std::vector<double> z1;
  std::vector<double> z2;
  std::vector<std::array<double, 2>> base;
  std::vector<std::array<double, 2>> coords;
  std::vector<double> f;
  std::vector<double> g;
  int column = 1;                   // 0-based column of T used to build the kernel field
  double residual = 0.0;            // max |pushforward(T) - d_{x^1} (x) dx^2|
  double nilpotency_residual = 0.0; // max ||T^2|| over the nodes
  double bracket_residual = 0.0;    // max |g - (-f dF/dz2)| over interior nodes

  std::size_t node(int i, int j) const { return static_cast<std::size_t>(i) * n2 + j; }
};

NormalizationResult normalize_nilpotent(const EndoField& t, const Point4& p0, const NormalizeOptions& opt = {});

/// Piecewise endomorphism alpha Id for x2 <= 0 and alpha d_{x^1} (x) dx^2 for
/// x2 >= 0, with alpha = alpha(x2).
EndoField piecewise_endo(const Expr& alpha);

/// Extension metric with the piecewise endomorphism; the surface must satisfy
/// the canonical Bach-flat relations at `checks`.
ExtensionMetric mixed_jordan_example(const Expr& alpha, const AffineSurface& s = {},
                                     const std::vector<Point4>& checks = {{0.3, -0.4, 0, 0}, {-0.2, 0.5, 0, 0},
                                                                          {0.7, 0.1, 0, 0}});

}  // namespace rext
