// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rext/field.hpp"
#include "rext/jet.hpp"
#include "rext/point.hpp"

namespace rext {

/// Rectangle in the base coordinates (x1, x2). Bounds may be infinite; a
/// strict lower bound excludes the edge itself.
struct BaseDomain {
  double x1_min = -std::numeric_limits<double>::infinity();
  double x1_max = std::numeric_limits<double>::infinity();
  double x2_min = -std::numeric_limits<double>::infinity();
  double x2_max = std::numeric_limits<double>::infinity();
  bool x1_min_strict = false;

  bool contains(const Point4& p) const;
};

/// Christoffel symbols Gamma_ij^k indexed [i][j][k] with 0-based indices.
using ChristoffelJets = std::array<std::array<std::array<Jet, 2>, 2>, 2>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Torsion-free connection on a surface given by its six Christoffel symbols
/// Gamma_11^1, Gamma_11^2, Gamma_12^1, Gamma_12^2, Gamma_22^1, Gamma_22^2.
class AffineSurface {
 public:
  enum class Kind { Explicit, TypeA, TypeB, Remark12 };

  AffineSurface();  // flat
  AffineSurface(std::array<ScalarField, 6> symbols, BaseDomain domain = {}, Kind kind = Kind::Explicit,
                std::string label = "explicit");

  /// Entry Gamma_ij^k, 0-based; (i, j) and (j, i) share storage.
  const ScalarField& symbol(int i, int j, int k) const;
  const BaseDomain& domain() const { return domain_; }
  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  /// Same connection in the chart with x1 and x2 exchanged.
  AffineSurface swapped() const;

 private:
  static int slot(int i, int j, int k);
  std::array<ScalarField, 6> symbols_;
  BaseDomain domain_;
  Kind kind_;
  std::string label_;
};

/// Constant symbols (G11_1, G11_2, G12_1, G12_2, G22_1, G22_2).
AffineSurface type_a_surface(const std::array<double, 6>& gamma);
/// Symbols C_ij^k / x1 on x1 > 0, same ordering as type_a_surface.
AffineSurface type_b_surface(const std::array<double, 6>& c);
/// Family satisfying the Bach-flat relations for the canonical nilpotent T:
/// Gamma_11^2 = 0, Gamma_11^1 = -d(phi)/dx1, Gamma_12^2 = Gamma_11^1 + c e^phi,
/// with Gamma_12^1, Gamma_22^1, Gamma_22^2 free. `c` must depend on x2 only.
AffineSurface remark12_surface(const Expr& phi, const Expr& c, const Expr& g12_1, const Expr& g22_1,
                               const Expr& g22_2);
AffineSurface explicit_surface(const std::array<Expr, 6>& gamma, BaseDomain domain = {});

/// Jets of every Gamma_ij^k at the base point of p (constant along fibers).
ChristoffelJets christoffel_at(const AffineSurface& s, const Point4& p, int order);

/// Curvature of the affine connection at a point. The curvature operator is
/// R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y] and
/// R(d_i, d_j) d_k = R_ijk^l d_l.
struct AffineCurvature {
  std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> r{};  // r[i][j][k][l]
  Matrix2 ricci{};                                                       // rho(d_j, d_k)
  Matrix2 ricci_sym{};
  Matrix2 ricci_anti{};
};

/// Ricci trace convention: rho(Y, Z) = kRicciSign * trace(X -> R(X,Y)Z).
/// Calibrated so that Gamma_12^1 = Gamma_12^2 = 1 gives -(dx1 - dx2)^2.
inline constexpr double kAffineRicciSign = 1.0;

AffineCurvature ricci_affine(const AffineSurface& s, const Point4& p);

struct FlatnessReport {
  bool flat = true;
  double max_curvature = 0.0;     // max over samples of ||R||_inf
  std::size_t worst_sample = 0;
};

/// Evidence that the connection is flat: ||R||_inf < tol at every sample.
FlatnessReport is_flat(const AffineSurface& s, std::span<const Point4> samples, double tol = 1e-10);

}  // namespace rext
