// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rext/bachflat.hpp"

namespace rext {

/// x1 in [0, L] with n1 steps (n1 + 1 nodes); x2 periodic on [0, 2 pi) with n2 nodes.
struct StripGrid {
  double length = 1.0;
  int n1 = 128;
  int n2 = 64;

  double h1() const { return length / n1; }
  double h2() const;
  double x1(int i) const { return i * h1(); }
  double x2(int j) const { return j * h2(); }
  int nodes() const { return (n1 + 1) * n2; }
  int index(int i, int j) const;  // j wraps periodically
  /// Throws InvalidArgument unless n1 >= 4, n2 >= 8 is even and length > 0.
  void validate() const;
  /// Both spacings halved.
  StripGrid refined() const { return {length, 2 * n1, 2 * n2}; }
};

enum class Stepper { RK2, RK4 };
const char* to_string(Stepper s);

struct MarchOptions {
  Stepper stepper = Stepper::RK4;
  double cfl = 0.5;          // bound on |xi| h1 / h2
  double cap = 1e6;          // blow-up threshold on |xi|, |alpha|, |alpha_x1|
  double alpha_floor = 1e-6;  // the alpha march divides by alpha
};

/// Cauchy data on x1 = 0, all functions of x2.
struct CauchyData {
  Expr xi0;
  Expr alpha0;
  Expr alpha1;
};

/// Node values, row-major in (i, j). `alpha` and `alpha_x1` are empty until
/// the second equation has been solved.
struct FieldOnGrid {
  StripGrid grid;
  std::vector<double> xi;
  std::vector<double> alpha;
  std::vector<double> alpha_x1;
  CauchyData data;
  Stepper stepper = Stepper::RK4;

  bool has_alpha() const { return !alpha.empty(); }
};

/// Method of lines for P1(xi) = 0 read as xi^(1,0) = xi xi^(0,1) + f(xi, Gamma):
/// fourth-order periodic central differences in x2, marching in x1.
FieldOnGrid solve_p1(const AffineSurface& s, const Expr& xi0, const StripGrid& grid, const MarchOptions& opt = {});

/// Marches P2(xi, alpha) = 0 for the state (alpha, alpha^(1,0)), with
/// alpha^(2,0) = -(P2 with alpha^(2,0) set to zero) / alpha. The first equation
/// is marched alongside so that xi is available at every intermediate stage;
/// the result must agree with `xi`.
FieldOnGrid solve_p2(const AffineSurface& s, const FieldOnGrid& xi, const Expr& alpha0, const Expr& alpha1,
                     const MarchOptions& opt = {});

/// Fills a grid from closed-form fields (for checks against known solutions).
FieldOnGrid sample_fields(const StripGrid& grid, const Expr& xi, const Expr& alpha);

/// max over interior nodes of |P1| and |P2| with every derivative replaced by
/// a fourth-order central difference.
struct ResidualReport {
  double p1 = 0.0;
  double p2 = 0.0;  // zero when alpha is absent
};
ResidualReport grid_residuals(const AffineSurface& s, const FieldOnGrid& f);

/// Degree-4 least-squares fit of a grid field on the 5 x 5 stencil centred at
/// node (i, j); returns a base-only field whose jets are those of the fit.
ScalarField local_fit(const FieldOnGrid& f, const std::vector<double>& values, int i, int j);

struct BachGridReport {
  double max_bach = 0.0;
  Point4 worst{};
  int evaluations = 0;
};

/// Bach tensor of the structure built from local fits of xi and alpha at the
/// interior nodes nearest to each probe (x1, x2), over every fiber sample.
BachGridReport verify_bach_on_grid(const AffineSurface& s, const FieldOnGrid& f, const DeformationField& phi,
                                   std::span<const std::array<double, 2>> probes,
                                   std::span<const std::array<double, 2>> fibers);
/// Probes at x1 in {1/4, 1/2, 3/4} L and x2 in {0, pi/2, pi, 3 pi/2}, two fiber samples.
BachGridReport verify_bach_on_grid(const AffineSurface& s, const FieldOnGrid& f, const DeformationField& phi = {});

struct ConvergenceLevel {
  StripGrid grid;
  ResidualReport residual;
  double bach = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  std::vector<double> bach_ratios;      // bach[k] / bach[k + 1]
  std::vector<double> residual_ratios;  // max(p1, p2) ratios
};

/// Solves on `levels` successively refined grids and reports the Bach and residual decay.
ConvergenceReport bach_convergence(const AffineSurface& s, const CauchyData& data, const StripGrid& coarse,
                                   int levels = 2, const DeformationField& phi = {}, const MarchOptions& opt = {});

/// Sup difference of the two-stage and four-stage solutions on a grid and its refinement.
struct UniquenessReport {
  std::array<double, 2> xi_diff{};
  std::array<double, 2> alpha_diff{};
  double xi_ratio = 0.0;
  double alpha_ratio = 0.0;
};
UniquenessReport stepper_agreement(const AffineSurface& s, const CauchyData& data, const StripGrid& grid);

}  // namespace rext
