// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "rext/curvature.hpp"
#include "rext/extension.hpp"

namespace rext {

/// Full contractions tau = g^ij rho_ij, |rho|^2 = rho^ij rho_ij and
/// |R|^2 = R^ijkl R_ijkl.
struct QuadraticInvariants {
  double tau = 0.0;
  double norm_rho2 = 0.0;
  double norm_r2 = 0.0;

  /// a tau^2 + b |R|^2 + c |rho|^2
  double kappa(double a, double b, double c) const { return a * tau * tau + b * norm_r2 + c * norm_rho2; }
};

QuadraticInvariants quadratic_invariants(const CurvaturePack& pack);

/// Closed forms of the quadratic invariants for a constant T with eigenvalues
/// l1, l2 over a flat surface. The polynomials are symmetric, so conjugate
/// pairs give real values.
QuadraticInvariants eigen_invariants(std::complex<double> l1, std::complex<double> l2);

struct DerivativeInvariants {
  double norm_dr2 = 0.0;  // R^{ijkl;n} R_ijkl;n
  double norm_dw2 = 0.0;  // W^{ijkl;n} W_ijkl;n
  double cubic = 0.0;     // R_ij^kl R_kl^mn R_mn^ij
};

/// Needs a pack built with riemann_derivative and weyl_derivatives.
DerivativeInvariants derivative_level_invariants(const CurvaturePack& pack);
DerivativeInvariants derivative_level_invariants(const MetricField& g, const Point4& p, int order = 4);

/// The two single quadratic classifiers for nilpotency.
inline double classifier_primary(const QuadraticInvariants& q) { return 4.0 * q.norm_rho2 - 3.0 * q.tau * q.tau; }
inline double classifier_secondary(const QuadraticInvariants& q) {
  return q.norm_r2 - 88.0 / 5.0 * q.norm_rho2 + 56.0 / 5.0 * q.tau * q.tau;
}

enum class VsiVerdict { VsiEvidence, NotVsi };
const char* to_string(VsiVerdict v);

struct VsiReport {
  VsiVerdict verdict = VsiVerdict::VsiEvidence;
  QuadraticInvariants quadratic;
  std::optional<DerivativeInvariants> derivative;
  double classifier = 0.0;           // 4|rho|^2 - 3 tau^2
  double classifier_secondary = 0.0;
  bool nilpotent_by_classifier = true;
  bool nilpotent_by_eigenvalues = true;
  bool consistent = true;            // the two nilpotency readings agree
  std::string witness;               // first non-vanishing invariant when NotVsi
  double witness_value = 0.0;
};

/// Evaluates the quadratic and derivative-level invariants at p and
/// cross-checks the classifier against the eigenvalues of T(p).
VsiReport vsi_classify(const ExtensionMetric& m, const Point4& p, double tol = 1e-9, bool derivative_level = true);

/// Classifier verdict from eigenvalues alone, using the closed forms.
VsiReport vsi_classify(std::complex<double> l1, std::complex<double> l2, double tol = 1e-9);

/// Sweep of a classifier over eigenvalue data: real pairs on an n x n grid in
/// [-1, 1]^2 and conjugate pairs r e^{+-i theta} on an n x n (r, theta) grid.
/// The classifier is expected to vanish exactly at l1 = l2 = 0.
struct ClassifierSweep {
  bool ok = true;
  int samples = 0;
  int false_zeros = 0;          // non-nilpotent samples where |value| < tol
  int false_nonzeros = 0;       // nilpotent samples where |value| >= tol
  double min_nonzero = 0.0;     // min |value| / max(|l|)^4 over non-nilpotent samples
  std::complex<double> witness_l1;
  std::complex<double> witness_l2;
  double witness_value = 0.0;
};

ClassifierSweep sweep_classifier(double a, double b, double c, int n = 50, double tol = 1e-9);

/// Reasons an invariant of the Walker structure is undefined.
enum class WalkerFlag { Ok, DegenerateRhoH, ZeroOmega };
const char* to_string(WalkerFlag f);

/// Invariants of the parallel null distribution span{d_y1, d_y2} for
/// T = d_{x^1} (x) dx^2 or its mirror d_{x^2} (x) dx^1. For the mirror every
/// index is read through the exchange 1 <-> 2, 3 <-> 4.
struct WalkerInvariants {
  bool mirrored = false;
  Matrix2 rho_h{};                 // rho restricted to the horizontal coordinates
  double omega_h = 0.0;            // Omega(d_1, d_2) = R_121^1 + R_122^2
  std::optional<std::array<double, 2>> omega_form;  // omega_1, omega_2
  std::optional<double> beta1;
  std::optional<double> beta2;
  WalkerFlag beta1_flag = WalkerFlag::Ok;
  WalkerFlag beta2_flag = WalkerFlag::Ok;
};

WalkerInvariants walker_invariants(const ExtensionMetric& m, const Point4& p, double tol = 1e-12);

/// Residuals of the block structure of the curvature for the canonical T.
struct WalkerBlocksReport {
  double vertical_to_horizontal = 0.0;  // max |R_ab i^j|, i vertical, j horizontal
  double trace_pairing = 0.0;           // max over the four relations R_ab1^1 + R_ab3^3 = 0, ...
  double horizontal_zero = 0.0;         // max |R_ij k^l|, k and l horizontal, i < j, (i,j) not (1,2),(2,3)
  double r23_block = 0.0;               // R_23k^l block minus [[0,1],[0,0]]
  double r12_block = 0.0;               // R_12k^l block minus the affine curvature formula
  double trace_two_form = 0.0;          // trace of the horizontal block plus 2 rho_a
  double ricci_vertical = 0.0;          // max |rho_ij| with i or j vertical
  double ricci_block = 0.0;             // rho block minus 2 rho_s plus the fiber correction
  double nabla_trace = 0.0;             // max |R_ij1^1;k + R_ij2^2;k| with some index vertical

  double max() const;
};

WalkerBlocksReport walker_blocks(const ExtensionMetric& m, const Point4& p);

/// Finite-difference exterior derivative of the 1-form omega over the base
/// at fixed fiber coordinates: d_1 omega_2 - d_2 omega_1, with second-order
/// central differences of step h.
double walker_domega(const ExtensionMetric& m, const Point4& p, double h);

}  // namespace rext
