// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rext {

/// Number of independent variables carried by every jet: (x1, x2, y1, y2).
inline constexpr int kJetVars = 4;
/// Largest truncation order supported by the precomputed index tables.
inline constexpr int kMaxJetOrder = 6;
inline constexpr int kDefaultJetOrder = 4;

using MultiIndex = std::array<int, kJetVars>;

/// Number of multi-indices of total degree <= order, i.e. C(order + 4, 4).
std::size_t jet_size(int order);
/// Position of a multi-index in the graded coefficient layout.
std::size_t jet_index(const MultiIndex& mu);
/// Inverse of jet_index.
const MultiIndex& jet_multi_index(std::size_t index);

/// Truncated multivariate Taylor expansion of a smooth function about a point.
///
/// Coefficients follow the Taylor normalization f(p + h) = sum_mu c_mu h^mu,
/// so c_mu = (d^mu f)(p) / mu!. They are stored in graded order (all degree 0
/// terms, then degree 1, ...), which makes truncation to a lower order a
/// prefix operation. Binary operations between jets of different orders
/// produce a jet of the smaller order.
class Jet {
 public:
  Jet() : Jet(0) {}
  explicit Jet(int order, double value = 0.0);

  /// Jet of the coordinate function x_var expanded about `at`.
  static Jet variable(int order, int var, double at);
  static Jet constant(int order, double value) { return Jet(order, value); }

  int order() const noexcept { return order_; }
  double value() const noexcept { return c_[0]; }
  std::span<const double> coeffs() const noexcept { return c_; }
  std::span<double> coeffs() noexcept { return c_; }

  double coeff(const MultiIndex& mu) const;
  void set_coeff(const MultiIndex& mu, double v);
  /// Partial derivative of the expanded function at the expansion point.
  double derivative(const MultiIndex& mu) const;

  /// Copy truncated to a lower order.
  Jet truncated(int order) const;
  /// Exact partial derivative in variable `var`; the result has order - 1.
  Jet diff(int var) const;
  /// The nilpotent part (the jet minus its value).
  Jet shifted() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);
  Jet& operator/=(double s) { return *this *= 1.0 / s; }

  Jet operator-() const;

  double max_abs() const;

 private:
  int order_;
  std::vector<double> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);

/// Composes a univariate function with a jet, given the derivatives
/// f(a), f'(a), ..., f^(K)(a) at the value a of the jet.
Jet compose(const Jet& x, std::span<const double> derivatives);

Jet reciprocal(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet sqrt(const Jet& x);
/// Real power with a constant exponent; requires a positive value part.
Jet pow(const Jet& x, double exponent);
/// Integer power by repeated multiplication; valid for any value part.
Jet ipow(const Jet& x, int exponent);

using JetMatrix4 = std::array<std::array<Jet, 4>, 4>;

/// Gauss-Jordan inverse over jets with partial pivoting on the value part.
/// Throws Error(Singular) when the value part is not invertible.
JetMatrix4 inverse(const JetMatrix4& m);
JetMatrix4 multiply(const JetMatrix4& a, const JetMatrix4& b);
JetMatrix4 identity_matrix(int order);

}  // namespace rext
