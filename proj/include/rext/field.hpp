// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>

#include "rext/expr.hpp"
#include "rext/jet.hpp"
#include "rext/point.hpp"

namespace rext {

/// A smooth scalar function on (a chart of) the cotangent bundle, evaluated
/// as a jet. Fields are immutable and cheap to copy.
class ScalarField {
 public:
  using Evaluator = std::function<Jet(const Point4&, int order)>;

  ScalarField();  // identically zero
  ScalarField(Expr e);  // NOLINT(google-explicit-constructor)
  ScalarField(double c);  // NOLINT(google-explicit-constructor)
  ScalarField(Evaluator f, std::string description, bool zero = false, bool base_only = false);

  Jet jet(const Point4& p, int order) const { return eval_(p, order); }
  double value(const Point4& p) const { return eval_(p, 0).value(); }

  const std::string& description() const { return description_; }
  /// True when the field is known to vanish identically (lets callers skip work).
  bool is_zero() const { return zero_; }
  /// True when the field is known not to depend on the fiber coordinates.
  bool base_only() const { return base_only_; }

  /// Polynomial field given by Taylor coefficients about `center`
  /// (coefficient layout of `Jet`), re-expanded exactly at other points.
  static ScalarField taylor_polynomial(const Point4& center, Jet coefficients, std::string description);

 private:
  Evaluator eval_;
  std::string description_;
  bool zero_ = false;
  bool base_only_ = true;
};

}  // namespace rext
