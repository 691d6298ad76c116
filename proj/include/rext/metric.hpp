// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

#include "rext/field.hpp"
#include "rext/jet.hpp"
#include "rext/point.hpp"

namespace rext {

/// A pseudo-Riemannian metric on a chart of R^4, evaluated as a symmetric
/// 4x4 matrix of jets in the coordinates (x1, x2, y1, y2).
class MetricField {
 public:
  using Evaluator = std::function<JetMatrix4(const Point4&, int order)>;

  MetricField(Evaluator f, std::string label) : eval_(std::move(f)), label_(std::move(label)) {}

  JetMatrix4 operator()(const Point4& p, int order) const { return eval_(p, order); }
  const std::string& label() const { return label_; }

 private:
  Evaluator eval_;
  std::string label_;
};

/// The metric phi^power * g.
MetricField conformal_rescale(const MetricField& g, const ScalarField& phi, double power);

/// Values of the metric matrix at p.
std::array<std::array<double, 4>, 4> metric_values(const MetricField& g, const Point4& p);

/// Signature (positive, negative) from the eigenvalues of the value matrix;
/// eigenvalues with |lambda| < tol count as neither.
std::pair<int, int> signature(const std::array<std::array<double, 4>, 4>& g, double tol = 1e-12);

double determinant(const std::array<std::array<double, 4>, 4>& g);

}  // namespace rext
