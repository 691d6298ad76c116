// SPDX-License-Identifier: Apache-2.0
#include "rext/metric.hpp"

#include <cmath>
#include <utility>

#include "rext/error.hpp"

namespace rext {

MetricField conformal_rescale(const MetricField& g, const ScalarField& phi, double power) {
  const bool integral = power == std::round(power) && std::abs(power) <= 64;
  return MetricField(
      [g, phi, power, integral](const Point4& p, int order) {
        JetMatrix4 m = g(p, order);
        const Jet f = phi.jet(p, order);
        Jet s;
        if (integral)
          s = ipow(f, static_cast<int>(power));
        else
          s = pow(f, power);
        for (auto& row : m)
          for (auto& e : row) e = e * s;
        return m;
      },
      "(" + phi.description() + ")^" + std::to_string(power) + " * " + g.label());
}

std::array<std::array<double, 4>, 4> metric_values(const MetricField& g, const Point4& p) {
  const JetMatrix4 m = g(p, 0);
  std::array<std::array<double, 4>, 4> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = m[i][j].value();
  return out;
}

double determinant(const std::array<std::array<double, 4>, 4>& g) {
  auto a = g;
  double det = 1.0;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

std::pair<int, int> signature(const std::array<std::array<double, 4>, 4>& g, double tol) {
  // Cyclic Jacobi on a symmetric 4x4 matrix.
  auto a = g;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  int pos = 0;
  int neg = 0;
  for (int i = 0; i < 4; ++i) {
    if (a[i][i] > tol) ++pos;
    if (a[i][i] < -tol) ++neg;
  }
  return {pos, neg};
}

}  // namespace rext
