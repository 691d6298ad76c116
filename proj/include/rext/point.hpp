// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

namespace rext {

/// A point of the cotangent bundle in the global coordinate order
/// (x1, x2, y1, y2); downstream index 0..3 follows this order.
struct Point4 {
  double x1 = 0.0;
  double x2 = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;

  double operator[](int i) const {
    switch (i) {
      case 0: return x1;
      case 1: return x2;
      case 2: return y1;
      default: return y2;
    }
  }
  std::array<double, 4> as_array() const { return {x1, x2, y1, y2}; }
  bool finite() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(y1) && std::isfinite(y2);
  }
};

}  // namespace rext
