// SPDX-License-Identifier: Apache-2.0
#include "rext/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace rext {

JetTensor::JetTensor(int rank, int order) : rank_(rank), order_(order) {
  std::size_t n = 1;
  for (int k = 0; k < rank; ++k) n *= 4;
  data_.assign(n, Jet(order));
}

std::vector<int> JetTensor::unflatten(std::size_t n) const {
  std::vector<int> idx(rank_);
  for (int k = rank_ - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(n % 4);
    n /= 4;
  }
  return idx;
}

std::size_t JetTensor::flatten(const std::vector<int>& idx) const {
  std::size_t o = 0;
  for (int v : idx) o = o * 4 + static_cast<std::size_t>(v);
  return o;
}

double JetTensor::max_abs_value() const {
  double m = 0.0;
  for (const Jet& j : data_) m = std::max(m, std::abs(j.value()));
  return m;
}

}  // namespace rext
