// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rext/jet.hpp"

namespace rext {

/// Dense tensor of jets over the 4 coordinates, all slots of the same
/// variance as documented by the producer. Components are stored row-major:
/// index (i0, ..., i_{r-1}) maps to sum i_k 4^(r-1-k).
class JetTensor {
 public:
  JetTensor() = default;
  JetTensor(int rank, int order);

  int rank() const { return rank_; }
  int order() const { return order_; }
  std::size_t size() const { return data_.size(); }

  template <class... I>
  Jet& operator()(I... idx) {
    return data_[offset(std::array<int, sizeof...(I)>{static_cast<int>(idx)...})];
  }
  template <class... I>
  const Jet& operator()(I... idx) const {
    return data_[offset(std::array<int, sizeof...(I)>{static_cast<int>(idx)...})];
  }
  Jet& flat(std::size_t n) { return data_[n]; }
  const Jet& flat(std::size_t n) const { return data_[n]; }

  /// Multi-index of flat position n.
  std::vector<int> unflatten(std::size_t n) const;
  std::size_t flatten(const std::vector<int>& idx) const;

  /// Largest |value| over all components.
  double max_abs_value() const;

 private:
  template <std::size_t N>
  std::size_t offset(const std::array<int, N>& idx) const {
    std::size_t o = 0;
    for (int v : idx) o = o * 4 + static_cast<std::size_t>(v);
    return o;
  }

  int rank_ = 0;
  int order_ = 0;
  std::vector<Jet> data_;
};

}  // namespace rext
