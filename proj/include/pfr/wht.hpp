#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>

namespace pfr {

/// In-place unnormalized Walsh-Hadamard transform. Applying it twice scales
/// by the length, which must be a power of two.
template <typename Derived>
void walsh_hadamard(Eigen::DenseBase<Derived>& v) {
  const Eigen::Index len = v.size();
  if (len == 0 || (len & (len - 1)) != 0) {
    throw std::invalid_argument("Walsh-Hadamard length must be a power of two");
  }
  for (Eigen::Index half = 1; half < len; half <<= 1) {
    for (Eigen::Index block = 0; block < len; block += half << 1) {
      for (Eigen::Index i = block; i < block + half; ++i) {
        const auto a = v(i);
        const auto b = v(i + half);
        v(i) = a + b;
        v(i + half) = a - b;
      }
    }
  }
}

}  // namespace pfr
