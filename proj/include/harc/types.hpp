#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace harc {

using i32 = std::int32_t;
using i64 = std::int64_t;
using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatF = Mat<float>;
using MatD = Mat<double>;
using VecF = Vec<float>;
using VecD = Vec<double>;

/// 0/1 indicators for the real (non-padded) slots of a fixed-length sequence.
using MaskVec = std::vector<u8>;

inline i32 count_unmasked(const MaskVec& mask) {
  i32 n = 0;
  for (u8 m : mask) n += (m != 0);
  return n;
}

}  // namespace harc
