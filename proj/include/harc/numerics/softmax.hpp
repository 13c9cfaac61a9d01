#pragma once

#include "harc/error.hpp"
#include "harc/types.hpp"

#include <cmath>

namespace harc::numerics {

/// Softmax over the unmasked slots, stabilized by max subtraction; masked
/// slots get probability exactly 0. An all-masked input returns all zeros
/// (callers substitute a zero context vector).
template <class S>
Vec<S> masked_softmax(const Vec<S>& logits, const MaskVec& mask) {
  if (static_cast<std::size_t>(logits.size()) != mask.size())
    throw ValidationError("masked_softmax: logits/mask length mismatch");
  const Eigen::Index n = logits.size();
  Vec<S> out = Vec<S>::Zero(n);

  S max_logit = std::numeric_limits<S>::lowest();
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mask[static_cast<std::size_t>(i)]) {
      any = true;
      max_logit = std::max(max_logit, logits(i));
    }
  }
  if (!any) return out;

  S denom = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mask[static_cast<std::size_t>(i)]) {
      out(i) = std::exp(logits(i) - max_logit);
      denom += out(i);
    }
  }
  out /= denom;
  return out;
}

}  // namespace harc::numerics
