#pragma once

#include "harc/numerics/store.hpp"
#include "harc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace harc::numerics {

struct GradCheckResult {
  double max_rel_err = 0.0;
  i64 coords_checked = 0;
};

/// Central-difference check of analytic gradients on a random sample of
/// parameter coordinates (without replacement while the sample fits, with
/// replacement otherwise). `grad_fn` must populate store gradients for the
/// same loss that `loss_fn` evaluates. Run in double precision.
inline GradCheckResult gradient_check(ParameterStore<double>& store,
                                      const std::function<double()>& loss_fn,
                                      const std::function<void()>& grad_fn,
                                      i64 n_coords = 200, double eps = 1e-4,
                                      u64 seed = 0) {
  store.zero_grads();
  grad_fn();

  struct Entry {
    Param<double>* param;
    Eigen::Index offset;
  };
  std::vector<Entry> coords;
  const i64 total = store.coord_count();
  SplitMix64 rng(rng_combine(seed, fnv1a("gradient_check")));
  if (total <= n_coords) {
    for (auto& [name, p] : store)
      for (Eigen::Index k = 0; k < p.value.size(); ++k) coords.push_back({&p, k});
  } else {
    std::vector<i64> picks(static_cast<std::size_t>(total));
    for (i64 i = 0; i < total; ++i) picks[static_cast<std::size_t>(i)] = i;
    picks = rng.sample_without_replacement(std::move(picks),
                                           static_cast<std::size_t>(n_coords));
    std::sort(picks.begin(), picks.end());
    std::size_t next = 0;
    i64 base = 0;
    for (auto& [name, p] : store) {
      while (next < picks.size() && picks[next] < base + p.value.size()) {
        coords.push_back({&p, static_cast<Eigen::Index>(picks[next] - base)});
        ++next;
      }
      base += p.value.size();
    }
  }

  GradCheckResult result;
  for (const auto& e : coords) {
    double& slot = e.param->value.coord(e.offset);
    const double saved = slot;
    slot = saved + eps;
    const double lp = loss_fn();
    slot = saved - eps;
    const double lm = loss_fn();
    slot = saved;
    const double numeric = (lp - lm) / (2.0 * eps);
    const double analytic = e.param->grad.coord(e.offset);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    result.max_rel_err = std::max(result.max_rel_err, std::abs(analytic - numeric) / denom);
    ++result.coords_checked;
  }
  return result;
}

}  // namespace harc::numerics
