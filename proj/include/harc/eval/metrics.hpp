#pragma once

#include "harc/types.hpp"

#include <vector>

namespace harc::eval {

/// One scored leave-one-out case. candidates[0] is the held-out positive;
/// rank_of_positive is its 1-based position after sorting by (score desc,
/// candidate id asc).
struct RankedCase {
  i32 user = 0;
  std::vector<i32> candidates;
  std::vector<double> scores;
  i32 rank_of_positive = 0;
};

/// Fills rank_of_positive from candidates/scores (ties by id ascending).
void rank_case(RankedCase& c);

double rmse(const std::vector<double>& preds, const std::vector<double>& truths);

/// Fraction of cases whose positive ranks within the top k.
double hit_ratio_at_k(const std::vector<RankedCase>& cases, int k);

/// Mean of 1/log2(rank+1) for ranks within the top k, 0 past the cutoff
/// (binary relevance with a single relevant item, so the normalizer is 1).
double ndcg_at_k(const std::vector<RankedCase>& cases, int k);

}  // namespace harc::eval
