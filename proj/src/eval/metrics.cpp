#include "harc/eval/metrics.hpp"

#include "harc/error.hpp"

#include <cmath>

namespace harc::eval {

void rank_case(RankedCase& c) {
  if (c.candidates.empty() || c.candidates.size() != c.scores.size())
    throw ValidationError("rank_case: empty or mismatched candidates/scores");
  const double pos_score = c.scores[0];
  const i32 pos_id = c.candidates[0];
  i32 ahead = 0;
  for (std::size_t i = 1; i < c.candidates.size(); ++i) {
    if (c.scores[i] > pos_score ||
        (c.scores[i] == pos_score && c.candidates[i] < pos_id))
      ++ahead;
  }
  c.rank_of_positive = ahead + 1;
}

double rmse(const std::vector<double>& preds, const std::vector<double>& truths) {
  if (preds.empty() || preds.size() != truths.size())
    throw ValidationError("rmse: empty or mismatched inputs");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - truths[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(preds.size()));
}

double hit_ratio_at_k(const std::vector<RankedCase>& cases, int k) {
  if (cases.empty()) throw ValidationError("hit_ratio_at_k: no cases");
  i64 hits = 0;
  for (const auto& c : cases) hits += (c.rank_of_positive <= k);
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

double ndcg_at_k(const std::vector<RankedCase>& cases, int k) {
  if (cases.empty()) throw ValidationError("ndcg_at_k: no cases");
  double sum = 0.0;
  for (const auto& c : cases) {
    if (c.rank_of_positive <= k)
      sum += 1.0 / std::log2(static_cast<double>(c.rank_of_positive) + 1.0);
  }
  return sum / static_cast<double>(cases.size());
}

}  // namespace harc::eval
