#pragma once

#include "harc/corpus/histories.hpp"
#include "harc/eval/metrics.hpp"
#include "harc/io/tables.hpp"
#include "harc/model/config.hpp"
#include "harc/numerics/store.hpp"

#include <functional>
#include <string>
#include <vector>

namespace harc::eval {

using Scorer = std::function<double(i32 user, i32 item)>;

/// Scores every case's candidates, ranks them (ties by candidate id), and
/// reports HR@k and NDCG@k plus the per-case detail.
struct RankingReport {
  double hr = 0.0;
  double ndcg = 0.0;
  std::vector<RankedCase> cases;
};

RankingReport rank_cases(const std::vector<corpus::LeaveOneOutCase>& cases,
                         const Scorer& scorer, int k);

/// Frozen-model scorer over prepared training data. User and item latents are
/// precomputed once (histories/profiles from the training split), so a case's
/// 100 candidates cost 100 MLP passes.
class ModelScorer {
 public:
  ModelScorer(const numerics::ParameterStore<float>& store, const model::ModelConfig& cfg,
              const io::PreparedData& data);

  double operator()(i32 user, i32 item) const;
  const VecF& user_latent(i32 user) const;
  const VecF& item_latent(i32 item) const;

 private:
  const numerics::ParameterStore<float>& store_;
  const model::ModelConfig& cfg_;
  std::vector<VecF> user_latents_;
  std::vector<VecF> item_latents_;
};

/// Training-frequency scorer (the POP baseline); ties by item id.
Scorer popularity_baseline(const corpus::Dataset& train);

/// Clamped-prediction RMSE of the model on `split` (histories/profiles built
/// from the prepared training split).
double evaluate_rating(const numerics::ParameterStore<float>& store,
                       const model::ModelConfig& cfg, const io::PreparedData& data,
                       const corpus::Dataset& split);

/// Tab-separated per-case dump: user, positive, rank, then the top-k
/// "candidate:score" pairs. Ids are raw ids when maps are given.
void write_case_dump(const std::string& path, const RankingReport& report, int k,
                     const std::vector<std::string>* user_raw,
                     const std::vector<std::string>* item_raw);

}  // namespace harc::eval
