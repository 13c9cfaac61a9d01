#pragma once

#include "harc/io/tables.hpp"
#include "harc/model/config.hpp"
#include "harc/numerics/store.hpp"
#include "harc/types.hpp"

#include <string>
#include <vector>

namespace harc::train {

struct TrainOptions {
  int max_epochs = 100;
  int patience = 10;  // <= 0 disables early stopping
  double lr = 0.001;
  i32 batch_size = 256;
  i32 train_negatives = 4;
  u64 seed = 1;
  std::string out_dir;           // empty: keep everything in memory
  bool eval_train_rmse = false;  // also track exact train-split RMSE per epoch
  bool quiet = false;
};

struct EpochRecord {
  int epoch = 0;         // 1-based
  double train_loss = 0.0;  // mean batch loss
  double val_metric = 0.0;  // RMSE (rating) or HR@k (ranking)
  double seconds = 0.0;
  double train_rmse = -1.0;  // only when eval_train_rmse
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based index into epochs
  std::string checkpoint_path;
};

/// Mini-batch Adam training with per-epoch validation (RMSE on the validation
/// split, or HR@10 on the held-out validation cases for ranking). Stops when
/// the metric fails to improve for `patience` epochs; the best epoch's
/// parameters are the result. When out_dir is set, writes checkpoint.harc,
/// metrics.tsv (epoch, train_loss, val_metric, seconds) and train.log there.
TrainReport train(const model::ModelConfig& cfg, const io::PreparedData& data,
                  const TrainOptions& opts,
                  numerics::ParameterStore<float>* out_store = nullptr);

}  // namespace harc::train
