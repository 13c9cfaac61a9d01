#pragma once

#include "harc/corpus/dataset.hpp"
#include "harc/corpus/histories.hpp"
#include "harc/model/config.hpp"
#include "harc/rng.hpp"
#include "harc/types.hpp"

#include <optional>
#include <vector>

namespace harc::train {

/// One mini-batch: per-row user history, item profile (with document), and
/// target. Histories/profiles are built excluding the row's own target
/// interaction so the label never leaks into its inputs.
struct Batch {
  std::vector<corpus::UserHistory> histories;
  std::vector<corpus::ItemProfile> profiles;
  VecF targets;  // ratings for the rating task, 0/1 labels for ranking
  std::vector<i32> users, items;
  i32 size() const { return static_cast<i32>(histories.size()); }
};

constexpr i32 kMaxBatchSize = 256;

/// Deterministic batch sequence for one epoch: interactions are reshuffled by
/// a stream seeded with (seed, epoch); the ranking task additionally emits
/// `train_negatives` sampled non-interacted items after each positive. The
/// last partial batch is kept. Batches are materialized on demand.
class BatchStream {
 public:
  BatchStream(const corpus::Dataset& train, const corpus::HistoryIndex& index,
              const std::vector<corpus::ItemDocument>& docs, const model::ModelConfig& cfg,
              i32 batch_size, i32 train_negatives, u64 seed, i64 epoch);

  std::optional<Batch> next();
  i64 total_rows() const { return static_cast<i64>(rows_.size()); }

 private:
  struct Row {
    i32 user;
    i32 item;
    float target;
    bool exclude_target;  // true for real interactions (leakage guard)
  };

  const corpus::Dataset& train_;
  const corpus::HistoryIndex& index_;
  const std::vector<corpus::ItemDocument>& docs_;
  const model::ModelConfig& cfg_;
  i32 batch_size_;
  std::vector<Row> rows_;
  std::size_t cursor_ = 0;
};

/// Drains a whole epoch eagerly; test/diagnostic convenience.
std::vector<Batch> make_batches(const corpus::Dataset& train,
                                const corpus::HistoryIndex& index,
                                const std::vector<corpus::ItemDocument>& docs,
                                const model::ModelConfig& cfg, i32 batch_size,
                                i32 train_negatives, u64 seed, i64 epoch);

}  // namespace harc::train
