#include "harc/train/batch.hpp"

#include "harc/error.hpp"

#include <algorithm>

namespace harc::train {

BatchStream::BatchStream(const corpus::Dataset& train, const corpus::HistoryIndex& index,
                         const std::vector<corpus::ItemDocument>& docs,
                         const model::ModelConfig& cfg, i32 batch_size,
                         i32 train_negatives, u64 seed, i64 epoch)
    : train_(train), index_(index), docs_(docs), cfg_(cfg), batch_size_(batch_size) {
  if (train.interactions.empty()) throw ValidationError("cannot batch an empty split");
  if (batch_size_ < 1 || batch_size_ > kMaxBatchSize)
    throw ValidationError("batch_size must be in [1, " + std::to_string(kMaxBatchSize) + "]");

  SplitMix64 rng(rng_combine(seed, rng_combine(fnv1a("epoch"), static_cast<u64>(epoch))));
  std::vector<std::size_t> order(train.interactions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  if (cfg.task == model::Task::rating) {
    rows_.reserve(order.size());
    for (std::size_t idx : order) {
      const auto& r = train.interactions[idx];
      rows_.push_back({r.user, r.item, static_cast<float>(r.rating), true});
    }
  } else {
    // Positives interleaved with uniform negatives drawn from the items the
    // user has no training interaction with.
    if (train_negatives < 0) throw ValidationError("train_negatives must be >= 0");
    std::vector<std::vector<i32>> interacted(static_cast<std::size_t>(train.n_users));
    for (const auto& r : train.interactions)
      interacted[static_cast<std::size_t>(r.user)].push_back(r.item);
    for (auto& v : interacted) std::sort(v.begin(), v.end());

    rows_.reserve(order.size() * static_cast<std::size_t>(1 + train_negatives));
    for (std::size_t idx : order) {
      const auto& r = train.interactions[idx];
      rows_.push_back({r.user, r.item, 1.0f, true});
      const auto& mine = interacted[static_cast<std::size_t>(r.user)];
      i32 drawn = 0;
      while (drawn < train_negatives) {
        const i32 cand = static_cast<i32>(rng.bounded(static_cast<u64>(train.n_items)));
        if (std::binary_search(mine.begin(), mine.end(), cand)) continue;
        rows_.push_back({r.user, cand, 0.0f, false});
        ++drawn;
      }
    }
  }
}

std::optional<Batch> BatchStream::next() {
  if (cursor_ >= rows_.size()) return std::nullopt;
  const std::size_t count =
      std::min(static_cast<std::size_t>(batch_size_), rows_.size() - cursor_);
  Batch b;
  b.histories.reserve(count);
  b.profiles.reserve(count);
  b.targets.resize(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const Row& row = rows_[cursor_ + i];
    std::optional<i32> ex_item, ex_user;
    if (row.exclude_target) {
      ex_item = row.item;
      ex_user = row.user;
    }
    b.histories.push_back(
        corpus::build_user_history(index_, row.user, ex_item, cfg_.history_len));
    b.profiles.push_back(
        corpus::build_item_profile(index_, row.item, ex_user, docs_, cfg_.history_len));
    b.targets(static_cast<Eigen::Index>(i)) = row.target;
    b.users.push_back(row.user);
    b.items.push_back(row.item);
  }
  cursor_ += count;
  return b;
}

std::vector<Batch> make_batches(const corpus::Dataset& train,
                                const corpus::HistoryIndex& index,
                                const std::vector<corpus::ItemDocument>& docs,
                                const model::ModelConfig& cfg, i32 batch_size,
                                i32 train_negatives, u64 seed, i64 epoch) {
  BatchStream stream(train, index, docs, cfg, batch_size, train_negatives, seed, epoch);
  std::vector<Batch> out;
  while (auto b = stream.next()) out.push_back(std::move(*b));
  return out;
}

}  // namespace harc::train
