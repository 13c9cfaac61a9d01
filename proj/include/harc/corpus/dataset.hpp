#pragma once

#include "harc/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace harc::corpus {

/// One (user, item, rating, timestamp) record; an entry of the rating matrix.
struct Interaction {
  i32 user = 0;
  i32 item = 0;
  i32 rating = 0;  // 1..5
  i64 ts = 0;      // seconds
};

/// A set of interactions over dense 0-based user/item indices.
///
/// After ingestion (parse/filter) every dense index appears in at least one
/// interaction and (user, item) pairs are unique (latest timestamp wins).
/// Split outputs reuse the parent's index space and id maps; their subsets
/// need not cover every index.
struct Dataset {
  std::vector<Interaction> interactions;  // sorted by (user, ts, item)
  i32 n_users = 0;
  i32 n_items = 0;
  std::vector<std::string> user_raw_ids;  // dense index -> raw id
  std::vector<std::string> item_raw_ids;

  std::unordered_map<std::string, i32> user_index() const;
  std::unordered_map<std::string, i32> item_index() const;

  /// Reserved padding rows: one extra embedding-table row past the real ids.
  i32 pad_user() const { return n_users; }
  i32 pad_item() const { return n_items; }
};

enum class RatingsFormat { movielens_dat, csv };

/// Reads a ratings file into a Dataset with dense remapped indices.
/// movielens_dat lines are "user::item::rating::timestamp"; csv files carry a
/// header row and comma-separated fields in the same order. Dense indices are
/// assigned in order of first appearance. Duplicate (user, item) pairs keep
/// the latest timestamp (ties: the later line).
Dataset parse_ratings(const std::string& path, RatingsFormat format);

/// Drops items without documents, then users with fewer than
/// `min_user_ratings` interactions, iterating until stable, and re-densifies
/// the index space. `item_has_doc[i]` is indexed by the input's dense item id.
Dataset filter_dataset(const Dataset& ds, i32 min_user_ratings,
                       const std::vector<u8>& item_has_doc);

struct RatingSplit {
  Dataset train, valid, test;
};

/// Random per-interaction assignment into train/valid/test under `seed`,
/// followed by a repair pass that moves the earliest interaction of any
/// train-uncovered user or item into train. The three outputs partition the
/// input.
RatingSplit split_rating_task(const Dataset& ds, std::array<double, 3> fractions,
                              u64 seed);

/// One leave-one-out ranking case: the held-out positive plus sampled
/// negatives the user never interacted with.
struct LeaveOneOutCase {
  i32 user = 0;
  i32 positive = 0;
  std::vector<i32> negatives;
};

struct LeaveOneOutSplit {
  Dataset train;
  std::vector<LeaveOneOutCase> test_cases;
  /// Second-latest holdout per user, negatives from an independent stream.
  /// Used as the early-stopping signal for ranking-task training.
  std::vector<LeaveOneOutCase> val_cases;
};

LeaveOneOutSplit split_leave_one_out(const Dataset& ds, i32 n_negatives, u64 seed,
                                     bool with_validation_cases = true);

}  // namespace harc::corpus
