#pragma once

#include "harc/corpus/dataset.hpp"
#include "harc/corpus/text.hpp"
#include "harc/types.hpp"

#include <optional>
#include <vector>

namespace harc::corpus {

/// Fixed-length, masked sequence of a user's interacted items with the
/// ratings they gave. Slots run oldest to newest; padding sits at the tail
/// with item_id = pad id and rating_id = 0.
struct UserHistory {
  std::vector<i32> item_ids;
  std::vector<i32> rating_ids;  // 1..5, 0 at padding
  MaskVec mask;
  i32 length() const { return static_cast<i32>(item_ids.size()); }
};

/// The item-side mirror: users who rated the item, plus its encoded document.
struct ItemProfile {
  std::vector<i32> user_ids;
  std::vector<i32> rating_ids;
  MaskVec mask;
  ItemDocument document;
  i32 length() const { return static_cast<i32>(user_ids.size()); }
};

/// Per-entity interaction lists sorted by (ts, counterpart id) for repeated
/// history/profile construction. Pure lookups; safe to share across threads.
struct HistoryIndex {
  explicit HistoryIndex(const Dataset& train);

  std::vector<std::vector<Interaction>> by_user;  // sorted by (ts, item)
  std::vector<std::vector<Interaction>> by_item;  // sorted by (ts, user)
  i32 n_users = 0;
  i32 n_items = 0;
};

/// Most recent `h` training interactions of `user` (minus `exclude_item`),
/// newest last, padded to length h.
UserHistory build_user_history(const HistoryIndex& index, i32 user,
                               std::optional<i32> exclude_item, i32 h);
UserHistory build_user_history(const Dataset& train, i32 user,
                               std::optional<i32> exclude_item, i32 h);

ItemProfile build_item_profile(const HistoryIndex& index, i32 item,
                               std::optional<i32> exclude_user,
                               const std::vector<ItemDocument>& docs, i32 h);
ItemProfile build_item_profile(const Dataset& train, i32 item,
                               std::optional<i32> exclude_user,
                               const std::vector<ItemDocument>& docs, i32 h);

}  // namespace harc::corpus
