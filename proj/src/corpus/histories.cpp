#include "harc/corpus/histories.hpp"

#include "harc/error.hpp"

#include <algorithm>

namespace harc::corpus {

HistoryIndex::HistoryIndex(const Dataset& train)
    : by_user(static_cast<std::size_t>(train.n_users)),
      by_item(static_cast<std::size_t>(train.n_items)),
      n_users(train.n_users),
      n_items(train.n_items) {
  for (const auto& r : train.interactions) {
    by_user[static_cast<std::size_t>(r.user)].push_back(r);
    by_item[static_cast<std::size_t>(r.item)].push_back(r);
  }
  for (auto& v : by_user)
    std::sort(v.begin(), v.end(), [](const Interaction& a, const Interaction& b) {
      return a.ts != b.ts ? a.ts < b.ts : a.item < b.item;
    });
  for (auto& v : by_item)
    std::sort(v.begin(), v.end(), [](const Interaction& a, const Interaction& b) {
      return a.ts != b.ts ? a.ts < b.ts : a.user < b.user;
    });
}

namespace {

// Shared tail logic: keep the most recent h of `recs` (already time-sorted),
// write (counterpart id, rating) pairs, pad the rest.
template <class GetId>
void fill_slots(const std::vector<Interaction>& recs, std::optional<i32> exclude,
                GetId get_id, i32 h, i32 pad_id, std::vector<i32>& ids,
                std::vector<i32>& ratings, MaskVec& mask) {
  ids.assign(static_cast<std::size_t>(h), pad_id);
  ratings.assign(static_cast<std::size_t>(h), 0);
  mask.assign(static_cast<std::size_t>(h), 0);

  std::vector<const Interaction*> kept;
  kept.reserve(recs.size());
  for (const auto& r : recs)
    if (!exclude || get_id(r) != *exclude) kept.push_back(&r);
  std::size_t start = kept.size() > static_cast<std::size_t>(h)
                          ? kept.size() - static_cast<std::size_t>(h)
                          : 0;
  std::size_t slot = 0;
  for (std::size_t i = start; i < kept.size(); ++i, ++slot) {
    ids[slot] = get_id(*kept[i]);
    ratings[slot] = kept[i]->rating;
    mask[slot] = 1;
  }
}

}  // namespace

UserHistory build_user_history(const HistoryIndex& index, i32 user,
                               std::optional<i32> exclude_item, i32 h) {
  if (user < 0 || user >= index.n_users)
    throw LookupError("unknown user index: " + std::to_string(user));
  if (h < 1) throw ValidationError("history length must be >= 1");
  UserHistory out;
  fill_slots(
      index.by_user[static_cast<std::size_t>(user)], exclude_item,
      [](const Interaction& r) { return r.item; }, h, index.n_items, out.item_ids,
      out.rating_ids, out.mask);
  return out;
}

UserHistory build_user_history(const Dataset& train, i32 user,
                               std::optional<i32> exclude_item, i32 h) {
  return build_user_history(HistoryIndex(train), user, exclude_item, h);
}

ItemProfile build_item_profile(const HistoryIndex& index, i32 item,
                               std::optional<i32> exclude_user,
                               const std::vector<ItemDocument>& docs, i32 h) {
  if (item < 0 || item >= index.n_items)
    throw LookupError("unknown item index: " + std::to_string(item));
  if (h < 1) throw ValidationError("history length must be >= 1");
  ItemProfile out;
  fill_slots(
      index.by_item[static_cast<std::size_t>(item)], exclude_user,
      [](const Interaction& r) { return r.user; }, h, index.n_users, out.user_ids,
      out.rating_ids, out.mask);
  if (static_cast<std::size_t>(item) >= docs.size())
    throw LookupError("no document for item index: " + std::to_string(item));
  out.document = docs[static_cast<std::size_t>(item)];
  return out;
}

ItemProfile build_item_profile(const Dataset& train, i32 item,
                               std::optional<i32> exclude_user,
                               const std::vector<ItemDocument>& docs, i32 h) {
  return build_item_profile(HistoryIndex(train), item, exclude_user, docs, h);
}

}  // namespace harc::corpus
