#include "harc/serve/cache.hpp"

#include "harc/error.hpp"
#include "harc/model/encoders.hpp"

#include <algorithm>

namespace harc::serve {

ProfileCache::ProfileCache(io::Checkpoint checkpoint, const io::PreparedData& data,
                           u32 checkpoint_crc)
    : store_(std::move(checkpoint.store)),
      cfg_(checkpoint.cfg),
      docs_(data.docs),
      fingerprint_(checkpoint_crc) {
  if (checkpoint.n_users != data.n_users() || checkpoint.n_items != data.n_items())
    throw ValidationError("checkpoint and prepared data disagree on user/item counts");
  n_known_users_ = data.n_users();

  users_.resize(static_cast<std::size_t>(data.n_users()));
  items_.resize(static_cast<std::size_t>(data.n_items()));
  for (const auto& r : data.train.interactions) {
    users_[static_cast<std::size_t>(r.user)].history.push_back({r.item, r.rating, r.ts});
    users_[static_cast<std::size_t>(r.user)].interacted.push_back(r.item);
    items_[static_cast<std::size_t>(r.item)].raters.push_back({r.user, r.rating, r.ts});
  }
  auto by_ts = [](const Slot& a, const Slot& b) {
    return a.ts != b.ts ? a.ts < b.ts : a.id < b.id;
  };
  const std::size_t h = static_cast<std::size_t>(cfg_.history_len);
  for (auto& u : users_) {
    std::sort(u.history.begin(), u.history.end(), by_ts);
    if (u.history.size() > h) u.history.erase(u.history.begin(), u.history.end() - h);
    std::sort(u.interacted.begin(), u.interacted.end());
    encode_user_entry(u);
  }
  for (i32 i = 0; i < static_cast<i32>(items_.size()); ++i) {
    auto& e = items_[static_cast<std::size_t>(i)];
    std::sort(e.raters.begin(), e.raters.end(), by_ts);
    if (e.raters.size() > h) e.raters.erase(e.raters.begin(), e.raters.end() - h);
    e.doc_vec = model::encode_document_cnn(store_, docs_[static_cast<std::size_t>(i)], cfg_);
    encode_item_entry(e, i);
  }
  // Construction pass counts are not part of the refresh cost contract.
  user_passes_ = 0;
  item_passes_ = 0;
}

void ProfileCache::encode_user_entry(UserEntry& e) {
  corpus::UserHistory hist;
  const i32 h = cfg_.history_len;
  hist.item_ids.assign(static_cast<std::size_t>(h), static_cast<i32>(items_.size()));
  hist.rating_ids.assign(static_cast<std::size_t>(h), 0);
  hist.mask.assign(static_cast<std::size_t>(h), 0);
  for (std::size_t j = 0; j < e.history.size(); ++j) {
    hist.item_ids[j] = e.history[j].id;
    hist.rating_ids[j] = e.history[j].rating;
    hist.mask[j] = 1;
  }
  e.latent = model::encode_user(store_, hist, cfg_);
  ++user_passes_;
}

void ProfileCache::encode_item_entry(ItemEntry& e, i32 item) {
  corpus::ItemProfile prof;
  const i32 h = cfg_.history_len;
  prof.user_ids.assign(static_cast<std::size_t>(h), n_known_users_);
  prof.rating_ids.assign(static_cast<std::size_t>(h), 0);
  prof.mask.assign(static_cast<std::size_t>(h), 0);
  for (std::size_t j = 0; j < e.raters.size(); ++j) {
    prof.user_ids[j] = e.raters[j].id;
    prof.rating_ids[j] = e.raters[j].rating;
    prof.mask[j] = 1;
  }
  prof.document = docs_[static_cast<std::size_t>(item)];
  e.latent = model::encode_item_with_doc_vec(store_, e.doc_vec, prof, cfg_);
  ++item_passes_;
}

corpus::UserHistory ProfileCache::history_of(i32 user) const {
  if (user < 0 || user >= n_users()) throw LookupError("history_of: unknown user");
  const auto& e = users_[static_cast<std::size_t>(user)];
  corpus::UserHistory hist;
  const i32 h = cfg_.history_len;
  hist.item_ids.assign(static_cast<std::size_t>(h), static_cast<i32>(items_.size()));
  hist.rating_ids.assign(static_cast<std::size_t>(h), 0);
  hist.mask.assign(static_cast<std::size_t>(h), 0);
  for (std::size_t j = 0; j < e.history.size(); ++j) {
    hist.item_ids[j] = e.history[j].id;
    hist.rating_ids[j] = e.history[j].rating;
    hist.mask[j] = 1;
  }
  return hist;
}

corpus::ItemProfile ProfileCache::profile_of(i32 item) const {
  if (item < 0 || item >= n_items()) throw LookupError("profile_of: unknown item");
  const auto& e = items_[static_cast<std::size_t>(item)];
  corpus::ItemProfile prof;
  const i32 h = cfg_.history_len;
  prof.user_ids.assign(static_cast<std::size_t>(h), n_known_users_);
  prof.rating_ids.assign(static_cast<std::size_t>(h), 0);
  prof.mask.assign(static_cast<std::size_t>(h), 0);
  for (std::size_t j = 0; j < e.raters.size(); ++j) {
    prof.user_ids[j] = e.raters[j].id;
    prof.rating_ids[j] = e.raters[j].rating;
    prof.mask[j] = 1;
  }
  prof.document = docs_[static_cast<std::size_t>(item)];
  return prof;
}

i32 ProfileCache::add_cold_user() {
  users_.emplace_back();
  encode_user_entry(users_.back());
  --user_passes_;  // registration is not a refresh
  return static_cast<i32>(users_.size()) - 1;
}

const VecF& ProfileCache::refresh_user(i32 user,
                                       const std::vector<corpus::Interaction>& added) {
  if (user < 0) throw LookupError("refresh_user: bad user id");
  for (const auto& r : added)
    if (r.item < 0 || r.item >= n_items())
      throw LookupError("refresh_user: unknown item " + std::to_string(r.item));

  while (user >= n_users()) add_cold_user();  // cold start: fresh empty history
  auto& entry = users_[static_cast<std::size_t>(user)];

  auto by_ts = [](const Slot& a, const Slot& b) {
    return a.ts != b.ts ? a.ts < b.ts : a.id < b.id;
  };
  const std::size_t h = static_cast<std::size_t>(cfg_.history_len);
  const bool known = user < n_known_users_;

  for (const auto& r : added) {
    // rating updates supersede: drop any existing slot for the same item
    std::erase_if(entry.history, [&](const Slot& s) { return s.id == r.item; });
    entry.history.push_back({r.item, r.rating, r.ts});
    auto pos = std::lower_bound(entry.interacted.begin(), entry.interacted.end(), r.item);
    if (pos == entry.interacted.end() || *pos != r.item) entry.interacted.insert(pos, r.item);
  }
  std::sort(entry.history.begin(), entry.history.end(), by_ts);
  if (entry.history.size() > h)
    entry.history.erase(entry.history.begin(), entry.history.end() - h);
  encode_user_entry(entry);

  if (known) {
    for (const auto& r : added) {
      auto& item = items_[static_cast<std::size_t>(r.item)];
      std::erase_if(item.raters, [&](const Slot& s) { return s.id == user; });
      item.raters.push_back({user, r.rating, r.ts});
      std::sort(item.raters.begin(), item.raters.end(), by_ts);
      if (item.raters.size() > h)
        item.raters.erase(item.raters.begin(), item.raters.end() - h);
      encode_item_entry(item, r.item);
    }
  }
  return entry.latent;
}

const VecF& ProfileCache::user_latent(i32 user) const {
  if (user < 0 || user >= n_users()) throw LookupError("user_latent: unknown user");
  return users_[static_cast<std::size_t>(user)].latent;
}

const VecF& ProfileCache::item_latent(i32 item) const {
  if (item < 0 || item >= n_items()) throw LookupError("item_latent: unknown item");
  return items_[static_cast<std::size_t>(item)].latent;
}

std::vector<std::pair<i32, double>> ProfileCache::recommend_top_k(i32 user, int k) const {
  if (user < 0 || user >= n_users()) throw LookupError("recommend_top_k: unknown user");
  if (k <= 0) return {};
  const auto& entry = users_[static_cast<std::size_t>(user)];

  std::vector<std::pair<i32, double>> scored;
  scored.reserve(items_.size());
  for (i32 i = 0; i < n_items(); ++i) {
    if (std::binary_search(entry.interacted.begin(), entry.interacted.end(), i)) continue;
    scored.emplace_back(i, static_cast<double>(model::predict(
                               store_, entry.latent,
                               items_[static_cast<std::size_t>(i)].latent, cfg_)));
  }
  auto better = [](const std::pair<i32, double>& a, const std::pair<i32, double>& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const std::size_t top = std::min(scored.size(), static_cast<std::size_t>(k));
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(top),
                    scored.end(), better);
  scored.resize(top);
  return scored;
}

}  // namespace harc::serve
