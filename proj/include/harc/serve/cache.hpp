#pragma once

#include "harc/corpus/histories.hpp"
#include "harc/io/checkpoint.hpp"
#include "harc/io/tables.hpp"
#include "harc/numerics/store.hpp"

#include <utility>
#include <vector>

namespace harc::serve {

/// Online personalization on a frozen checkpoint: cached user/item latents
/// that can be refreshed from new interactions without touching a single
/// parameter. Model parameters are immutable after construction; the
/// checkpoint fingerprint asserts that.
class ProfileCache {
 public:
  ProfileCache(io::Checkpoint checkpoint, const io::PreparedData& data,
               u32 checkpoint_crc);

  /// Appends the interactions to the user's stored history (most recent H
  /// kept), re-encodes the user latent, and — for users with an embedding
  /// row — updates the touched items' profiles and latents. Unknown users
  /// get a fresh cold history; unknown items are an error.
  const VecF& refresh_user(i32 user, const std::vector<corpus::Interaction>& added);

  /// Top-k items (score desc, id asc) among those the user has not
  /// interacted with. k <= 0 yields an empty list; k beyond the candidate
  /// count returns every candidate ranked.
  std::vector<std::pair<i32, double>> recommend_top_k(i32 user, int k) const;

  const VecF& user_latent(i32 user) const;
  const VecF& item_latent(i32 item) const;

  /// Fixed-length views of the stored state, for coherence checks.
  corpus::UserHistory history_of(i32 user) const;
  corpus::ItemProfile profile_of(i32 item) const;

  u32 fingerprint() const { return fingerprint_; }
  i64 user_encoder_passes() const { return user_passes_; }
  i64 item_profile_passes() const { return item_passes_; }

  i32 n_users() const { return static_cast<i32>(users_.size()); }
  i32 n_items() const { return static_cast<i32>(items_.size()); }
  i32 known_users() const { return n_known_users_; }
  const model::ModelConfig& config() const { return cfg_; }
  const numerics::ParameterStore<float>& store() const { return store_; }

  /// Registers a user unseen at training time; returns its id. The new user
  /// has no embedding row, so only its own history feeds the model.
  i32 add_cold_user();

 private:
  struct Slot {
    i32 id;  // counterpart (item for users, user for items)
    i32 rating;
    i64 ts;
  };
  struct UserEntry {
    std::vector<Slot> history;          // sorted by (ts, id), capped at H
    std::vector<i32> interacted;        // sorted; for candidate exclusion
    VecF latent;
  };
  struct ItemEntry {
    std::vector<Slot> raters;  // sorted by (ts, id), capped at H
    VecF doc_vec;              // cached CNN branch output
    VecF latent;
  };

  void encode_user_entry(UserEntry& e);
  void encode_item_entry(ItemEntry& e, i32 item);

  numerics::ParameterStore<float> store_;
  model::ModelConfig cfg_;
  std::vector<corpus::ItemDocument> docs_;
  std::vector<UserEntry> users_;
  std::vector<ItemEntry> items_;
  i32 n_known_users_ = 0;  // users with embedding rows (training-time users)
  u32 fingerprint_ = 0;
  i64 user_passes_ = 0;
  i64 item_passes_ = 0;
};

}  // namespace harc::serve
