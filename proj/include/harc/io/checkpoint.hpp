#pragma once

#include "harc/model/config.hpp"
#include "harc/numerics/store.hpp"
#include "harc/types.hpp"

#include <string>

namespace harc::io {

// Checkpoint container ("HARC"), little-endian throughout:
//   magic "HARC" | version u32 | tensor count u32
//   per tensor: name length u32, UTF-8 name, rank u32, dims u64 each,
//               row-major f32 payload
//   trailing CRC-32 of everything prior.
// Model hyperparameters ride along as the "__config__" tensor; a
// human-readable sidecar (<path>.cfg) carries the same settings as text.

inline constexpr u32 kCheckpointVersion = 1;

struct Checkpoint {
  numerics::ParameterStore<float> store;
  model::ModelConfig cfg;
  i32 n_users = 0;
  i32 n_items = 0;
  i32 vocab_words = 0;
};

void save_checkpoint(const std::string& path, const numerics::ParameterStore<float>& store,
                     const model::ModelConfig& cfg, i32 n_users, i32 n_items,
                     i32 vocab_words);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace harc::io
