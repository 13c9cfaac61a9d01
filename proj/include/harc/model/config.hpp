#pragma once

#include "harc/error.hpp"
#include "harc/types.hpp"

#include <string>
#include <vector>

namespace harc::model {

enum class Pooling { attention, mean, max };
enum class Task { rating, ranking };

std::string to_string(Pooling p);
std::string to_string(Task t);
Pooling pooling_from_string(const std::string& s);
Task task_from_string(const std::string& s);

/// Every hyperparameter and ablation switch; fully determines the
/// architecture given (n_users, n_items, vocab size).
struct ModelConfig {
  int d_item = 64;
  int d_user = 64;
  int d_rating = 64;
  int d_attn = 32;
  int word_dim = 300;
  std::vector<int> window_sizes{3, 4, 5};
  int filters_per_size = 100;
  int d_doc = 64;
  int d_latent = 64;
  std::vector<int> mlp_layers{128, 64, 32, 1};
  int history_len = 50;
  int doc_len = 300;
  bool use_rating_info = true;
  Pooling pooling = Pooling::attention;
  bool use_user_info_in_item = true;
  bool use_doc_info = true;
  bool use_pretrained_words = true;
  Task task = Task::rating;

  int total_filters() const {
    return filters_per_size * static_cast<int>(window_sizes.size());
  }
  int mlp_input_dim() const { return 2 * d_latent; }

  /// Throws ValidationError on an inconsistent configuration.
  void validate() const;
};

/// Numeric image of the config (plus corpus sizes), stored as the "__config__"
/// tensor inside checkpoints.
std::vector<float> encode_config(const ModelConfig& cfg, i32 n_users, i32 n_items,
                                 i32 vocab_words);

struct DecodedConfig {
  ModelConfig cfg;
  i32 n_users = 0;
  i32 n_items = 0;
  i32 vocab_words = 0;
};

DecodedConfig decode_config(const std::vector<float>& data);

/// Human-readable key=value rendering (the checkpoint sidecar).
std::string config_text(const ModelConfig& cfg, i32 n_users, i32 n_items, i32 vocab_words);

}  // namespace harc::model
