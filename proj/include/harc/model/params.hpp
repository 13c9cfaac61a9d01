#pragma once

#include "harc/corpus/vectors.hpp"
#include "harc/model/config.hpp"
#include "harc/numerics/store.hpp"
#include "harc/rng.hpp"

#include <string>

namespace harc::model {

namespace names {
// Entity tables carry one extra padding row (index n) that is never gathered.
inline const std::string item_table = "embed.item";
inline const std::string user_table = "embed.user";
inline const std::string rating_user = "embed.rating_user";  // ratings inside histories
inline const std::string rating_item = "embed.rating_item";  // ratings inside profiles
inline const std::string word_table = "embed.word";
inline const std::string config_tensor = "__config__";

inline std::string conv_w(int window) { return "doc.conv" + std::to_string(window) + ".W"; }
inline std::string conv_b(int window) { return "doc.conv" + std::to_string(window) + ".b"; }
inline std::string mlp_w(int layer) { return "mlp." + std::to_string(layer) + ".W"; }
inline std::string mlp_b(int layer) { return "mlp." + std::to_string(layer) + ".b"; }
}  // namespace names

namespace detail {

template <class S>
void init_uniform(numerics::Tensor<S>& t, u64 stream_seed, double scale) {
  SplitMix64 rng(stream_seed);
  for (Eigen::Index k = 0; k < t.size(); ++k)
    t.coord(k) = static_cast<S>(rng.uniform(-scale, scale));
}

// Glorot-style fan-scaled uniform; draws in double then casts so the float
// and double stores see the same underlying reals.
template <class S>
void init_glorot(numerics::Tensor<S>& t, u64 stream_seed) {
  const double fan_in = static_cast<double>(t.cols());
  const double fan_out = static_cast<double>(t.rows());
  init_uniform(t, stream_seed, std::sqrt(6.0 / (fan_in + fan_out)));
}

}  // namespace detail

/// Creates and initializes every parameter the architecture needs. All
/// parameters exist regardless of ablation flags (disabled paths simply never
/// touch theirs), so checkpoints keep one layout. Each tensor draws from its
/// own named stream: init is independent of creation order.
template <class S>
numerics::ParameterStore<S> init_parameters(const ModelConfig& cfg, i32 n_users,
                                            i32 n_items, i32 vocab_words, u64 seed,
                                            const corpus::WordEmbeddingTable* pretrained =
                                                nullptr) {
  cfg.validate();
  if (pretrained && pretrained->rows.cols() != cfg.word_dim)
    throw ValidationError("pretrained word table width " +
                          std::to_string(pretrained->rows.cols()) +
                          " does not match word_dim " + std::to_string(cfg.word_dim));
  if (pretrained && pretrained->rows.rows() != vocab_words + 2)
    throw ValidationError("pretrained word table row count does not match vocabulary");

  numerics::ParameterStore<S> store;
  auto stream = [&](const std::string& name) { return rng_combine(seed, fnv1a(name)); };
  auto embedding = [&](const std::string& name, i32 rows, int dim) {
    auto& p = store.add(name, 2, rows, dim);
    detail::init_uniform(p.value, stream(name), 0.05);
    return &p;
  };
  auto dense = [&](const std::string& w, const std::string& b, int out, int in) {
    detail::init_glorot(store.add(w, 2, out, in).value, stream(w));
    store.add(b, 1, out);  // biases start at zero
  };

  // Entity tables; the final row is padding and stays zero.
  embedding(names::item_table, n_items + 1, cfg.d_item)->value.m.row(n_items).setZero();
  embedding(names::user_table, n_users + 1, cfg.d_user)->value.m.row(n_users).setZero();
  // Rating tables: ids 1..5, row 0 unused (padding slots carry rating 0).
  embedding(names::rating_user, 6, cfg.d_rating)->value.m.row(0).setZero();
  embedding(names::rating_item, 6, cfg.d_rating)->value.m.row(0).setZero();

  {
    auto& p = store.add(names::word_table, 2, vocab_words + 2, cfg.word_dim);
    if (pretrained && cfg.use_pretrained_words) {
      p.value.m = pretrained->rows.template cast<S>();
    } else {
      detail::init_uniform(p.value, stream(names::word_table), 0.05);
    }
    p.value.m.row(corpus::Vocabulary::kPad).setZero();  // PAD row: zero, never updated
  }

  dense("user.fuse.W", "user.fuse.b", cfg.d_item, cfg.d_item + cfg.d_rating);
  dense("user.attn.W", "user.attn.b", cfg.d_attn, cfg.d_item);
  detail::init_glorot(store.add("user.attn.h", 1, cfg.d_attn).value, stream("user.attn.h"));
  dense("user.proj.W", "user.proj.b", cfg.d_latent, cfg.d_item);

  dense("item.fuse.W", "item.fuse.b", cfg.d_user, cfg.d_user + cfg.d_rating);
  dense("item.attn.W", "item.attn.b", cfg.d_attn, cfg.d_user);
  detail::init_glorot(store.add("item.attn.h", 1, cfg.d_attn).value, stream("item.attn.h"));

  for (int h : cfg.window_sizes)
    dense(names::conv_w(h), names::conv_b(h), cfg.filters_per_size, h * cfg.word_dim);
  dense("doc.fc.W", "doc.fc.b", cfg.d_doc, cfg.total_filters());
  dense("item.proj.W", "item.proj.b", cfg.d_latent, cfg.d_doc + cfg.d_user);

  int in_dim = cfg.mlp_input_dim();
  for (std::size_t k = 0; k < cfg.mlp_layers.size(); ++k) {
    dense(names::mlp_w(static_cast<int>(k)), names::mlp_b(static_cast<int>(k)),
          cfg.mlp_layers[k], in_dim);
    in_dim = cfg.mlp_layers[k];
  }
  return store;
}

}  // namespace harc::model
