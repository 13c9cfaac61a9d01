#pragma once

#include "harc/corpus/histories.hpp"
#include "harc/model/config.hpp"
#include "harc/model/params.hpp"
#include "harc/numerics/softmax.hpp"
#include "harc/numerics/store.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

// The architecture: attention-pooled user encoder over (item, rating)
// history slots, a two-branch item encoder (multi-window text CNN over the
// description + attention-pooled rater profile), and an MLP head. Forward
// passes are shared between training, evaluation, and serving; backward
// passes are hand-derived per layer and verified against central finite
// differences (numerics/gradcheck.hpp).

namespace harc::model {

using corpus::ItemDocument;
using corpus::ItemProfile;
using corpus::UserHistory;
using numerics::ParameterStore;

constexpr double kProbClamp = 1e-7;  // BCE probability clamp

template <class S>
S sigmoid(S z) {
  if (z >= S{0}) {
    const S e = std::exp(-z);
    return S{1} / (S{1} + e);
  }
  const S e = std::exp(z);
  return e / (S{1} + e);
}

template <class S>
S clamp_rating(S x) {
  return std::min<S>(S{5}, std::max<S>(S{1}, x));
}

/// ReLU(W_f . concat(entity, rating) + b_f): fold a rating embedding into an
/// entity embedding before pooling.
template <class S>
Vec<S> fuse_entry(const Vec<S>& entity, const Vec<S>& rating_emb, const Mat<S>& W_f,
                  const Vec<S>& b_f) {
  Vec<S> z(entity.size() + rating_emb.size());
  z << entity, rating_emb;
  return (W_f * z + b_f).cwiseMax(S{0});
}

template <class S>
struct PoolResult {
  Vec<S> context;  // d
  Vec<S> weights;  // per slot; zero at masked slots, all-zero for max pooling
};

/// Pools history slots (rows of `entries`) into one context vector.
/// attention: score_j = h_a . ReLU(W_a e_j + b_a), softmax over unmasked
/// slots, weighted sum. mean: uniform weights over unmasked slots. max:
/// coordinate-wise max over unmasked slots (weights reported all-zero).
/// All-masked input yields a zero context.
template <class S>
PoolResult<S> attention_pool(const Mat<S>& entries, const MaskVec& mask, const Mat<S>& W_a,
                             const Vec<S>& b_a, const Vec<S>& h_a,
                             Pooling pooling = Pooling::attention) {
  const Eigen::Index n_slots = entries.rows();
  const Eigen::Index d = entries.cols();
  if (static_cast<std::size_t>(n_slots) != mask.size())
    throw ValidationError("attention_pool: entries/mask length mismatch");

  PoolResult<S> out;
  out.context = Vec<S>::Zero(d);
  out.weights = Vec<S>::Zero(n_slots);

  if (pooling == Pooling::attention) {
    Vec<S> scores = Vec<S>::Zero(n_slots);
    for (Eigen::Index j = 0; j < n_slots; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      Vec<S> pre = W_a * entries.row(j).transpose() + b_a;
      scores(j) = h_a.dot(pre.cwiseMax(S{0}));
    }
    out.weights = numerics::masked_softmax<S>(scores, mask);
    out.context = entries.transpose() * out.weights;
  } else if (pooling == Pooling::mean) {
    const i32 k = count_unmasked(mask);
    if (k > 0) {
      for (Eigen::Index j = 0; j < n_slots; ++j)
        if (mask[static_cast<std::size_t>(j)]) out.weights(j) = S{1} / static_cast<S>(k);
      out.context = entries.transpose() * out.weights;
    }
  } else {  // max
    bool any = false;
    for (Eigen::Index j = 0; j < n_slots; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      if (!any) {
        out.context = entries.row(j).transpose();
        any = true;
      } else {
        out.context = out.context.cwiseMax(entries.row(j).transpose());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Internal forward caches and backward passes.
// ---------------------------------------------------------------------------

namespace detail {

/// One pooled side (user history over items, or item profile over raters).
/// Column j holds slot j; masked columns are zero and are never touched.
template <class S>
struct SideCache {
  Mat<S> entity;    // d x H gathered embeddings
  Mat<S> fuse_pre;  // d x H pre-activation of the fusion layer
  Mat<S> entries;   // d x H pooled inputs (fused or raw)
  Mat<S> attn_pre;  // d_attn x H
  Vec<S> scores;    // H
  Vec<S> weights;   // H
  Vec<S> context;   // d
  std::vector<int> max_slot;  // pooling=max: winning slot per coordinate
};

template <class S>
struct SideParams {
  const Mat<S>& entity_table;
  const Mat<S>& rating_table;
  const Mat<S>& fuse_W;
  const Mat<S>& fuse_b;
  const Mat<S>& attn_W;
  const Mat<S>& attn_b;
  const Mat<S>& attn_h;
};

template <class S>
struct SideGrads {
  Mat<S>& entity_table;
  Mat<S>& rating_table;
  Mat<S>& fuse_W;
  Mat<S>& fuse_b;
  Mat<S>& attn_W;
  Mat<S>& attn_b;
  Mat<S>& attn_h;
};

template <class S>
SideParams<S> user_side(const ParameterStore<S>& s) {
  return {s.value(names::item_table), s.value(names::rating_user), s.value("user.fuse.W"),
          s.value("user.fuse.b"),     s.value("user.attn.W"),      s.value("user.attn.b"),
          s.value("user.attn.h")};
}

template <class S>
SideParams<S> item_side(const ParameterStore<S>& s) {
  return {s.value(names::user_table), s.value(names::rating_item), s.value("item.fuse.W"),
          s.value("item.fuse.b"),     s.value("item.attn.W"),      s.value("item.attn.b"),
          s.value("item.attn.h")};
}

template <class S>
SideGrads<S> user_side_grads(ParameterStore<S>& s) {
  return {s.grad(names::item_table), s.grad(names::rating_user), s.grad("user.fuse.W"),
          s.grad("user.fuse.b"),     s.grad("user.attn.W"),      s.grad("user.attn.b"),
          s.grad("user.attn.h")};
}

template <class S>
SideGrads<S> item_side_grads(ParameterStore<S>& s) {
  return {s.grad(names::user_table), s.grad(names::rating_item), s.grad("item.fuse.W"),
          s.grad("item.fuse.b"),     s.grad("item.attn.W"),      s.grad("item.attn.b"),
          s.grad("item.attn.h")};
}

template <class S>
void side_forward(const SideParams<S>& p, bool use_rating, Pooling pooling,
                  const std::vector<i32>& ids, const std::vector<i32>& rids,
                  const MaskVec& mask, SideCache<S>& c) {
  const Eigen::Index d = p.entity_table.cols();
  const Eigen::Index n_slots = static_cast<Eigen::Index>(ids.size());

  c.entity = Mat<S>::Zero(d, n_slots);
  for (Eigen::Index j = 0; j < n_slots; ++j)
    if (mask[static_cast<std::size_t>(j)])
      c.entity.col(j) = p.entity_table.row(ids[static_cast<std::size_t>(j)]).transpose();

  if (use_rating) {
    c.fuse_pre = Mat<S>::Zero(d, n_slots);
    c.entries = Mat<S>::Zero(d, n_slots);
    const Eigen::Index d_r = p.rating_table.cols();
    Vec<S> z(d + d_r);
    for (Eigen::Index j = 0; j < n_slots; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      z.head(d) = c.entity.col(j);
      z.tail(d_r) = p.rating_table.row(rids[static_cast<std::size_t>(j)]).transpose();
      c.fuse_pre.col(j) = p.fuse_W * z + p.fuse_b.col(0);
      c.entries.col(j) = c.fuse_pre.col(j).cwiseMax(S{0});
    }
  } else {
    c.entries = c.entity;
  }

  c.context = Vec<S>::Zero(d);
  c.weights = Vec<S>::Zero(n_slots);
  c.scores = Vec<S>::Zero(n_slots);
  c.max_slot.assign(static_cast<std::size_t>(d), -1);

  if (pooling == Pooling::attention) {
    c.attn_pre = Mat<S>::Zero(p.attn_W.rows(), n_slots);
    for (Eigen::Index j = 0; j < n_slots; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      c.attn_pre.col(j) = p.attn_W * c.entries.col(j) + p.attn_b.col(0);
      c.scores(j) = c.attn_pre.col(j).cwiseMax(S{0}).dot(p.attn_h.col(0));
    }
    c.weights = numerics::masked_softmax<S>(c.scores, mask);
    c.context = c.entries * c.weights;
  } else if (pooling == Pooling::mean) {
    const i32 k = count_unmasked(mask);
    if (k > 0) {
      for (Eigen::Index j = 0; j < n_slots; ++j)
        if (mask[static_cast<std::size_t>(j)]) c.weights(j) = S{1} / static_cast<S>(k);
      c.context = c.entries * c.weights;
    }
  } else {
    for (Eigen::Index dd = 0; dd < d; ++dd) {
      S best = std::numeric_limits<S>::lowest();
      int slot = -1;
      for (Eigen::Index j = 0; j < n_slots; ++j) {
        if (mask[static_cast<std::size_t>(j)] && c.entries(dd, j) > best) {
          best = c.entries(dd, j);
          slot = static_cast<int>(j);
        }
      }
      if (slot >= 0) {
        c.context(dd) = best;
        c.max_slot[static_cast<std::size_t>(dd)] = slot;
      }
    }
  }
}

template <class S>
void side_backward(const SideParams<S>& p, SideGrads<S>& g, bool use_rating,
                   Pooling pooling, const std::vector<i32>& ids,
                   const std::vector<i32>& rids, const MaskVec& mask,
                   const SideCache<S>& c, const Vec<S>& d_context) {
  const Eigen::Index d = p.entity_table.cols();
  const Eigen::Index n_slots = static_cast<Eigen::Index>(ids.size());
  Mat<S> d_entries = Mat<S>::Zero(d, n_slots);

  if (pooling == Pooling::attention) {
    Vec<S> d_weights = Vec<S>::Zero(n_slots);
    for (Eigen::Index j = 0; j < n_slots; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      d_weights(j) = c.entries.col(j).dot(d_context);
      d_entries.col(j) += c.weights(j) * d_context;
    }
    // softmax backward: ds_j = w_j (dw_j - w . dw)
    const S dot = c.weights.dot(d_weights);
    for (Eigen::Index j = 0; j < n_slots; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      const S ds = c.weights(j) * (d_weights(j) - dot);
      if (ds == S{0}) continue;
      Vec<S> r = c.attn_pre.col(j).cwiseMax(S{0});
      g.attn_h.col(0) += ds * r;
      Vec<S> d_pre =
          (ds * p.attn_h.col(0).array() * (c.attn_pre.col(j).array() > S{0}).template cast<S>())
              .matrix();
      g.attn_W += d_pre * c.entries.col(j).transpose();
      g.attn_b.col(0) += d_pre;
      d_entries.col(j) += p.attn_W.transpose() * d_pre;
    }
  } else if (pooling == Pooling::mean) {
    const i32 k = count_unmasked(mask);
    if (k > 0) {
      for (Eigen::Index j = 0; j < n_slots; ++j)
        if (mask[static_cast<std::size_t>(j)])
          d_entries.col(j) += d_context / static_cast<S>(k);
    }
  } else {
    for (Eigen::Index dd = 0; dd < d; ++dd) {
      const int slot = c.max_slot[static_cast<std::size_t>(dd)];
      if (slot >= 0) d_entries(dd, slot) += d_context(dd);
    }
  }

  if (use_rating) {
    const Eigen::Index d_r = p.rating_table.cols();
    Vec<S> z(d + d_r);
    for (Eigen::Index j = 0; j < n_slots; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      Vec<S> d_pre =
          (d_entries.col(j).array() * (c.fuse_pre.col(j).array() > S{0}).template cast<S>())
              .matrix();
      z.head(d) = c.entity.col(j);
      z.tail(d_r) = p.rating_table.row(rids[static_cast<std::size_t>(j)]).transpose();
      g.fuse_W += d_pre * z.transpose();
      g.fuse_b.col(0) += d_pre;
      Vec<S> dz = p.fuse_W.transpose() * d_pre;
      g.entity_table.row(ids[static_cast<std::size_t>(j)]) += dz.head(d).transpose();
      g.rating_table.row(rids[static_cast<std::size_t>(j)]) += dz.tail(d_r).transpose();
    }
  } else {
    for (Eigen::Index j = 0; j < n_slots; ++j)
      if (mask[static_cast<std::size_t>(j)])
        g.entity_table.row(ids[static_cast<std::size_t>(j)]) +=
            d_entries.col(j).transpose();
  }
}

/// Multi-window text CNN with max-over-time pooling.
template <class S>
struct DocCache {
  Mat<S> embed;                          // l x rho, PAD columns zero
  std::vector<Mat<S>> pre;               // per window size: n_f x n_pos
  std::vector<std::vector<int>> argmax;  // per size, per filter: position or -1
  Vec<S> q;                              // pooled features, size total_filters
  Vec<S> fc_pre;                         // d_doc
  Vec<S> doc_vec;                        // d_doc
};

template <class S>
void doc_forward(const ParameterStore<S>& s, const ModelConfig& cfg,
                 const ItemDocument& doc, DocCache<S>& c) {
  const Mat<S>& words = s.value(names::word_table);
  const Eigen::Index l = words.cols();
  const Eigen::Index rho = static_cast<Eigen::Index>(doc.token_ids.size());

  c.embed = Mat<S>::Zero(l, rho);
  for (Eigen::Index i = 0; i < rho; ++i)
    if (doc.mask[static_cast<std::size_t>(i)])
      c.embed.col(i) = words.row(doc.token_ids[static_cast<std::size_t>(i)]).transpose();

  // prefix[i] = number of unmasked tokens before position i
  std::vector<i32> prefix(static_cast<std::size_t>(rho) + 1, 0);
  for (Eigen::Index i = 0; i < rho; ++i)
    prefix[static_cast<std::size_t>(i) + 1] =
        prefix[static_cast<std::size_t>(i)] + (doc.mask[static_cast<std::size_t>(i)] ? 1 : 0);

  const std::size_t n_sizes = cfg.window_sizes.size();
  c.pre.assign(n_sizes, Mat<S>());
  c.argmax.assign(n_sizes, {});
  c.q = Vec<S>::Zero(cfg.total_filters());

  for (std::size_t si = 0; si < n_sizes; ++si) {
    const int h = cfg.window_sizes[si];
    const Mat<S>& F = s.value(names::conv_w(h));
    const Mat<S>& b = s.value(names::conv_b(h));
    const Eigen::Index n_f = F.rows();
    const Eigen::Index n_pos = rho - h + 1;
    c.argmax[si].assign(static_cast<std::size_t>(n_f), -1);
    if (n_pos <= 0) continue;

    // pre = b 1' + sum_k F[:, k*l:(k+1)*l] * embed[:, k:k+n_pos]
    Mat<S>& pre = c.pre[si];
    pre = b.col(0).replicate(1, n_pos);
    for (int k = 0; k < h; ++k)
      pre.noalias() += F.middleCols(static_cast<Eigen::Index>(k) * l, l) *
                       c.embed.middleCols(k, n_pos);

    // max over time, restricted to windows overlapping >= 1 real token
    for (Eigen::Index f = 0; f < n_f; ++f) {
      S best = S{0};
      int best_pos = -1;
      for (Eigen::Index i = 0; i < n_pos; ++i) {
        if (prefix[static_cast<std::size_t>(i + h)] - prefix[static_cast<std::size_t>(i)] == 0)
          continue;  // window fully inside padding
        const S act = std::max(pre(f, i), S{0});
        if (best_pos < 0 || act > best) {
          best = act;
          best_pos = static_cast<int>(i);
        }
      }
      if (best_pos >= 0) {
        c.q(static_cast<Eigen::Index>(si) * cfg.filters_per_size + f) = best;
        c.argmax[si][static_cast<std::size_t>(f)] = best_pos;
      }
    }
  }

  c.fc_pre = s.value("doc.fc.W") * c.q + s.value("doc.fc.b").col(0);
  c.doc_vec = c.fc_pre.cwiseMax(S{0});
}

template <class S>
void doc_backward(ParameterStore<S>& s, const ModelConfig& cfg, const ItemDocument& doc,
                  const DocCache<S>& c, const Vec<S>& d_doc_vec) {
  Vec<S> d_fc_pre =
      (d_doc_vec.array() * (c.fc_pre.array() > S{0}).template cast<S>()).matrix();
  s.grad("doc.fc.W") += d_fc_pre * c.q.transpose();
  s.grad("doc.fc.b").col(0) += d_fc_pre;
  Vec<S> d_q = s.value("doc.fc.W").transpose() * d_fc_pre;

  const Eigen::Index l = s.value(names::word_table).cols();
  const Eigen::Index rho = static_cast<Eigen::Index>(doc.token_ids.size());
  Mat<S> d_embed = Mat<S>::Zero(l, rho);

  for (std::size_t si = 0; si < cfg.window_sizes.size(); ++si) {
    const int h = cfg.window_sizes[si];
    const Mat<S>& F = s.value(names::conv_w(h));
    Mat<S>& dF = s.grad(names::conv_w(h));
    Mat<S>& db = s.grad(names::conv_b(h));
    for (Eigen::Index f = 0; f < F.rows(); ++f) {
      const int pos = c.argmax[si][static_cast<std::size_t>(f)];
      if (pos < 0) continue;
      if (!(c.pre[si](f, pos) > S{0})) continue;  // ReLU gate
      const S d_pre = d_q(static_cast<Eigen::Index>(si) * cfg.filters_per_size + f);
      if (d_pre == S{0}) continue;
      db(f, 0) += d_pre;
      for (int k = 0; k < h; ++k) {
        dF.block(f, static_cast<Eigen::Index>(k) * l, 1, l) +=
            d_pre * c.embed.col(pos + k).transpose();
        d_embed.col(pos + k) +=
            d_pre * F.block(f, static_cast<Eigen::Index>(k) * l, 1, l).transpose();
      }
    }
  }

  Mat<S>& d_words = s.grad(names::word_table);
  for (Eigen::Index i = 0; i < rho; ++i) {
    // PAD columns stay untouched: the PAD row is structural and never trains
    if (doc.mask[static_cast<std::size_t>(i)])
      d_words.row(doc.token_ids[static_cast<std::size_t>(i)]) += d_embed.col(i).transpose();
  }
}

template <class S>
struct RowCache {
  SideCache<S> user;
  Vec<S> u_latent;
  SideCache<S> raters;
  DocCache<S> doc;
  Vec<S> item_concat;  // [doc_vec; rater context]
  Vec<S> item_pre;
  Vec<S> i_latent;
  std::vector<Vec<S>> mlp_pre;   // pre-activation per layer
  std::vector<Vec<S>> mlp_act;   // mlp_act[k] = input to layer k
  S z = S{0};                    // final linear output
};

template <class S>
S mlp_forward(const ParameterStore<S>& s, const ModelConfig& cfg, const Vec<S>& u,
              const Vec<S>& i, RowCache<S>& c) {
  const std::size_t n_layers = cfg.mlp_layers.size();
  c.mlp_act.assign(n_layers, Vec<S>());
  c.mlp_pre.assign(n_layers, Vec<S>());
  Vec<S> x(u.size() + i.size());
  x << u, i;
  for (std::size_t k = 0; k < n_layers; ++k) {
    c.mlp_act[k] = x;
    c.mlp_pre[k] = s.value(names::mlp_w(static_cast<int>(k))) * x +
                   s.value(names::mlp_b(static_cast<int>(k))).col(0);
    if (k + 1 < n_layers) x = c.mlp_pre[k].cwiseMax(S{0});
  }
  c.z = c.mlp_pre[n_layers - 1](0);
  return c.z;
}

/// Full forward pass for one (history, profile) pair; returns the linear
/// output z and fills the cache for backward.
template <class S>
S row_forward(const ParameterStore<S>& s, const ModelConfig& cfg, const UserHistory& hist,
              const ItemProfile& profile, RowCache<S>& c) {
  side_forward(user_side(s), cfg.use_rating_info, cfg.pooling, hist.item_ids,
               hist.rating_ids, hist.mask, c.user);
  c.u_latent = s.value("user.proj.W") * c.user.context + s.value("user.proj.b").col(0);

  const Eigen::Index d_doc = cfg.d_doc;
  const Eigen::Index d_user = cfg.d_user;
  c.item_concat = Vec<S>::Zero(d_doc + d_user);
  if (cfg.use_doc_info) {
    doc_forward(s, cfg, profile.document, c.doc);
    c.item_concat.head(d_doc) = c.doc.doc_vec;
  }
  if (cfg.use_user_info_in_item) {
    side_forward(item_side(s), cfg.use_rating_info, cfg.pooling, profile.user_ids,
                 profile.rating_ids, profile.mask, c.raters);
    c.item_concat.tail(d_user) = c.raters.context;
  }
  c.item_pre = s.value("item.proj.W") * c.item_concat + s.value("item.proj.b").col(0);
  c.i_latent = c.item_pre.cwiseMax(S{0});

  return mlp_forward(s, cfg, c.u_latent, c.i_latent, c);
}

template <class S>
void row_backward(ParameterStore<S>& s, const ModelConfig& cfg, const UserHistory& hist,
                  const ItemProfile& profile, const RowCache<S>& c, S dz) {
  const std::size_t n_layers = cfg.mlp_layers.size();
  Vec<S> d_pre = Vec<S>::Constant(1, dz);
  for (std::size_t k = n_layers; k-- > 0;) {
    s.grad(names::mlp_w(static_cast<int>(k))) += d_pre * c.mlp_act[k].transpose();
    s.grad(names::mlp_b(static_cast<int>(k))).col(0) += d_pre;
    Vec<S> d_x = s.value(names::mlp_w(static_cast<int>(k))).transpose() * d_pre;
    if (k == 0) {
      const Eigen::Index d_lat = cfg.d_latent;
      Vec<S> d_u = d_x.head(d_lat);
      Vec<S> d_i = d_x.tail(d_lat);

      s.grad("user.proj.W") += d_u * c.user.context.transpose();
      s.grad("user.proj.b").col(0) += d_u;
      Vec<S> d_u_ctx = s.value("user.proj.W").transpose() * d_u;
      auto ug = user_side_grads(s);
      side_backward(user_side<S>(s), ug, cfg.use_rating_info, cfg.pooling, hist.item_ids,
                    hist.rating_ids, hist.mask, c.user, d_u_ctx);

      Vec<S> d_item_pre =
          (d_i.array() * (c.item_pre.array() > S{0}).template cast<S>()).matrix();
      s.grad("item.proj.W") += d_item_pre * c.item_concat.transpose();
      s.grad("item.proj.b").col(0) += d_item_pre;
      Vec<S> d_concat = s.value("item.proj.W").transpose() * d_item_pre;
      if (cfg.use_doc_info)
        doc_backward(s, cfg, profile.document, c.doc, Vec<S>(d_concat.head(cfg.d_doc)));
      if (cfg.use_user_info_in_item) {
        Vec<S> d_r_ctx = d_concat.tail(cfg.d_user);
        auto ig = item_side_grads(s);
        side_backward(item_side<S>(s), ig, cfg.use_rating_info, cfg.pooling,
                      profile.user_ids, profile.rating_ids, profile.mask, c.raters,
                      d_r_ctx);
      }
    } else {
      d_pre = (d_x.array() * (c.mlp_pre[k - 1].array() > S{0}).template cast<S>()).matrix();
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public encoder / prediction / loss surface.
// ---------------------------------------------------------------------------

template <class S>
struct UserEncoding {
  Vec<S> latent;
  Vec<S> context;
  Vec<S> weights;
};

/// Latent user vector: pooled, optionally rating-fused item embeddings of the
/// history, mapped to d_latent. Deterministic given store contents; an
/// all-masked history yields the projection bias.
template <class S>
UserEncoding<S> encode_user_full(const ParameterStore<S>& s, const UserHistory& hist,
                                 const ModelConfig& cfg) {
  detail::SideCache<S> c;
  detail::side_forward(detail::user_side(s), cfg.use_rating_info, cfg.pooling,
                       hist.item_ids, hist.rating_ids, hist.mask, c);
  UserEncoding<S> out;
  out.latent = s.value("user.proj.W") * c.context + s.value("user.proj.b").col(0);
  out.context = std::move(c.context);
  out.weights = std::move(c.weights);
  return out;
}

template <class S>
Vec<S> encode_user(const ParameterStore<S>& s, const UserHistory& hist,
                   const ModelConfig& cfg) {
  return encode_user_full(s, hist, cfg).latent;
}

/// CNN document branch alone (multi-window conv, masked max-over-time pool,
/// FC + ReLU). An all-masked document yields ReLU of the FC bias.
template <class S>
Vec<S> encode_document_cnn(const ParameterStore<S>& s, const ItemDocument& doc,
                           const ModelConfig& cfg) {
  detail::DocCache<S> c;
  detail::doc_forward(s, cfg, doc, c);
  return c.doc_vec;
}

template <class S>
struct ItemEncoding {
  Vec<S> latent;
  Vec<S> doc_vec;
  Vec<S> rater_context;
  Vec<S> rater_weights;
};

/// Latent item vector: concat(document branch, rater branch) -> affine+ReLU.
/// Disabled branches contribute zeros.
template <class S>
ItemEncoding<S> encode_item_full(const ParameterStore<S>& s, const ItemProfile& profile,
                                 const ModelConfig& cfg) {
  ItemEncoding<S> out;
  Vec<S> concat = Vec<S>::Zero(cfg.d_doc + cfg.d_user);
  out.doc_vec = Vec<S>::Zero(cfg.d_doc);
  out.rater_context = Vec<S>::Zero(cfg.d_user);
  out.rater_weights = Vec<S>::Zero(profile.length());
  if (cfg.use_doc_info) {
    detail::DocCache<S> dc;
    detail::doc_forward(s, cfg, profile.document, dc);
    out.doc_vec = std::move(dc.doc_vec);
    concat.head(cfg.d_doc) = out.doc_vec;
  }
  if (cfg.use_user_info_in_item) {
    detail::SideCache<S> rc;
    detail::side_forward(detail::item_side(s), cfg.use_rating_info, cfg.pooling,
                         profile.user_ids, profile.rating_ids, profile.mask, rc);
    out.rater_context = std::move(rc.context);
    out.rater_weights = std::move(rc.weights);
    concat.tail(cfg.d_user) = out.rater_context;
  }
  out.latent =
      (s.value("item.proj.W") * concat + s.value("item.proj.b").col(0)).cwiseMax(S{0});
  return out;
}

template <class S>
Vec<S> encode_item(const ParameterStore<S>& s, const ItemProfile& profile,
                   const ModelConfig& cfg) {
  return encode_item_full(s, profile, cfg).latent;
}

/// encode_item with the document branch already computed. Item text is
/// static, so online refreshes reuse the cached doc_vec and rerun only the
/// rater branch and the combine layer.
template <class S>
Vec<S> encode_item_with_doc_vec(const ParameterStore<S>& s, const Vec<S>& doc_vec,
                                const ItemProfile& profile, const ModelConfig& cfg) {
  Vec<S> concat = Vec<S>::Zero(cfg.d_doc + cfg.d_user);
  if (cfg.use_doc_info) concat.head(cfg.d_doc) = doc_vec;
  if (cfg.use_user_info_in_item) {
    detail::SideCache<S> rc;
    detail::side_forward(detail::item_side(s), cfg.use_rating_info, cfg.pooling,
                         profile.user_ids, profile.rating_ids, profile.mask, rc);
    concat.tail(cfg.d_user) = rc.context;
  }
  return (s.value("item.proj.W") * concat + s.value("item.proj.b").col(0)).cwiseMax(S{0});
}

/// MLP head without the task transform (the raw linear output).
template <class S>
S predict_raw(const ParameterStore<S>& s, const Vec<S>& user_latent,
              const Vec<S>& item_latent, const ModelConfig& cfg) {
  detail::RowCache<S> c;
  return detail::mlp_forward(s, cfg, user_latent, item_latent, c);
}

/// Score for one (user latent, item latent) pair: linear output for the
/// rating task, sigmoid for ranking.
template <class S>
S predict(const ParameterStore<S>& s, const Vec<S>& user_latent, const Vec<S>& item_latent,
          const ModelConfig& cfg) {
  const S z = predict_raw(s, user_latent, item_latent, cfg);
  return cfg.task == Task::ranking ? sigmoid(z) : z;
}

template <class S>
S loss_rating(S pred, S target) {
  const S d = pred - target;
  return d * d;
}

/// Binary cross-entropy on an already-sigmoided probability.
template <class S>
S loss_ranking(S p, S label) {
  const S lo = static_cast<S>(kProbClamp);
  const S pc = std::min(S{1} - lo, std::max(lo, p));
  return -(label * std::log(pc) + (S{1} - label) * std::log(S{1} - pc));
}

namespace detail {

template <class S>
S row_loss_and_dz(const ModelConfig& cfg, S z, float target, S inv_batch, S* dz) {
  if (cfg.task == Task::rating) {
    const S t = static_cast<S>(target);
    if (dz) *dz = S{2} * (z - t) * inv_batch;
    return loss_rating(z, t);
  }
  const S y = static_cast<S>(target);
  const S p = sigmoid(z);
  const S lo = static_cast<S>(kProbClamp);
  if (dz) *dz = (p > lo && p < S{1} - lo) ? (p - y) * inv_batch : S{0};
  return loss_ranking(p, y);
}

}  // namespace detail

/// Mean loss over the batch; forward only.
template <class S>
S forward_loss(const ParameterStore<S>& s, const std::vector<UserHistory>& hists,
               const std::vector<ItemProfile>& profiles, const VecF& targets,
               const ModelConfig& cfg) {
  if (hists.size() != profiles.size() ||
      hists.size() != static_cast<std::size_t>(targets.size()))
    throw ValidationError("forward_loss: batch component sizes disagree");
  if (hists.empty()) throw ValidationError("forward_loss: empty batch");
  S total{0};
  detail::RowCache<S> c;
  for (std::size_t r = 0; r < hists.size(); ++r) {
    const S z = detail::row_forward(s, cfg, hists[r], profiles[r], c);
    total += detail::row_loss_and_dz<S>(cfg, z, targets(static_cast<Eigen::Index>(r)),
                                        S{1}, nullptr);
  }
  return total / static_cast<S>(hists.size());
}

/// Mean loss over the batch; accumulates analytic gradients of that mean into
/// the store. Gradients of parameters a batch never touches stay unchanged
/// (zero if the caller zeroed them).
template <class S>
S forward_backward(ParameterStore<S>& s, const std::vector<UserHistory>& hists,
                   const std::vector<ItemProfile>& profiles, const VecF& targets,
                   const ModelConfig& cfg) {
  if (hists.size() != profiles.size() ||
      hists.size() != static_cast<std::size_t>(targets.size()))
    throw ValidationError("forward_backward: batch component sizes disagree");
  if (hists.empty()) throw ValidationError("forward_backward: empty batch");
  const S inv_b = S{1} / static_cast<S>(hists.size());
  S total{0};
  detail::RowCache<S> c;
  for (std::size_t r = 0; r < hists.size(); ++r) {
    const S z = detail::row_forward(s, cfg, hists[r], profiles[r], c);
    S dz{0};
    total += detail::row_loss_and_dz<S>(cfg, z, targets(static_cast<Eigen::Index>(r)),
                                        inv_b, &dz);
    detail::row_backward(s, cfg, hists[r], profiles[r], c, dz);
  }
  return total * inv_b;
}

/// Smallest distance to a ReLU kink or max-pool tie across the batch, as seen
/// by the forward pass. Central differences are a valid derivative oracle
/// only where the loss is smooth on the +-eps interval, so gradient-check
/// fixtures redraw cases whose margin is too small.
template <class S>
double smoothness_margin(const ParameterStore<S>& s,
                         const std::vector<UserHistory>& hists,
                         const std::vector<ItemProfile>& profiles,
                         const ModelConfig& cfg) {
  double margin = std::numeric_limits<double>::infinity();
  auto see = [&](double v) { margin = std::min(margin, v); };
  auto scan_relu = [&](const Mat<S>& pre, const MaskVec* mask) {
    for (Eigen::Index j = 0; j < pre.cols(); ++j) {
      if (mask && !(*mask)[static_cast<std::size_t>(j)]) continue;
      for (Eigen::Index i = 0; i < pre.rows(); ++i)
        see(std::abs(static_cast<double>(pre(i, j))));
    }
  };
  auto scan_side = [&](const detail::SideCache<S>& sc, const MaskVec& mask) {
    if (cfg.use_rating_info) scan_relu(sc.fuse_pre, &mask);
    if (cfg.pooling == Pooling::attention) {
      scan_relu(sc.attn_pre, &mask);
    } else if (cfg.pooling == Pooling::max) {
      // gap between the winning slot and the runner-up, per coordinate
      for (Eigen::Index dd = 0; dd < sc.entries.rows(); ++dd) {
        S best = std::numeric_limits<S>::lowest(), second = best;
        int n = 0;
        for (Eigen::Index j = 0; j < sc.entries.cols(); ++j) {
          if (!mask[static_cast<std::size_t>(j)]) continue;
          ++n;
          const S v = sc.entries(dd, j);
          if (v > best) {
            second = best;
            best = v;
          } else if (v > second) {
            second = v;
          }
        }
        if (n >= 2) see(static_cast<double>(best - second));
      }
    }
  };

  detail::RowCache<S> c;
  for (std::size_t r = 0; r < hists.size(); ++r) {
    detail::row_forward(s, cfg, hists[r], profiles[r], c);
    scan_side(c.user, hists[r].mask);
    if (cfg.use_user_info_in_item) scan_side(c.raters, profiles[r].mask);
    if (cfg.use_doc_info) {
      const auto& doc = profiles[r].document;
      std::vector<i32> prefix(doc.token_ids.size() + 1, 0);
      for (std::size_t i = 0; i < doc.token_ids.size(); ++i)
        prefix[i + 1] = prefix[i] + (doc.mask[i] ? 1 : 0);
      for (std::size_t si = 0; si < cfg.window_sizes.size(); ++si) {
        const int h = cfg.window_sizes[si];
        const Mat<S>& pre = c.doc.pre[si];
        for (Eigen::Index f = 0; f < pre.rows(); ++f) {
          S best = std::numeric_limits<S>::lowest(), second = best;
          int n = 0;
          for (Eigen::Index i = 0; i < pre.cols(); ++i) {
            if (prefix[static_cast<std::size_t>(i) + static_cast<std::size_t>(h)] -
                    prefix[static_cast<std::size_t>(i)] ==
                0)
              continue;
            see(std::abs(static_cast<double>(pre(f, i))));
            ++n;
            const S act = std::max(pre(f, i), S{0});
            if (act > best) {
              second = best;
              best = act;
            } else if (act > second) {
              second = act;
            }
          }
          if (n >= 2 && best > S{0}) see(static_cast<double>(best - second));
        }
      }
      for (Eigen::Index i = 0; i < c.doc.fc_pre.size(); ++i)
        see(std::abs(static_cast<double>(c.doc.fc_pre(i))));
    }
    for (Eigen::Index i = 0; i < c.item_pre.size(); ++i)
      see(std::abs(static_cast<double>(c.item_pre(i))));
    for (std::size_t k = 0; k + 1 < c.mlp_pre.size(); ++k)
      for (Eigen::Index i = 0; i < c.mlp_pre[k].size(); ++i)
        see(std::abs(static_cast<double>(c.mlp_pre[k](i))));
  }
  return margin;
}

}  // namespace harc::model
