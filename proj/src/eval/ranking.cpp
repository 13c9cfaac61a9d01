#include "harc/eval/ranking.hpp"

#include "harc/error.hpp"
#include "harc/model/encoders.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>

namespace harc::eval {

RankingReport rank_cases(const std::vector<corpus::LeaveOneOutCase>& cases,
                         const Scorer& scorer, int k) {
  if (cases.empty()) throw ValidationError("rank_cases: no cases");
  RankingReport report;
  report.cases.reserve(cases.size());
  for (const auto& cs : cases) {
    RankedCase rc;
    rc.user = cs.user;
    rc.candidates.reserve(cs.negatives.size() + 1);
    rc.candidates.push_back(cs.positive);
    for (i32 n : cs.negatives) rc.candidates.push_back(n);
    rc.scores.reserve(rc.candidates.size());
    for (i32 item : rc.candidates) rc.scores.push_back(scorer(cs.user, item));
    rank_case(rc);
    report.cases.push_back(std::move(rc));
  }
  report.hr = hit_ratio_at_k(report.cases, k);
  report.ndcg = ndcg_at_k(report.cases, k);
  return report;
}

ModelScorer::ModelScorer(const numerics::ParameterStore<float>& store,
                         const model::ModelConfig& cfg, const io::PreparedData& data)
    : store_(store), cfg_(cfg) {
  corpus::HistoryIndex index(data.train);
  user_latents_.reserve(static_cast<std::size_t>(data.n_users()));
  for (i32 u = 0; u < data.n_users(); ++u)
    user_latents_.push_back(model::encode_user(
        store_, corpus::build_user_history(index, u, std::nullopt, cfg_.history_len), cfg_));
  item_latents_.reserve(static_cast<std::size_t>(data.n_items()));
  for (i32 i = 0; i < data.n_items(); ++i)
    item_latents_.push_back(model::encode_item(
        store_,
        corpus::build_item_profile(index, i, std::nullopt, data.docs, cfg_.history_len),
        cfg_));
}

const VecF& ModelScorer::user_latent(i32 user) const {
  if (user < 0 || user >= static_cast<i32>(user_latents_.size()))
    throw LookupError("scorer: unknown user index " + std::to_string(user));
  return user_latents_[static_cast<std::size_t>(user)];
}

const VecF& ModelScorer::item_latent(i32 item) const {
  if (item < 0 || item >= static_cast<i32>(item_latents_.size()))
    throw LookupError("scorer: unknown item index " + std::to_string(item));
  return item_latents_[static_cast<std::size_t>(item)];
}

double ModelScorer::operator()(i32 user, i32 item) const {
  return static_cast<double>(
      model::predict(store_, user_latent(user), item_latent(item), cfg_));
}

Scorer popularity_baseline(const corpus::Dataset& train) {
  auto counts = std::make_shared<std::vector<i64>>(
      static_cast<std::size_t>(train.n_items), i64{0});
  for (const auto& r : train.interactions) ++(*counts)[static_cast<std::size_t>(r.item)];
  return [counts](i32, i32 item) {
    if (item < 0 || item >= static_cast<i32>(counts->size())) return 0.0;
    return static_cast<double>((*counts)[static_cast<std::size_t>(item)]);
  };
}

double evaluate_rating(const numerics::ParameterStore<float>& store,
                       const model::ModelConfig& cfg, const io::PreparedData& data,
                       const corpus::Dataset& split) {
  if (split.interactions.empty())
    throw ValidationError("evaluate_rating: empty split");
  corpus::HistoryIndex index(data.train);
  std::vector<VecF> user_latents(static_cast<std::size_t>(data.n_users()));
  std::vector<u8> user_done(static_cast<std::size_t>(data.n_users()), 0);
  std::vector<VecF> item_latents(static_cast<std::size_t>(data.n_items()));
  std::vector<u8> item_done(static_cast<std::size_t>(data.n_items()), 0);

  std::vector<double> preds, truths;
  preds.reserve(split.interactions.size());
  truths.reserve(split.interactions.size());
  for (const auto& r : split.interactions) {
    auto& ul = user_latents[static_cast<std::size_t>(r.user)];
    if (!user_done[static_cast<std::size_t>(r.user)]) {
      ul = model::encode_user(
          store, corpus::build_user_history(index, r.user, std::nullopt, cfg.history_len),
          cfg);
      user_done[static_cast<std::size_t>(r.user)] = 1;
    }
    auto& il = item_latents[static_cast<std::size_t>(r.item)];
    if (!item_done[static_cast<std::size_t>(r.item)]) {
      il = model::encode_item(
          store,
          corpus::build_item_profile(index, r.item, std::nullopt, data.docs,
                                     cfg.history_len),
          cfg);
      item_done[static_cast<std::size_t>(r.item)] = 1;
    }
    const float raw = model::predict_raw(store, ul, il, cfg);
    preds.push_back(static_cast<double>(model::clamp_rating(raw)));
    truths.push_back(static_cast<double>(r.rating));
  }
  return rmse(preds, truths);
}

void write_case_dump(const std::string& path, const RankingReport& report, int k,
                     const std::vector<std::string>* user_raw,
                     const std::vector<std::string>* item_raw) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write case dump: " + path);
  auto uid = [&](i32 u) {
    return user_raw ? (*user_raw)[static_cast<std::size_t>(u)] : std::to_string(u);
  };
  auto iid = [&](i32 i) {
    return item_raw ? (*item_raw)[static_cast<std::size_t>(i)] : std::to_string(i);
  };
  for (const auto& c : report.cases) {
    // top-k candidates by (score desc, id asc)
    std::vector<std::size_t> order(c.candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (c.scores[a] != c.scores[b]) return c.scores[a] > c.scores[b];
      return c.candidates[a] < c.candidates[b];
    });
    out << uid(c.user) << "\t" << iid(c.candidates[0]) << "\t" << c.rank_of_positive;
    const std::size_t top = std::min(order.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < top; ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.9g", c.scores[order[i]]);
      out << "\t" << iid(c.candidates[order[i]]) << ":" << buf;
    }
    out << "\n";
  }
}

}  // namespace harc::eval
