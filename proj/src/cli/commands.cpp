#include "harc/cli/commands.hpp"

#include "harc/corpus/dataset.hpp"
#include "harc/corpus/histories.hpp"
#include "harc/corpus/text.hpp"
#include "harc/corpus/vectors.hpp"
#include "harc/error.hpp"
#include "harc/eval/ranking.hpp"
#include "harc/io/checkpoint.hpp"
#include "harc/io/crc32.hpp"
#include "harc/io/tables.hpp"
#include "harc/serve/cache.hpp"
#include "harc/train/loop.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unordered_map>
#include <unordered_set>

namespace harc::cli {

namespace {

corpus::RatingsFormat resolve_format(const io::RunConfig& cfg) {
  if (cfg.ratings_format == "movielens_dat") return corpus::RatingsFormat::movielens_dat;
  if (cfg.ratings_format == "csv") return corpus::RatingsFormat::csv;
  if (cfg.ratings_format == "auto") {
    if (cfg.ratings_path.ends_with(".csv")) return corpus::RatingsFormat::csv;
    return corpus::RatingsFormat::movielens_dat;
  }
  throw UsageError("unknown ratings_format: " + cfg.ratings_format);
}

std::unordered_map<std::string, std::string> read_docs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open documents file: " + path);
  std::unordered_map<std::string, std::string> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("documents line " + std::to_string(line_no) +
                       ": expected 'item<TAB>text'");
    docs[line.substr(0, tab)] = line.substr(tab + 1);
  }
  if (docs.empty()) throw ValidationError("documents file is empty: " + path);
  return docs;
}

std::unordered_set<std::string> read_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

}  // namespace

void cmd_prep(const io::RunConfig& cfg, const std::string& out_dir) {
  if (cfg.ratings_path.empty()) throw UsageError("prep: --ratings is required");
  if (cfg.docs_path.empty()) throw UsageError("prep: --docs is required");
  if (cfg.stopwords_path.empty()) throw UsageError("prep: --stopwords is required");
  if (cfg.wordvecs_path.empty()) throw UsageError("prep: --wordvecs is required");

  corpus::Dataset raw = corpus::parse_ratings(cfg.ratings_path, resolve_format(cfg));
  auto raw_docs = read_docs_file(cfg.docs_path);
  auto stopwords = read_stopwords(cfg.stopwords_path);

  std::vector<u8> has_doc(static_cast<std::size_t>(raw.n_items), 0);
  for (i32 i = 0; i < raw.n_items; ++i)
    has_doc[static_cast<std::size_t>(i)] = raw_docs.count(raw.item_raw_ids[i]) ? 1 : 0;
  corpus::Dataset ds = corpus::filter_dataset(raw, cfg.min_user_ratings, has_doc);

  std::vector<std::string> doc_texts(static_cast<std::size_t>(ds.n_items));
  for (i32 i = 0; i < ds.n_items; ++i)
    doc_texts[static_cast<std::size_t>(i)] = raw_docs.at(ds.item_raw_ids[i]);

  io::PreparedData out;
  out.task = cfg.model.task;
  out.prep_seed = cfg.seed;
  out.doc_len = cfg.model.doc_len;
  out.vocab = corpus::build_vocabulary(doc_texts, stopwords, cfg.v_max);
  out.docs.reserve(doc_texts.size());
  for (const auto& text : doc_texts)
    out.docs.push_back(corpus::encode_document(text, out.vocab, cfg.model.doc_len));
  out.word_vectors = corpus::load_word_vectors(cfg.wordvecs_path, out.vocab,
                                               cfg.model.word_dim, cfg.seed);

  if (cfg.model.task == model::Task::rating) {
    auto split = corpus::split_rating_task(
        ds, {cfg.frac_train, cfg.frac_valid, 1.0 - cfg.frac_train - cfg.frac_valid},
        cfg.seed);
    out.train = std::move(split.train);
    out.valid = std::move(split.valid);
    out.test = std::move(split.test);
    out.n_negatives = 0;
  } else {
    auto split = corpus::split_leave_one_out(ds, cfg.n_negatives, cfg.seed, true);
    out.train = std::move(split.train);
    out.test_cases = std::move(split.test_cases);
    out.val_cases = std::move(split.val_cases);
    out.n_negatives = cfg.n_negatives;
    // the empty splits still need the id maps for readers
    out.valid.n_users = out.test.n_users = out.train.n_users;
    out.valid.n_items = out.test.n_items = out.train.n_items;
  }

  io::save_prepared(out_dir, out);
  io::write_resolved_config(out_dir + "/prep.cfg", cfg);
  std::cout << "prepared " << out.train.n_users << " users, " << out.train.n_items
            << " items, " << out.vocab.size() << " vocabulary words -> " << out_dir
            << "\n";
}

void cmd_train(const io::RunConfig& cfg, const std::string& data_dir,
               const std::string& out_dir) {
  if (!cfg.model.use_user_info_in_item && !cfg.model.use_doc_info)
    throw UsageError("--no-user-info and --no-doc-info cannot be combined: "
                     "the item encoder needs at least one branch");
  io::PreparedData data = io::load_prepared(data_dir);
  io::RunConfig resolved = cfg;
  resolved.model.task = data.task;  // the prepared split fixes the task

  train::TrainOptions opts;
  opts.max_epochs = resolved.epochs;
  opts.patience = resolved.patience;
  opts.lr = resolved.lr;
  opts.batch_size = resolved.batch_size;
  opts.train_negatives = resolved.train_negatives;
  opts.seed = resolved.seed;
  opts.out_dir = out_dir;

  std::filesystem::create_directories(out_dir);
  io::write_resolved_config(out_dir + "/train.cfg", resolved);
  auto report = train::train(resolved.model, data, opts);
  std::cout << "best epoch " << report.best_epoch << ", checkpoint "
            << report.checkpoint_path << "\n";
}

void cmd_eval(const std::string& checkpoint_path, const std::string& data_dir, int k,
              const std::string& out_dir) {
  io::Checkpoint ckpt = io::load_checkpoint(checkpoint_path);
  io::PreparedData data = io::load_prepared(data_dir);
  if (ckpt.n_users != data.n_users() || ckpt.n_items != data.n_items())
    throw ValidationError("checkpoint and prepared data disagree on user/item counts");
  std::filesystem::create_directories(out_dir);

  std::ofstream metrics(out_dir + "/metrics.txt", std::ios::binary | std::ios::trunc);
  if (!metrics) throw IoError("cannot write metrics.txt");
  char buf[96];
  if (ckpt.cfg.task == model::Task::rating) {
    const double r = eval::evaluate_rating(ckpt.store, ckpt.cfg, data, data.test);
    std::snprintf(buf, sizeof(buf), "rmse=%.9g\ncount=%zu\n", r,
                  data.test.interactions.size());
    metrics << buf;
    std::cout << buf;
  } else {
    eval::ModelScorer scorer(ckpt.store, ckpt.cfg, data);
    auto report = eval::rank_cases(data.test_cases, std::cref(scorer), k);
    std::snprintf(buf, sizeof(buf), "hr@%d=%.9g\nndcg@%d=%.9g\ncases=%zu\n", k, report.hr,
                  k, report.ndcg, report.cases.size());
    metrics << buf;
    std::cout << buf;
    eval::write_case_dump(out_dir + "/cases.tsv", report, k, &data.train.user_raw_ids,
                          &data.train.item_raw_ids);
  }
}

namespace {

serve::ProfileCache open_cache(const std::string& checkpoint_path,
                               const std::string& data_dir, io::PreparedData& data) {
  io::Checkpoint ckpt = io::load_checkpoint(checkpoint_path);
  data = io::load_prepared(data_dir);
  const u32 crc = io::crc32_of_file(checkpoint_path);
  return serve::ProfileCache(std::move(ckpt), data, crc);
}

i32 resolve_user(const io::PreparedData& data, serve::ProfileCache& cache,
                 const std::string& user_raw) {
  auto idx = data.train.user_index();
  auto it = idx.find(user_raw);
  if (it != idx.end()) return it->second;
  return cache.add_cold_user();  // unseen user: fresh cold history
}

void print_top_k(const serve::ProfileCache& cache, const io::PreparedData& data, i32 user,
                 int k) {
  auto top = cache.recommend_top_k(user, k);
  for (std::size_t i = 0; i < top.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", top[i].second);
    std::cout << (i + 1) << "\t"
              << data.train.item_raw_ids[static_cast<std::size_t>(top[i].first)] << "\t"
              << buf << "\n";
  }
}

}  // namespace

void cmd_recommend(const std::string& checkpoint_path, const std::string& data_dir,
                   const std::string& user_raw, int k) {
  io::PreparedData data;
  auto cache = open_cache(checkpoint_path, data_dir, data);
  const i32 user = resolve_user(data, cache, user_raw);
  print_top_k(cache, data, user, k);
}

void cmd_refresh(const std::string& checkpoint_path, const std::string& data_dir,
                 const std::string& user_raw, const std::vector<std::string>& additions,
                 int k) {
  io::PreparedData data;
  auto cache = open_cache(checkpoint_path, data_dir, data);
  const i32 user = resolve_user(data, cache, user_raw);

  auto item_idx = data.train.item_index();
  std::vector<corpus::Interaction> added;
  for (const auto& spec : additions) {
    // item:rating:ts, split from the right so raw item ids may contain ':'
    const std::size_t c2 = spec.rfind(':');
    const std::size_t c1 = c2 == std::string::npos ? c2 : spec.rfind(':', c2 - 1);
    if (c1 == std::string::npos || c2 == std::string::npos || c1 == 0)
      throw UsageError("--add expects item:rating:ts, got '" + spec + "'");
    const std::string item_raw = spec.substr(0, c1);
    corpus::Interaction r;
    r.user = user;
    auto parse_i64 = [&](const std::string& s) {
      i64 v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size())
        throw UsageError("--add expects numeric rating and ts, got '" + spec + "'");
      return v;
    };
    const i64 rating = parse_i64(spec.substr(c1 + 1, c2 - c1 - 1));
    if (rating < 1 || rating > 5)
      throw ValidationError("--add rating outside [1,5]: " + spec);
    r.rating = static_cast<i32>(rating);
    r.ts = parse_i64(spec.substr(c2 + 1));
    auto it = item_idx.find(item_raw);
    if (it == item_idx.end()) throw LookupError("unknown item id: " + item_raw);
    r.item = it->second;
    added.push_back(r);
  }

  cache.refresh_user(user, added);
  print_top_k(cache, data, user, k);
}

}  // namespace harc::cli
