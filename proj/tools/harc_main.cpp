// harc: train, evaluate, and serve the hybrid attention recommender.
//
// Subcommands: prep, train, eval, recommend, refresh. Every subcommand is
// deterministic under a fixed seed and writes its fully resolved
// configuration next to its outputs. Exit codes: 0 success, 2 usage error,
// 3 data/validation error, 4 numeric failure, 5 I/O error.

#include "harc/cli/commands.hpp"
#include "harc/error.hpp"
#include "harc/io/runconfig.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

harc::io::RunConfig resolve(const CommonArgs& args) {
  harc::io::RunConfig cfg;
  if (!args.config_path.empty())
    cfg = harc::io::parse_runconfig_file(args.config_path, cfg);
  return harc::io::apply_overrides(cfg, args.overrides);  // flags win
}

void add_config_flag(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value configuration file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid attention recommender toolkit"};
  app.require_subcommand(1);

  CommonArgs prep_args, train_args;
  std::string out_dir, data_dir, checkpoint, user;
  int k = 10;
  std::vector<std::string> additions;

  auto* prep = app.add_subcommand("prep", "build a prepared dataset directory");
  add_config_flag(prep, prep_args);
  std::string p_ratings, p_docs, p_stop, p_vecs, p_task, p_seed;
  prep->add_option("--ratings", p_ratings, "ratings file (movielens .dat or .csv)");
  prep->add_option("--docs", p_docs, "item descriptions: item<TAB>text per line");
  prep->add_option("--stopwords", p_stop, "stopword file, one word per line");
  prep->add_option("--wordvecs", p_vecs, "pretrained word vectors, 'word v1 .. vl'");
  prep->add_option("--out", out_dir, "output directory")->required();
  prep->add_option("--seed", p_seed, "prep seed");
  prep->add_option("--task", p_task, "rating | ranking")
      ->check(CLI::IsMember({"rating", "ranking"}));

  auto* train = app.add_subcommand("train", "train a model on a prepared directory");
  add_config_flag(train, train_args);
  std::string t_seed, t_epochs, t_patience, t_lr, t_batch, t_pool, t_embed;
  bool no_rating = false, no_user = false, no_doc = false, no_pretrained = false;
  train->add_option("--data", data_dir, "prepared directory")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--seed", t_seed, "training seed");
  train->add_option("--epochs", t_epochs, "max epochs");
  train->add_option("--patience", t_patience, "early-stop patience (<=0 disables)");
  train->add_option("--lr", t_lr, "Adam learning rate");
  train->add_option("--batch-size", t_batch, "mini-batch size (<=256)");
  train->add_flag("--no-rating-info", no_rating, "ignore rating values in histories");
  train->add_option("--pooling", t_pool, "attention | mean | max")
      ->check(CLI::IsMember({"attention", "mean", "max"}));
  train->add_flag("--no-user-info", no_user, "drop the rater branch of the item encoder");
  train->add_flag("--no-doc-info", no_doc, "drop the document branch of the item encoder");
  train->add_option("--embed-size", t_embed, "word embedding size")
      ->check(CLI::IsMember({"100", "200", "300"}));
  train->add_flag("--no-pretrained", no_pretrained, "random word-vector init");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test data");
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--data", data_dir, "prepared directory")->required();
  eval->add_option("--out", out_dir, "output directory (metrics, case dump)");
  eval->add_option("--k", k, "ranking cutoff");

  auto* rec = app.add_subcommand("recommend", "top-k recommendations for a user");
  rec->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  rec->add_option("--data", data_dir, "prepared directory")->required();
  rec->add_option("--user", user, "raw user id")->required();
  rec->add_option("--k", k, "list length");

  auto* refresh = app.add_subcommand("refresh", "add interactions, refresh, recommend");
  refresh->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  refresh->add_option("--data", data_dir, "prepared directory")->required();
  refresh->add_option("--user", user, "raw user id")->required();
  refresh->add_option("--add", additions, "new interaction item:rating:ts (repeatable)");
  refresh->add_option("--k", k, "list length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (prep->parsed()) {
      if (!p_ratings.empty()) prep_args.overrides["ratings"] = p_ratings;
      if (!p_docs.empty()) prep_args.overrides["docs"] = p_docs;
      if (!p_stop.empty()) prep_args.overrides["stopwords"] = p_stop;
      if (!p_vecs.empty()) prep_args.overrides["wordvecs"] = p_vecs;
      if (!p_seed.empty()) prep_args.overrides["seed"] = p_seed;
      if (!p_task.empty()) prep_args.overrides["task"] = p_task;
      harc::cli::cmd_prep(resolve(prep_args), out_dir);
    } else if (train->parsed()) {
      if (!t_seed.empty()) train_args.overrides["seed"] = t_seed;
      if (!t_epochs.empty()) train_args.overrides["epochs"] = t_epochs;
      if (!t_patience.empty()) train_args.overrides["patience"] = t_patience;
      if (!t_lr.empty()) train_args.overrides["lr"] = t_lr;
      if (!t_batch.empty()) train_args.overrides["batch_size"] = t_batch;
      if (!t_pool.empty()) train_args.overrides["pooling"] = t_pool;
      if (!t_embed.empty()) train_args.overrides["word_dim"] = t_embed;
      if (no_rating) train_args.overrides["use_rating_info"] = "false";
      if (no_user) train_args.overrides["use_user_info_in_item"] = "false";
      if (no_doc) train_args.overrides["use_doc_info"] = "false";
      if (no_pretrained) train_args.overrides["use_pretrained_words"] = "false";
      harc::cli::cmd_train(resolve(train_args), data_dir, out_dir);
    } else if (eval->parsed()) {
      harc::cli::cmd_eval(checkpoint, data_dir, k, out_dir.empty() ? "." : out_dir);
    } else if (rec->parsed()) {
      harc::cli::cmd_recommend(checkpoint, data_dir, user, k);
    } else if (refresh->parsed()) {
      harc::cli::cmd_refresh(checkpoint, data_dir, user, additions, k);
    }
  } catch (const harc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
