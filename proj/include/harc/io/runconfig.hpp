#pragma once

#include "harc/model/config.hpp"
#include "harc/types.hpp"

#include <map>
#include <string>

namespace harc::io {

/// Everything a run needs: model hyperparameters plus data paths, seeds, and
/// training knobs. Parsed from a line-oriented "key = value" file; CLI flags
/// override file values; unknown keys are an error. Every command writes the
/// fully resolved config next to its outputs.
struct RunConfig {
  model::ModelConfig model;

  std::string ratings_path;
  std::string docs_path;
  std::string stopwords_path;
  std::string wordvecs_path;
  std::string ratings_format = "auto";  // auto | movielens_dat | csv

  u64 seed = 1;
  int epochs = 100;
  int patience = 10;  // <= 0 disables early stopping
  double lr = 0.001;
  int batch_size = 256;
  int train_negatives = 4;

  i32 v_max = 8000;
  i32 min_user_ratings = 3;
  i32 n_negatives = 99;
  double frac_train = 0.8;
  double frac_valid = 0.1;

  int k = 10;

  void apply(const std::string& key, const std::string& value);
  std::string resolved_text() const;
};

/// Parses `path` over `base`. Lines are "key = value"; '#' starts a comment;
/// blank lines are ignored.
RunConfig parse_runconfig_file(const std::string& path, RunConfig base = {});

/// Applies "key=value" pairs (CLI --set style) over `base`.
RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& kv);

void write_resolved_config(const std::string& path, const RunConfig& cfg);

}  // namespace harc::io
