#pragma once

#include "harc/io/runconfig.hpp"
#include "harc/types.hpp"

#include <string>
#include <vector>

namespace harc::cli {

/// Full preprocessing pipeline: ratings + documents + stopwords + word
/// vectors in, prepared directory (binary tables, id maps, vocab, manifest,
/// resolved config) out.
void cmd_prep(const io::RunConfig& cfg, const std::string& out_dir);

/// Trains on a prepared directory; writes checkpoint, metrics, log, and the
/// resolved config into out_dir.
void cmd_train(const io::RunConfig& cfg, const std::string& data_dir,
               const std::string& out_dir);

/// Evaluates a checkpoint on its task's test data; writes metrics.txt (and
/// cases.tsv for ranking) into out_dir and prints the summary.
void cmd_eval(const std::string& checkpoint_path, const std::string& data_dir, int k,
              const std::string& out_dir);

/// Prints the top-k recommendations for a user (raw id). Unknown users get
/// the cold-start list.
void cmd_recommend(const std::string& checkpoint_path, const std::string& data_dir,
                   const std::string& user_raw, int k);

/// Applies "item:rating:ts" additions to the user's history, then prints the
/// refreshed top-k. Model parameters stay frozen.
void cmd_refresh(const std::string& checkpoint_path, const std::string& data_dir,
                 const std::string& user_raw, const std::vector<std::string>& additions,
                 int k);

}  // namespace harc::cli
