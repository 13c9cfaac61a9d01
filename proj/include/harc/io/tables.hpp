#pragma once

#include "harc/corpus/dataset.hpp"
#include "harc/corpus/text.hpp"
#include "harc/corpus/vectors.hpp"
#include "harc/model/config.hpp"
#include "harc/types.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace harc::io {

// Flat binary tables ("HART"), the prepared-dataset container. Same shape as
// the checkpoint format plus a per-table dtype byte (0 = f32, 1 = i64):
//   magic "HART" | version u32 | table count u32
//   per table: name length u32, name, dtype u8, rank u32, dims u64 each,
//              row-major little-endian payload
//   trailing CRC-32 of everything prior.

inline constexpr u32 kTablesVersion = 1;

using MatI64 =
    Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Table {
  std::variant<MatF, MatI64> data;
  int rank = 2;
};

using TableFile = std::map<std::string, Table>;

void save_tables(const std::string& path, const TableFile& tables);
TableFile load_tables(const std::string& path);

/// Everything training, evaluation, and serving read back from a prepared
/// directory.
struct PreparedData {
  model::Task task = model::Task::rating;
  u64 prep_seed = 0;
  i32 n_negatives = 0;
  i32 doc_len = 0;

  corpus::Dataset train, valid, test;  // valid/test empty for ranking task
  std::vector<corpus::LeaveOneOutCase> test_cases, val_cases;
  std::vector<corpus::ItemDocument> docs;  // per dense item id
  corpus::WordEmbeddingTable word_vectors;
  corpus::Vocabulary vocab;  // id maps + idf (stopwords folded into encoding)

  i32 n_users() const { return train.n_users; }
  i32 n_items() const { return train.n_items; }
};

/// Writes prepared.bin, users.map, items.map, vocab.txt and manifest.txt into
/// `dir` (created if needed). The manifest records task metadata and the crc32
/// of every file, and is byte-identical across reruns with equal inputs.
void save_prepared(const std::string& dir, const PreparedData& data);

PreparedData load_prepared(const std::string& dir);

}  // namespace harc::io
