#pragma once

#include "harc/types.hpp"

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace harc::corpus {

/// Lowercase, split on non-alphanumeric runs. ASCII only: any byte outside
/// [a-z0-9] after lowercasing acts as a separator.
std::vector<std::string> tokenize(std::string_view text);

/// Token-id space: 0 and 1 are structural (padding / out-of-vocabulary) and
/// never correspond to real words; real words occupy [2, 2 + size()).
struct Vocabulary {
  static constexpr i32 kPad = 0;
  static constexpr i32 kOov = 1;

  std::unordered_map<std::string, i32> word_to_id;
  std::vector<std::string> id_to_word;  // index = id - 2
  std::vector<double> idf;              // ln(N / df), index = id - 2
  std::unordered_set<std::string> stopwords;

  i32 size() const { return static_cast<i32>(id_to_word.size()); }
  /// Embedding-table row count (words + PAD + OOV).
  i32 rows() const { return size() + 2; }
  i32 id_of(const std::string& word) const;
  const std::string& word_of(i32 id) const;
};

/// Scores every non-stopword as (total corpus count) * ln(N_docs / df) and
/// keeps the `v_max` best, ties broken lexicographically. Ids are assigned in
/// lexicographic order of the kept words.
Vocabulary build_vocabulary(const std::vector<std::string>& docs,
                            const std::unordered_set<std::string>& stopwords,
                            i32 v_max);

/// Fixed-length token-id sequence for one item description.
struct ItemDocument {
  std::vector<i32> token_ids;  // length rho, PAD-filled past the text
  MaskVec mask;                // mask[i] = 1 iff i < min(raw_length, rho)
  i32 raw_length = 0;          // real-token count before truncation
};

/// Stopwords are dropped, in-vocabulary tokens keep their ids, other tokens
/// become OOV; the stream is truncated to rho and PAD-filled.
ItemDocument encode_document(std::string_view text, const Vocabulary& vocab, i32 rho);

/// Inverse of encode_document up to OOV: PAD slots are dropped and OOV slots
/// come back as `oov_marker`.
std::vector<std::string> decode_document(const ItemDocument& doc, const Vocabulary& vocab,
                                         const std::string& oov_marker = "<oov>");

}  // namespace harc::corpus
