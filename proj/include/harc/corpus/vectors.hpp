#pragma once

#include "harc/corpus/text.hpp"
#include "harc/types.hpp"

#include <string>

namespace harc::corpus {

/// Row-per-token dense word vectors: row 0 is PAD (all zero, never trained),
/// row 1 is OOV, rows 2.. follow vocabulary ids.
struct WordEmbeddingTable {
  MatF rows;  // (vocab.rows()) x l
  i32 dim() const { return static_cast<i32>(rows.cols()); }
};

/// Reads a textual "word v1 .. vl" file. Vocabulary words found in the file
/// get its vector verbatim; missing words and the OOV row are drawn from
/// uniform(-scale, scale) per-row streams under `seed`; PAD stays zero.
WordEmbeddingTable load_word_vectors(const std::string& path, const Vocabulary& vocab,
                                     i32 l, u64 seed, double init_scale = 0.05);

/// Fully random table (the --no-pretrained path); PAD stays zero.
WordEmbeddingTable random_word_vectors(const Vocabulary& vocab, i32 l, u64 seed,
                                       double init_scale = 0.05);

}  // namespace harc::corpus
