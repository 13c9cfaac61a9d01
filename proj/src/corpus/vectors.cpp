#include "harc/corpus/vectors.hpp"

#include "harc/error.hpp"
#include "harc/rng.hpp"

#include <cstdlib>
#include <fstream>
#include <vector>

namespace harc::corpus {

namespace {

void fill_random_row(MatF& rows, i32 row, u64 seed, double scale) {
  SplitMix64 rng(rng_combine(seed, static_cast<u64>(row)));
  for (i32 c = 0; c < rows.cols(); ++c)
    rows(row, c) = static_cast<float>(rng.uniform(-scale, scale));
}

}  // namespace

WordEmbeddingTable load_word_vectors(const std::string& path, const Vocabulary& vocab,
                                     i32 l, u64 seed, double init_scale) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word-vector file: " + path);

  WordEmbeddingTable table;
  table.rows = MatF::Zero(vocab.rows(), l);
  std::vector<u8> found(static_cast<std::size_t>(vocab.rows()), 0);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t sp = line.find_first_of(" \t");
    if (sp == std::string::npos)
      throw ParseError("word-vector line " + std::to_string(line_no) + ": no components");
    std::string word = line.substr(0, sp);
    auto it = vocab.word_to_id.find(word);

    const char* p = line.c_str() + sp;
    i32 parsed = 0;
    std::vector<float> vals(static_cast<std::size_t>(l));
    while (true) {
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == '\0') break;
      char* end = nullptr;
      float v = std::strtof(p, &end);
      if (end == p)
        throw ParseError("word-vector line " + std::to_string(line_no) +
                         ": bad component near '" + std::string(p).substr(0, 12) + "'");
      if (parsed < l) vals[static_cast<std::size_t>(parsed)] = v;
      ++parsed;
      p = end;
    }
    if (parsed != l)
      throw ParseError("word-vector line " + std::to_string(line_no) + ": expected " +
                       std::to_string(l) + " components, got " + std::to_string(parsed));
    if (it != vocab.word_to_id.end()) {
      for (i32 c = 0; c < l; ++c) table.rows(it->second, c) = vals[static_cast<std::size_t>(c)];
      found[static_cast<std::size_t>(it->second)] = 1;
    }
  }

  fill_random_row(table.rows, Vocabulary::kOov, seed, init_scale);
  for (i32 id = 2; id < vocab.rows(); ++id)
    if (!found[static_cast<std::size_t>(id)]) fill_random_row(table.rows, id, seed, init_scale);
  return table;
}

WordEmbeddingTable random_word_vectors(const Vocabulary& vocab, i32 l, u64 seed,
                                       double init_scale) {
  WordEmbeddingTable table;
  table.rows = MatF::Zero(vocab.rows(), l);
  for (i32 id = 1; id < vocab.rows(); ++id) fill_random_row(table.rows, id, seed, init_scale);
  return table;
}

}  // namespace harc::corpus
