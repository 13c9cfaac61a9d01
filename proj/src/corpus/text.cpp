#include "harc/corpus/text.hpp"

#include "harc/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace harc::corpus {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

i32 Vocabulary::id_of(const std::string& word) const {
  auto it = word_to_id.find(word);
  return it == word_to_id.end() ? kOov : it->second;
}

const std::string& Vocabulary::word_of(i32 id) const {
  if (id < 2 || id >= rows()) throw LookupError("token id out of range: " + std::to_string(id));
  return id_to_word[static_cast<std::size_t>(id - 2)];
}

Vocabulary build_vocabulary(const std::vector<std::string>& docs,
                            const std::unordered_set<std::string>& stopwords,
                            i32 v_max) {
  if (v_max < 1) throw ValidationError("v_max must be >= 1");

  // std::map keeps candidate iteration lexicographic, which both fixes the
  // tie-break order and makes id assignment deterministic.
  std::map<std::string, i64> total_count;
  std::map<std::string, i64> doc_freq;
  const double n_docs = static_cast<double>(docs.size());
  bool any_token = false;
  for (const auto& text : docs) {
    auto tokens = tokenize(text);
    std::unordered_set<std::string_view> in_this_doc;
    for (auto& t : tokens) {
      any_token = true;
      if (stopwords.count(t)) continue;
      auto [it, fresh] = total_count.try_emplace(t, 0);
      ++it->second;
      if (in_this_doc.insert(it->first).second) ++doc_freq[it->first];
    }
  }
  if (!any_token) throw ValidationError("all documents are empty");
  if (total_count.empty())
    throw ValidationError("no vocabulary candidates: every token is a stopword");

  struct Scored {
    double score;
    const std::string* word;
  };
  std::vector<Scored> scored;
  scored.reserve(total_count.size());
  for (const auto& [word, count] : total_count) {
    double idf = std::log(n_docs / static_cast<double>(doc_freq[word]));
    scored.push_back({static_cast<double>(count) * idf, &word});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.score > b.score;  // stable keeps lexicographic order within ties
  });
  if (static_cast<i64>(scored.size()) > v_max) scored.resize(static_cast<std::size_t>(v_max));

  std::vector<const std::string*> kept;
  kept.reserve(scored.size());
  for (const auto& s : scored) kept.push_back(s.word);
  std::sort(kept.begin(), kept.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });

  Vocabulary vocab;
  vocab.stopwords = stopwords;
  vocab.id_to_word.reserve(kept.size());
  vocab.idf.reserve(kept.size());
  for (const std::string* w : kept) {
    i32 id = static_cast<i32>(vocab.id_to_word.size()) + 2;
    vocab.word_to_id.emplace(*w, id);
    vocab.id_to_word.push_back(*w);
    vocab.idf.push_back(std::log(n_docs / static_cast<double>(doc_freq[*w])));
  }
  return vocab;
}

ItemDocument encode_document(std::string_view text, const Vocabulary& vocab, i32 rho) {
  if (rho < 1) throw ValidationError("rho must be >= 1");
  ItemDocument doc;
  doc.token_ids.assign(static_cast<std::size_t>(rho), Vocabulary::kPad);
  doc.mask.assign(static_cast<std::size_t>(rho), 0);
  for (const auto& t : tokenize(text)) {
    if (vocab.stopwords.count(t)) continue;
    if (doc.raw_length < rho) {
      doc.token_ids[static_cast<std::size_t>(doc.raw_length)] = vocab.id_of(t);
      doc.mask[static_cast<std::size_t>(doc.raw_length)] = 1;
    }
    ++doc.raw_length;
  }
  return doc;
}

std::vector<std::string> decode_document(const ItemDocument& doc, const Vocabulary& vocab,
                                         const std::string& oov_marker) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < doc.token_ids.size(); ++i) {
    if (!doc.mask[i]) continue;
    i32 id = doc.token_ids[i];
    out.push_back(id == Vocabulary::kOov ? oov_marker : vocab.word_of(id));
  }
  return out;
}

}  // namespace harc::corpus
