#pragma once

// Synthetic fixtures: a planted-structure corpus generator (ratings driven
// jointly by a document-readable topic and by which topic the user rated
// highly), random model inputs for gradient checks, and small configs sized
// for fast tests.

#include "harc/corpus/dataset.hpp"
#include "harc/corpus/histories.hpp"
#include "harc/corpus/text.hpp"
#include "harc/model/config.hpp"
#include "harc/model/encoders.hpp"
#include "harc/model/params.hpp"
#include "harc/numerics/store.hpp"

#include <string>
#include <vector>

namespace synth {

using namespace harc;

struct CorpusSpec {
  i32 n_users = 200;
  i32 n_items = 200;
  int n_topics = 4;
  int min_hist = 10;
  int max_hist = 25;
  double quality_frac = 0.3;  // items carrying a doc-only quality word
  double noise = 0.08;        // chance of a +-1 rating perturbation
  int word_dim = 16;
  u64 seed = 7;
};

struct CorpusFiles {
  std::string ratings;    // movielens "::" format
  std::string docs;       // item<TAB>description
  std::string stopwords;  // one per line
  std::string wordvecs;   // word v1 .. vl
};

CorpusFiles make_corpus(const CorpusSpec& spec);

/// Writes ratings.dat, docs.tsv, stopwords.txt, vectors.txt into dir.
void write_corpus(const CorpusFiles& files, const std::string& dir);

/// Small architecture for smoke training runs (paired with word_dim=16).
model::ModelConfig toy_config();

/// Minimal architecture for gradient checking and unit math tests.
model::ModelConfig tiny_config();

/// A random store + batch in double precision whose forward pass sits at
/// least `margin` away from every ReLU kink and max-pool tie (central
/// differences are only a valid oracle on smooth neighborhoods); draws fresh
/// sub-seeds until that holds.
struct GradCase {
  numerics::ParameterStore<double> store;
  std::vector<corpus::UserHistory> hists;
  std::vector<corpus::ItemProfile> profiles;
  VecF targets;
};

GradCase make_grad_case(const model::ModelConfig& cfg, i32 n_users, i32 n_items,
                        i32 vocab_words, int rows, u64 seed, double margin = 1e-3);

/// Random masked inputs for encoder property tests (no margin constraints).
corpus::UserHistory random_history(SplitMix64& rng, int h, i32 n_items, int max_real);
corpus::ItemDocument random_document(SplitMix64& rng, int rho, i32 vocab_words,
                                     int max_real);
corpus::ItemProfile random_profile(SplitMix64& rng, int h, i32 n_users, int max_real,
                                   const corpus::ItemDocument& doc);

/// Fresh temp directory under the system temp root; removed by the caller or
/// left for inspection on failure.
std::string fresh_temp_dir(const std::string& tag);

}  // namespace synth
