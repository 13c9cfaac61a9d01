#include "harc/eval/metrics.hpp"
#include "harc/eval/ranking.hpp"

#include <doctest.h>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <cmath>

using namespace harc;
using namespace harc::eval;

namespace {

RankedCase make_ranked(i32 user, const std::vector<i32>& ids,
                       const std::vector<double>& scores) {
  RankedCase c;
  c.user = user;
  c.candidates = ids;
  c.scores = scores;
  rank_case(c);
  return c;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("rmse: perfect, analytic, brute-force oracle") {
  CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(rmse({1, 2}, {2, 4}) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(rmse({1, 2}, {2, 4}) == doctest::Approx(1.5811).epsilon(1e-4));

  SplitMix64 rng(3);
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) {
    a.push_back(rng.uniform(1, 5));
    b.push_back(rng.uniform(1, 5));
  }
  CHECK(rmse(a, b) == doctest::Approx(oracle::rmse(a, b)).epsilon(1e-12));
  CHECK_THROWS_AS(rmse({}, {}), ValidationError);
}

TEST_CASE("hit ratio and ndcg: counting, cutoffs, exact values") {
  std::vector<RankedCase> cases;
  for (int rank : {3, 15, 7}) {
    RankedCase c;
    c.rank_of_positive = rank;
    cases.push_back(c);
  }
  CHECK(hit_ratio_at_k(cases, 10) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  std::vector<RankedCase> perfect(5);
  for (auto& c : perfect) c.rank_of_positive = 1;
  CHECK(hit_ratio_at_k(perfect, 10) == 1.0);
  CHECK(ndcg_at_k(perfect, 10) == 1.0);

  std::vector<RankedCase> one(1);
  one[0].rank_of_positive = 3;
  CHECK(ndcg_at_k(one, 10) == doctest::Approx(0.5).epsilon(1e-12));  // 1/log2(4)
  one[0].rank_of_positive = 11;
  CHECK(ndcg_at_k(one, 10) == 0.0);
  CHECK_THROWS_AS(hit_ratio_at_k({}, 10), ValidationError);
  CHECK_THROWS_AS(ndcg_at_k({}, 10), ValidationError);
}

TEST_CASE("rank_case: ties break by candidate id ascending") {
  // positive id 7 score 1.0; ties at 1.0 with ids 3 (smaller) and 9 (larger)
  auto c = make_ranked(0, {7, 3, 9, 5}, {1.0, 1.0, 1.0, 2.0});
  // ahead: id 5 with score 2.0, and id 3 tie with smaller id -> rank 3
  CHECK(c.rank_of_positive == 3);
}

TEST_CASE("HR/NDCG match the brute-force oracle on 1000 random cases") {
  SplitMix64 rng(17);
  std::vector<RankedCase> cases;
  std::vector<int> oracle_ranks;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng.bounded(30));
    std::vector<i32> ids;
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) {
      ids.push_back(static_cast<i32>(rng.bounded(1000)));
      // coarse scores force ties
      scores.push_back(std::floor(rng.uniform(0, 6)));
    }
    cases.push_back(make_ranked(static_cast<i32>(t), ids, scores));
    oracle_ranks.push_back(oracle::rank_of_first(ids, scores));
  }
  for (std::size_t i = 0; i < cases.size(); ++i)
    CHECK(cases[i].rank_of_positive == oracle_ranks[i]);
  for (int k : {1, 5, 10, 20}) {
    CHECK(hit_ratio_at_k(cases, k) == oracle::hit_ratio(oracle_ranks, k));
    CHECK(ndcg_at_k(cases, k) ==
          doctest::Approx(oracle::ndcg(oracle_ranks, k)).epsilon(1e-12));
  }
}

TEST_CASE("property: per-case NDCG > 0 iff hit; argsort invariance") {
  SplitMix64 rng(23);
  const int k = 10;
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + static_cast<int>(rng.bounded(40));
    std::vector<i32> ids;
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) {
      ids.push_back(static_cast<i32>(rng.bounded(10000)));
      scores.push_back(rng.uniform(-5, 5));
    }
    auto c = make_ranked(0, ids, scores);
    const bool hit = c.rank_of_positive <= k;
    const double per_case_ndcg = ndcg_at_k({c}, k);
    CHECK((per_case_ndcg > 0.0) == hit);

    // strictly increasing transform of all scores preserves ranks
    std::vector<double> warped;
    for (double s : scores) warped.push_back(std::tanh(s) * 3.0 + s * 0.25 + 1.0);
    auto c2 = make_ranked(0, ids, warped);
    CHECK(c2.rank_of_positive == c.rank_of_positive);
  }
}

TEST_CASE("popularity baseline scores by training count, unseen items 0") {
  corpus::Dataset train;
  train.n_users = 3;
  train.n_items = 4;
  train.user_raw_ids = {"a", "b", "c"};
  train.item_raw_ids = {"w", "x", "y", "z"};
  train.interactions = {{0, 1, 5, 1}, {1, 1, 4, 2}, {2, 1, 3, 3}, {0, 2, 2, 4},
                        {1, 2, 1, 5}, {2, 0, 5, 6}};
  auto scorer = popularity_baseline(train);
  CHECK(scorer(0, 1) == 3.0);
  CHECK(scorer(0, 2) == 2.0);
  CHECK(scorer(0, 0) == 1.0);
  CHECK(scorer(0, 3) == 0.0);

  // most-popular item ranks first in any case containing it
  std::vector<corpus::LeaveOneOutCase> cases{{0, 1, {0, 2, 3}}};
  auto report = rank_cases(cases, scorer, 2);
  CHECK(report.cases[0].rank_of_positive == 1);
}

TEST_CASE("constant-score model ranks by candidate id (tiebreak oracle)") {
  Scorer constant = [](i32, i32) { return 1.0; };
  std::vector<corpus::LeaveOneOutCase> cases;
  SplitMix64 rng(29);
  for (i32 u = 0; u < 50; ++u) {
    corpus::LeaveOneOutCase c;
    c.user = u;
    c.positive = static_cast<i32>(rng.bounded(100));
    std::set<i32> negs;
    while (negs.size() < 20) {
      i32 cand = static_cast<i32>(rng.bounded(100));
      if (cand != c.positive) negs.insert(cand);
    }
    c.negatives.assign(negs.begin(), negs.end());
    cases.push_back(c);
  }
  auto report = rank_cases(cases, constant, 10);
  for (const auto& rc : report.cases) {
    // identity permutation: rank = 1 + #candidates with smaller id
    int smaller = 0;
    for (std::size_t i = 1; i < rc.candidates.size(); ++i)
      if (rc.candidates[i] < rc.candidates[0]) ++smaller;
    CHECK(rc.rank_of_positive == smaller + 1);
  }
}

TEST_CASE("random scorer over many cases calibrates to HR@10 ~ 0.1") {
  // 99 negatives + 1 positive: a uniform scorer hits the top 10 w.p. 0.1
  SplitMix64 rng(31);
  std::vector<corpus::LeaveOneOutCase> cases;
  const i32 n_items = 2000;
  for (i32 u = 0; u < 2500; ++u) {
    corpus::LeaveOneOutCase c;
    c.user = u;
    c.positive = static_cast<i32>(rng.bounded(static_cast<u64>(n_items)));
    std::set<i32> negs;
    while (static_cast<i32>(negs.size()) < 99) {
      i32 cand = static_cast<i32>(rng.bounded(static_cast<u64>(n_items)));
      if (cand != c.positive) negs.insert(cand);
    }
    c.negatives.assign(negs.begin(), negs.end());
    cases.push_back(c);
  }
  auto scorer_rng = std::make_shared<SplitMix64>(37);
  Scorer random_scorer = [scorer_rng](i32, i32) { return scorer_rng->next_double(); };
  auto report = rank_cases(cases, random_scorer, 10);
  CHECK(report.hr > 0.07);
  CHECK(report.hr < 0.13);
}

}  // TEST_SUITE
