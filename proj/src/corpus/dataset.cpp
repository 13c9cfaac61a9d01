#include "harc/corpus/dataset.hpp"

#include "harc/error.hpp"
#include "harc/rng.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace harc::corpus {

namespace {

bool lex_less(const Interaction& a, const Interaction& b) {
  if (a.user != b.user) return a.user < b.user;
  if (a.ts != b.ts) return a.ts < b.ts;
  return a.item < b.item;
}

void sort_interactions(std::vector<Interaction>& v) {
  std::sort(v.begin(), v.end(), lex_less);
}

i64 parse_int_field(std::string_view field, const char* what, std::size_t line_no) {
  i64 value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad " + std::string(what) +
                     " field '" + std::string(field) + "'");
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return out;
}

}  // namespace

std::unordered_map<std::string, i32> Dataset::user_index() const {
  std::unordered_map<std::string, i32> m;
  m.reserve(user_raw_ids.size());
  for (i32 i = 0; i < n_users; ++i) m.emplace(user_raw_ids[i], i);
  return m;
}

std::unordered_map<std::string, i32> Dataset::item_index() const {
  std::unordered_map<std::string, i32> m;
  m.reserve(item_raw_ids.size());
  for (i32 i = 0; i < n_items; ++i) m.emplace(item_raw_ids[i], i);
  return m;
}

Dataset parse_ratings(const std::string& path, RatingsFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ratings file: " + path);

  const std::string sep = format == RatingsFormat::movielens_dat ? "::" : ",";
  Dataset ds;
  std::unordered_map<std::string, i32> user_ids, item_ids;
  // (user, item) -> index into ds.interactions, for latest-wins dedup
  std::map<std::pair<i32, i32>, std::size_t> seen;

  std::string line;
  std::size_t line_no = 0;
  bool header_skipped = format != RatingsFormat::csv;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_fields(line, sep);
    if (fields.size() != 4)
      throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));

    std::string user_raw(fields[0]), item_raw(fields[1]);
    i64 rating = parse_int_field(fields[2], "rating", line_no);
    i64 ts = parse_int_field(fields[3], "timestamp", line_no);
    if (rating < 1 || rating > 5)
      throw ValidationError("line " + std::to_string(line_no) + ": rating " +
                            std::to_string(rating) + " outside [1,5]");

    auto [uit, unew] = user_ids.emplace(user_raw, static_cast<i32>(ds.user_raw_ids.size()));
    if (unew) ds.user_raw_ids.push_back(user_raw);
    auto [iit, inew] = item_ids.emplace(item_raw, static_cast<i32>(ds.item_raw_ids.size()));
    if (inew) ds.item_raw_ids.push_back(item_raw);

    Interaction rec{uit->second, iit->second, static_cast<i32>(rating), ts};
    auto key = std::make_pair(rec.user, rec.item);
    auto found = seen.find(key);
    if (found == seen.end()) {
      seen.emplace(key, ds.interactions.size());
      ds.interactions.push_back(rec);
    } else if (ts >= ds.interactions[found->second].ts) {
      ds.interactions[found->second] = rec;  // rating updates supersede
    }
  }
  if (ds.interactions.empty()) throw ValidationError("ratings file has no interactions: " + path);

  ds.n_users = static_cast<i32>(ds.user_raw_ids.size());
  ds.n_items = static_cast<i32>(ds.item_raw_ids.size());
  sort_interactions(ds.interactions);
  return ds;
}

Dataset filter_dataset(const Dataset& ds, i32 min_user_ratings,
                       const std::vector<u8>& item_has_doc) {
  if (min_user_ratings < 1) throw ValidationError("min_user_ratings must be >= 1");
  if (static_cast<i32>(item_has_doc.size()) != ds.n_items)
    throw ValidationError("item_has_doc size does not match n_items");

  std::vector<u8> user_alive(ds.n_users, 1);
  std::vector<u8> item_alive(ds.n_items);
  for (i32 i = 0; i < ds.n_items; ++i) item_alive[i] = item_has_doc[i] != 0;

  // Removing items can push users below threshold; removing users only
  // empties items (it never disqualifies them), so iterating user counts to a
  // fixed point suffices.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<i32> count(ds.n_users, 0);
    for (const auto& r : ds.interactions)
      if (user_alive[r.user] && item_alive[r.item]) ++count[r.user];
    for (i32 u = 0; u < ds.n_users; ++u) {
      if (user_alive[u] && count[u] < min_user_ratings) {
        user_alive[u] = 0;
        changed = true;
      }
    }
  }

  std::vector<i32> item_count(ds.n_items, 0);
  for (const auto& r : ds.interactions)
    if (user_alive[r.user] && item_alive[r.item]) ++item_count[r.item];

  // Re-densify, preserving index order.
  Dataset out;
  std::vector<i32> user_map(ds.n_users, -1), item_map(ds.n_items, -1);
  for (i32 u = 0; u < ds.n_users; ++u) {
    if (user_alive[u]) {
      user_map[u] = static_cast<i32>(out.user_raw_ids.size());
      out.user_raw_ids.push_back(ds.user_raw_ids[u]);
    }
  }
  for (i32 i = 0; i < ds.n_items; ++i) {
    if (item_alive[i] && item_count[i] > 0) {
      item_map[i] = static_cast<i32>(out.item_raw_ids.size());
      out.item_raw_ids.push_back(ds.item_raw_ids[i]);
    }
  }
  for (const auto& r : ds.interactions) {
    if (user_map[r.user] >= 0 && item_map[r.item] >= 0)
      out.interactions.push_back({user_map[r.user], item_map[r.item], r.rating, r.ts});
  }
  if (out.interactions.empty())
    throw ValidationError("filter_dataset removed every interaction");
  out.n_users = static_cast<i32>(out.user_raw_ids.size());
  out.n_items = static_cast<i32>(out.item_raw_ids.size());
  sort_interactions(out.interactions);
  return out;
}

RatingSplit split_rating_task(const Dataset& ds, std::array<double, 3> fractions,
                              u64 seed) {
  double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split fractions must sum to 1");
  if (ds.interactions.empty()) throw ValidationError("cannot split an empty dataset");

  const std::size_t n = ds.interactions.size();
  std::vector<u8> bucket(n);  // 0 train, 1 valid, 2 test
  SplitMix64 rng(rng_combine(seed, fnv1a("split_rating_task")));
  for (std::size_t i = 0; i < n; ++i) {
    double r = rng.next_double();
    bucket[i] = r < fractions[0] ? 0 : (r < fractions[0] + fractions[1] ? 1 : 2);
  }

  // Repair: every user and item needs at least one training example. Move the
  // entity's earliest interaction (interactions are sorted, so the first hit
  // per user is the earliest; for items scan in order).
  std::vector<i32> user_train(ds.n_users, 0), item_train(ds.n_items, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (bucket[i] == 0) {
      ++user_train[ds.interactions[i].user];
      ++item_train[ds.interactions[i].item];
    }
  }
  std::vector<std::size_t> user_first(ds.n_users, n), item_first(ds.n_items, n);
  for (std::size_t i = n; i-- > 0;) {
    user_first[ds.interactions[i].user] = i;
  }
  {
    // earliest per item = min (ts, user) — walk a per-item copy sorted that way
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = ds.interactions[a];
      const auto& y = ds.interactions[b];
      if (x.item != y.item) return x.item < y.item;
      if (x.ts != y.ts) return x.ts < y.ts;
      return x.user < y.user;
    });
    for (std::size_t k = n; k-- > 0;) item_first[ds.interactions[order[k]].item] = order[k];
  }
  auto move_to_train = [&](std::size_t i) {
    if (bucket[i] == 0) return;
    bucket[i] = 0;
    ++user_train[ds.interactions[i].user];
    ++item_train[ds.interactions[i].item];
  };
  for (i32 u = 0; u < ds.n_users; ++u)
    if (user_train[u] == 0) move_to_train(user_first[u]);
  for (i32 it = 0; it < ds.n_items; ++it)
    if (item_train[it] == 0) move_to_train(item_first[it]);

  RatingSplit out;
  for (Dataset* part : {&out.train, &out.valid, &out.test}) {
    part->n_users = ds.n_users;
    part->n_items = ds.n_items;
    part->user_raw_ids = ds.user_raw_ids;
    part->item_raw_ids = ds.item_raw_ids;
  }
  for (std::size_t i = 0; i < n; ++i) {
    (bucket[i] == 0 ? out.train : bucket[i] == 1 ? out.valid : out.test)
        .interactions.push_back(ds.interactions[i]);
  }
  if (out.train.interactions.empty())
    throw ValidationError("dataset too small to satisfy train coverage");
  return out;
}

namespace {

LeaveOneOutCase make_case(const Dataset& ds, i32 user, i32 positive,
                          const std::vector<u8>& interacted, i32 n_negatives,
                          u64 stream_seed) {
  std::vector<i32> candidates;
  candidates.reserve(ds.n_items);
  for (i32 i = 0; i < ds.n_items; ++i)
    if (!interacted[i]) candidates.push_back(i);
  if (static_cast<i32>(candidates.size()) < n_negatives)
    throw ValidationError("user " + ds.user_raw_ids[user] + " has only " +
                          std::to_string(candidates.size()) +
                          " non-interacted items; need " + std::to_string(n_negatives) +
                          " negatives");
  SplitMix64 rng(stream_seed);
  LeaveOneOutCase c;
  c.user = user;
  c.positive = positive;
  c.negatives = rng.sample_without_replacement(std::move(candidates),
                                               static_cast<std::size_t>(n_negatives));
  return c;
}

}  // namespace

LeaveOneOutSplit split_leave_one_out(const Dataset& ds, i32 n_negatives, u64 seed,
                                     bool with_validation_cases) {
  if (n_negatives < 1) throw ValidationError("n_negatives must be >= 1");

  // Per user, sorted by (ts, item): the last element is the latest
  // interaction (timestamp ties broken toward the larger item id).
  std::vector<std::vector<Interaction>> by_user(ds.n_users);
  for (const auto& r : ds.interactions) by_user[r.user].push_back(r);

  LeaveOneOutSplit out;
  out.train.n_users = ds.n_users;
  out.train.n_items = ds.n_items;
  out.train.user_raw_ids = ds.user_raw_ids;
  out.train.item_raw_ids = ds.item_raw_ids;

  for (i32 u = 0; u < ds.n_users; ++u) {
    auto& recs = by_user[u];
    const i32 needed = with_validation_cases ? 3 : 2;
    if (static_cast<i32>(recs.size()) < needed)
      throw ValidationError("user " + ds.user_raw_ids[u] + " has fewer than " +
                            std::to_string(needed) + " interactions");
    std::vector<u8> interacted(ds.n_items, 0);
    for (const auto& r : recs) interacted[r.item] = 1;

    const Interaction& test_pos = recs.back();
    out.test_cases.push_back(make_case(ds, u, test_pos.item, interacted, n_negatives,
                                       rng_combine(seed, static_cast<u64>(u) * 2)));
    std::size_t train_end = recs.size() - 1;
    if (with_validation_cases) {
      const Interaction& val_pos = recs[recs.size() - 2];
      out.val_cases.push_back(make_case(ds, u, val_pos.item, interacted, n_negatives,
                                        rng_combine(seed, static_cast<u64>(u) * 2 + 1)));
      train_end = recs.size() - 2;
    }
    for (std::size_t i = 0; i < train_end; ++i) out.train.interactions.push_back(recs[i]);
  }
  sort_interactions(out.train.interactions);
  return out;
}

}  // namespace harc::corpus
