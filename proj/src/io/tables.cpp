#include "harc/io/tables.hpp"

#include "harc/error.hpp"
#include "harc/io/crc32.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace harc::io {

namespace {

void put_u32(std::string& out, u32 v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, u64 v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw CorruptionError("table file truncated");
  }
  u8 byte() {
    need(1);
    return static_cast<u8>(buf[pos++]);
  }
  u32 u32le() {
    need(4);
    u32 v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<u32>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  u64 u64le() {
    need(8);
    u64 v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<u64>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void save_tables(const std::string& path, const TableFile& tables) {
  std::string body;
  body.append("HART");
  put_u32(body, kTablesVersion);
  put_u32(body, static_cast<u32>(tables.size()));
  for (const auto& [name, table] : tables) {
    put_u32(body, static_cast<u32>(name.size()));
    body.append(name);
    const bool is_f32 = std::holds_alternative<MatF>(table.data);
    body.push_back(is_f32 ? '\0' : '\1');
    put_u32(body, static_cast<u32>(table.rank));
    auto dims = [&](Eigen::Index rows, Eigen::Index cols) {
      put_u64(body, static_cast<u64>(rows));
      if (table.rank == 2) put_u64(body, static_cast<u64>(cols));
    };
    if (is_f32) {
      const MatF& m = std::get<MatF>(table.data);
      dims(m.rows(), m.cols());
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          u32 bits;
          float f = m(r, c);
          std::memcpy(&bits, &f, 4);
          put_u32(body, bits);
        }
    } else {
      const MatI64& m = std::get<MatI64>(table.data);
      dims(m.rows(), m.cols());
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
          put_u64(body, static_cast<u64>(m(r, c)));
    }
  }
  put_u32(body, crc32_of(body.data(), body.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write table file: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("short write on table file: " + path);
}

TableFile load_tables(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open table file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 12) throw CorruptionError("table file too small: " + path);

  Reader tail{data, data.size() - 4};
  if (tail.u32le() != crc32_of(data.data(), data.size() - 4))
    throw CorruptionError("table file CRC mismatch: " + path);

  Reader r{data};
  if (r.bytes(4) != "HART") throw CorruptionError("bad table-file magic: " + path);
  const u32 version = r.u32le();
  if (version > kTablesVersion)
    throw CorruptionError("unsupported table-file version " + std::to_string(version));
  const u32 count = r.u32le();

  TableFile out;
  for (u32 i = 0; i < count; ++i) {
    const std::string name = r.bytes(r.u32le());
    const u8 dtype = r.byte();
    const u32 rank = r.u32le();
    if (rank != 1 && rank != 2)
      throw CorruptionError("unsupported table rank " + std::to_string(rank));
    const u64 rows = r.u64le();
    const u64 cols = rank == 2 ? r.u64le() : 1;
    Table t;
    t.rank = static_cast<int>(rank);
    if (dtype == 0) {
      MatF m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (Eigen::Index rr = 0; rr < m.rows(); ++rr)
        for (Eigen::Index cc = 0; cc < m.cols(); ++cc) {
          u32 bits = r.u32le();
          float f;
          std::memcpy(&f, &bits, 4);
          m(rr, cc) = f;
        }
      t.data = std::move(m);
    } else if (dtype == 1) {
      MatI64 m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (Eigen::Index rr = 0; rr < m.rows(); ++rr)
        for (Eigen::Index cc = 0; cc < m.cols(); ++cc)
          m(rr, cc) = static_cast<i64>(r.u64le());
      t.data = std::move(m);
    } else {
      throw CorruptionError("unknown table dtype " + std::to_string(dtype));
    }
    out.emplace(name, std::move(t));
  }
  if (r.pos != data.size() - 4) throw CorruptionError("trailing bytes in table file");
  return out;
}

namespace {

MatI64 interactions_table(const corpus::Dataset& ds) {
  MatI64 m(static_cast<Eigen::Index>(ds.interactions.size()), 4);
  for (std::size_t i = 0; i < ds.interactions.size(); ++i) {
    const auto& r = ds.interactions[i];
    m(static_cast<Eigen::Index>(i), 0) = r.user;
    m(static_cast<Eigen::Index>(i), 1) = r.item;
    m(static_cast<Eigen::Index>(i), 2) = r.rating;
    m(static_cast<Eigen::Index>(i), 3) = r.ts;
  }
  return m;
}

void interactions_from_table(const MatI64& m, corpus::Dataset& ds) {
  ds.interactions.resize(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ds.interactions[static_cast<std::size_t>(i)] = {
        static_cast<i32>(m(i, 0)), static_cast<i32>(m(i, 1)), static_cast<i32>(m(i, 2)),
        m(i, 3)};
  }
}

MatI64 cases_table(const std::vector<corpus::LeaveOneOutCase>& cases, i32 n_negatives) {
  MatI64 m(static_cast<Eigen::Index>(cases.size()), 2 + n_negatives);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = cases[i].user;
    m(static_cast<Eigen::Index>(i), 1) = cases[i].positive;
    for (i32 j = 0; j < n_negatives; ++j)
      m(static_cast<Eigen::Index>(i), 2 + j) = cases[i].negatives[static_cast<std::size_t>(j)];
  }
  return m;
}

std::vector<corpus::LeaveOneOutCase> cases_from_table(const MatI64& m) {
  std::vector<corpus::LeaveOneOutCase> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto& c = out[static_cast<std::size_t>(i)];
    c.user = static_cast<i32>(m(i, 0));
    c.positive = static_cast<i32>(m(i, 1));
    c.negatives.resize(static_cast<std::size_t>(m.cols() - 2));
    for (Eigen::Index j = 2; j < m.cols(); ++j)
      c.negatives[static_cast<std::size_t>(j - 2)] = static_cast<i32>(m(i, j));
  }
  return out;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write: " + path);
  for (const auto& l : lines) out << l << "\n";
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

void save_prepared(const std::string& dir, const PreparedData& data) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);

  TableFile tables;
  tables["meta"] = Table{[&] {
                           MatI64 m(8, 1);
                           m(0, 0) = data.task == model::Task::rating ? 0 : 1;
                           m(1, 0) = static_cast<i64>(data.prep_seed);
                           m(2, 0) = data.n_negatives;
                           m(3, 0) = data.doc_len;
                           m(4, 0) = data.n_users();
                           m(5, 0) = data.n_items();
                           m(6, 0) = data.vocab.size();
                           m(7, 0) = static_cast<i64>(data.word_vectors.dim());
                           return m;
                         }(),
                         1};
  tables["interactions.train"] = Table{interactions_table(data.train), 2};
  if (data.task == model::Task::rating) {
    tables["interactions.valid"] = Table{interactions_table(data.valid), 2};
    tables["interactions.test"] = Table{interactions_table(data.test), 2};
  } else {
    tables["cases.test"] = Table{cases_table(data.test_cases, data.n_negatives), 2};
    tables["cases.val"] = Table{cases_table(data.val_cases, data.n_negatives), 2};
  }
  {
    MatI64 docs(data.n_items(), data.doc_len);
    MatI64 raw_len(data.n_items(), 1);
    for (i32 i = 0; i < data.n_items(); ++i) {
      const auto& d = data.docs[static_cast<std::size_t>(i)];
      for (i32 j = 0; j < data.doc_len; ++j)
        docs(i, j) = d.token_ids[static_cast<std::size_t>(j)];
      raw_len(i, 0) = d.raw_length;
    }
    tables["docs.tokens"] = Table{std::move(docs), 2};
    tables["docs.raw_length"] = Table{std::move(raw_len), 2};
  }
  tables["word_vectors"] = Table{data.word_vectors.rows, 2};
  save_tables(dir + "/prepared.bin", tables);

  write_lines(dir + "/users.map", data.train.user_raw_ids);
  write_lines(dir + "/items.map", data.train.item_raw_ids);
  {
    std::vector<std::string> lines;
    lines.reserve(static_cast<std::size_t>(data.vocab.size()));
    std::ostringstream os;
    for (i32 w = 0; w < data.vocab.size(); ++w) {
      os.str("");
      os << data.vocab.id_to_word[static_cast<std::size_t>(w)] << "\t"
         << data.vocab.idf[static_cast<std::size_t>(w)];
      lines.push_back(os.str());
    }
    write_lines(dir + "/vocab.txt", lines);
  }

  // Manifest: task metadata plus content hash of every data file.
  std::ostringstream mf;
  mf << "task=" << model::to_string(data.task) << "\n";
  mf << "seed=" << data.prep_seed << "\n";
  mf << "n_users=" << data.n_users() << "\n";
  mf << "n_items=" << data.n_items() << "\n";
  mf << "n_interactions_train=" << data.train.interactions.size() << "\n";
  if (data.task == model::Task::rating) {
    mf << "n_interactions_valid=" << data.valid.interactions.size() << "\n";
    mf << "n_interactions_test=" << data.test.interactions.size() << "\n";
  } else {
    mf << "n_negatives=" << data.n_negatives << "\n";
    mf << "test_cases=" << data.test_cases.size() << "\n";
    mf << "val_cases=" << data.val_cases.size() << "\n";
  }
  mf << "vocab_words=" << data.vocab.size() << "\n";
  mf << "word_dim=" << data.word_vectors.dim() << "\n";
  for (const char* f : {"prepared.bin", "users.map", "items.map", "vocab.txt"}) {
    const std::string p = dir + "/" + f;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", crc32_of_file(p));
    mf << "file " << f << " " << fs::file_size(p) << " " << buf << "\n";
  }
  std::ofstream out(dir + "/manifest.txt", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + dir);
  out << mf.str();
}

PreparedData load_prepared(const std::string& dir) {
  TableFile tables = load_tables(dir + "/prepared.bin");
  auto table = [&](const std::string& name) -> Table& {
    auto it = tables.find(name);
    if (it == tables.end()) throw CorruptionError("prepared data missing table: " + name);
    return it->second;
  };

  PreparedData data;
  const MatI64& meta = std::get<MatI64>(table("meta").data);
  data.task = meta(0, 0) == 0 ? model::Task::rating : model::Task::ranking;
  data.prep_seed = static_cast<u64>(meta(1, 0));
  data.n_negatives = static_cast<i32>(meta(2, 0));
  data.doc_len = static_cast<i32>(meta(3, 0));
  const i32 n_users = static_cast<i32>(meta(4, 0));
  const i32 n_items = static_cast<i32>(meta(5, 0));

  auto user_ids = read_lines(dir + "/users.map");
  auto item_ids = read_lines(dir + "/items.map");
  if (static_cast<i32>(user_ids.size()) != n_users ||
      static_cast<i32>(item_ids.size()) != n_items)
    throw CorruptionError("id maps do not match prepared metadata");

  for (corpus::Dataset* ds : {&data.train, &data.valid, &data.test}) {
    ds->n_users = n_users;
    ds->n_items = n_items;
    ds->user_raw_ids = user_ids;
    ds->item_raw_ids = item_ids;
  }
  interactions_from_table(std::get<MatI64>(table("interactions.train").data), data.train);
  if (data.task == model::Task::rating) {
    interactions_from_table(std::get<MatI64>(table("interactions.valid").data), data.valid);
    interactions_from_table(std::get<MatI64>(table("interactions.test").data), data.test);
  } else {
    data.test_cases = cases_from_table(std::get<MatI64>(table("cases.test").data));
    data.val_cases = cases_from_table(std::get<MatI64>(table("cases.val").data));
  }

  const MatI64& tokens = std::get<MatI64>(table("docs.tokens").data);
  const MatI64& raw_len = std::get<MatI64>(table("docs.raw_length").data);
  if (tokens.rows() != n_items) throw CorruptionError("doc table row count mismatch");
  data.docs.resize(static_cast<std::size_t>(n_items));
  for (i32 i = 0; i < n_items; ++i) {
    auto& d = data.docs[static_cast<std::size_t>(i)];
    d.raw_length = static_cast<i32>(raw_len(i, 0));
    d.token_ids.resize(static_cast<std::size_t>(tokens.cols()));
    d.mask.resize(static_cast<std::size_t>(tokens.cols()));
    for (Eigen::Index j = 0; j < tokens.cols(); ++j) {
      d.token_ids[static_cast<std::size_t>(j)] = static_cast<i32>(tokens(i, j));
      d.mask[static_cast<std::size_t>(j)] = j < d.raw_length ? 1 : 0;
    }
  }

  data.word_vectors.rows = std::get<MatF>(table("word_vectors").data);

  for (const auto& line : read_lines(dir + "/vocab.txt")) {
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw CorruptionError("bad vocab line: " + line);
    const std::string word = line.substr(0, tab);
    const i32 id = data.vocab.size() + 2;
    data.vocab.word_to_id.emplace(word, id);
    data.vocab.id_to_word.push_back(word);
    data.vocab.idf.push_back(std::stod(line.substr(tab + 1)));
  }
  if (data.vocab.size() != static_cast<i32>(meta(6, 0)))
    throw CorruptionError("vocab size does not match prepared metadata");
  return data;
}

}  // namespace harc::io
