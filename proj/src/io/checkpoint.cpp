#include "harc/io/checkpoint.hpp"

#include "harc/error.hpp"
#include "harc/io/crc32.hpp"
#include "harc/model/params.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace harc::io {

namespace {

// Serialization is explicitly little-endian byte by byte, so files are
// identical across hosts.
void put_u32(std::string& out, u32 v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, u64 v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float f) {
  u32 bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw CorruptionError("checkpoint truncated");
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
  float f32le() {
    u32 bits = u32le();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

void append_tensor(std::string& body, const std::string& name,
                   const numerics::Tensor<float>& t) {
  put_u32(body, static_cast<u32>(name.size()));
  body.append(name);
  put_u32(body, static_cast<u32>(t.rank));
  if (t.rank == 1) {
    put_u64(body, static_cast<u64>(t.rows()));
  } else {
    put_u64(body, static_cast<u64>(t.rows()));
    put_u64(body, static_cast<u64>(t.cols()));
  }
  for (Eigen::Index k = 0; k < t.size(); ++k) put_f32(body, t.coord(k));
}

}  // namespace

void save_checkpoint(const std::string& path, const numerics::ParameterStore<float>& store,
                     const model::ModelConfig& cfg, i32 n_users, i32 n_items,
                     i32 vocab_words) {
  std::string body;
  body.append("HARC");
  put_u32(body, kCheckpointVersion);
  put_u32(body, static_cast<u32>(store.size() + 1));

  auto meta = model::encode_config(cfg, n_users, n_items, vocab_words);
  numerics::Tensor<float> meta_t = numerics::Tensor<float>::vector(
      static_cast<Eigen::Index>(meta.size()));
  for (std::size_t i = 0; i < meta.size(); ++i)
    meta_t.m(static_cast<Eigen::Index>(i), 0) = meta[i];
  append_tensor(body, model::names::config_tensor, meta_t);
  for (const auto& [name, p] : store) append_tensor(body, name, p.value);

  put_u32(body, crc32_of(body.data(), body.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("short write on checkpoint: " + path);
  out.close();

  std::ofstream side(path + ".cfg", std::ios::trunc);
  if (!side) throw IoError("cannot write checkpoint sidecar: " + path + ".cfg");
  side << model::config_text(cfg, n_users, n_items, vocab_words);
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string data = read_file(path);
  if (data.size() < 12) throw CorruptionError("checkpoint too small: " + path);

  const u32 stored_crc = crc32_of(data.data(), data.size() - 4);
  Reader tail{data, data.size() - 4};
  if (tail.u32le() != stored_crc) throw CorruptionError("checkpoint CRC mismatch: " + path);

  Reader r{data};
  if (r.bytes(4) != "HARC") throw CorruptionError("bad checkpoint magic: " + path);
  const u32 version = r.u32le();
  if (version > kCheckpointVersion)
    throw CorruptionError("unsupported checkpoint version " + std::to_string(version));
  const u32 count = r.u32le();

  Checkpoint out;
  std::vector<float> meta;
  for (u32 i = 0; i < count; ++i) {
    const u32 name_len = r.u32le();
    const std::string name = r.bytes(name_len);
    const u32 rank = r.u32le();
    if (rank != 1 && rank != 2)
      throw CorruptionError("unsupported tensor rank " + std::to_string(rank));
    const u64 rows = r.u64le();
    const u64 cols = rank == 2 ? r.u64le() : 1;
    if (name == model::names::config_tensor) {
      meta.resize(rows * cols);
      for (auto& v : meta) v = r.f32le();
      continue;
    }
    auto& p = out.store.add(name, static_cast<int>(rank), static_cast<Eigen::Index>(rows),
                            static_cast<Eigen::Index>(cols));
    for (Eigen::Index k = 0; k < p.value.size(); ++k) p.value.coord(k) = r.f32le();
  }
  if (r.pos != data.size() - 4) throw CorruptionError("trailing bytes in checkpoint");
  if (meta.empty()) throw CorruptionError("checkpoint has no config tensor");

  auto decoded = model::decode_config(meta);
  out.cfg = decoded.cfg;
  out.n_users = decoded.n_users;
  out.n_items = decoded.n_items;
  out.vocab_words = decoded.vocab_words;
  return out;
}

}  // namespace harc::io
