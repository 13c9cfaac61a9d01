#include "harc/io/crc32.hpp"

#include "harc/error.hpp"

#include <array>
#include <fstream>

namespace harc::io {

namespace {

std::array<u32, 256> make_table() {
  std::array<u32, 256> t{};
  for (u32 i = 0; i < 256; ++i) {
    u32 c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    t[i] = c;
  }
  return t;
}

const std::array<u32, 256>& table() {
  static const std::array<u32, 256> t = make_table();
  return t;
}

}  // namespace

void Crc32::update(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  u32 c = state_;
  for (std::size_t i = 0; i < len; ++i) c = table()[(c ^ p[i]) & 0xFFu] ^ (c >> 8);
  state_ = c;
}

u32 crc32_of(const void* data, std::size_t len) {
  Crc32 c;
  c.update(data, len);
  return c.value();
}

u32 crc32_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for hashing: " + path);
  Crc32 c;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    c.update(buf, static_cast<std::size_t>(in.gcount()));
    if (!in) break;
  }
  return c.value();
}

}  // namespace harc::io
