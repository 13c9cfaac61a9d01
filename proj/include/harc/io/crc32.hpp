#pragma once

#include "harc/types.hpp"

#include <cstddef>
#include <string>

namespace harc::io {

/// CRC-32 (IEEE 802.3, the zlib polynomial). Used for checkpoint trailers,
/// manifest content hashes, and the serve-time checkpoint fingerprint.
class Crc32 {
 public:
  void update(const void* data, std::size_t len);
  u32 value() const { return state_ ^ 0xFFFFFFFFu; }

 private:
  u32 state_ = 0xFFFFFFFFu;
};

u32 crc32_of(const void* data, std::size_t len);
u32 crc32_of_file(const std::string& path);

}  // namespace harc::io
