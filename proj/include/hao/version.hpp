#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace hao {

inline constexpr std::string_view kVersion = "0.1.0";

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
inline std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hao
