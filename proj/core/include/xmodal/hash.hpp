#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace xmodal {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a_append(std::uint64_t h, const void* bytes, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = kFnvOffset) {
  return fnv1a_append(seed, s.data(), s.size());
}

inline std::uint64_t fnv1a_append(std::uint64_t h, std::uint64_t v) {
  return fnv1a_append(h, &v, sizeof(v));
}

inline std::uint64_t fnv1a_append(std::uint64_t h, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  return fnv1a_append(h, &bits, sizeof(bits));
}

inline std::uint64_t fnv1a_append(std::uint64_t h, std::span<const double> vs) {
  for (double v : vs) h = fnv1a_append(h, v);
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace xmodal
