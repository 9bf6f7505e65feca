#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace fbl {

/// FNV-1a, 64 bit. Used for fingerprints and config hashes.
class Fnv1a {
 public:
  Fnv1a& bytes(std::string_view s) noexcept {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a& u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffU;
      h_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a& f64(double v) noexcept { return u64(std::bit_cast<std::uint64_t>(v)); }
  [[nodiscard]] std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace fbl
