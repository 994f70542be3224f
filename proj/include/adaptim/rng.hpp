#pragma once

#include <cstdint>
#include <initializer_list>

namespace adaptim {

/// Counter-based random streams.
///
/// Every random quantity in the library is a pure function of a 64-bit stream
/// key and a counter, so simulation s under master seed m draws the same
/// values whatever the execution order or worker count.
namespace rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child stream of `key` labelled by `salt`.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t salt) noexcept {
  return splitmix64(key ^ splitmix64(salt ^ 0xD1B54A32D192ED03ULL));
}

constexpr std::uint64_t derive(std::uint64_t key, std::initializer_list<std::uint64_t> salts) noexcept {
  for (auto s : salts) key = derive(key, s);
  return key;
}

/// Uniform double in [0, 1) from 53 high bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Bernoulli(p) draw number `counter` of stream `key`. p >= 1 is always true, p <= 0 never.
constexpr bool bernoulli(std::uint64_t key, std::uint64_t counter, double p) noexcept {
  return to_unit(derive(key, counter)) < p;
}

/// Stable label for string-named sub-streams ("world", "estimator", ...).
constexpr std::uint64_t label(const char* s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  while (*s != '\0') {
    h ^= static_cast<unsigned char>(*s++);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace rng
}  // namespace adaptim
