#pragma once

#include <cstdint>
#include <string_view>

namespace kpzc {

/// Identifies the address -> randomness mapping below. Any change to the
/// mixing constants or the absorb order must bump this string, because every
/// golden value and replay depends on it.
inline constexpr std::string_view kHashVersion = "splitmix64-absorb/1";

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Folds one word into a running hash state.
constexpr std::uint64_t absorb(std::uint64_t state, std::uint64_t word) noexcept {
  return mix64(state ^ (word + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2)));
}

/// Maps 64 random bits to a double strictly inside (0,1).
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct UniformPair {
  double first;
  double second;
};

/// Splits one hash state into two independent-looking open uniforms.
constexpr UniformPair uniform_pair(std::uint64_t state) noexcept {
  return {to_open_unit(mix64(state ^ 0x5851f42d4c957f2dULL)),
          to_open_unit(mix64(state ^ 0x14057b7ef767814fULL))};
}

/// Seed for the index-th job of an experiment with the given master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return absorb(absorb(0x243f6a8885a308d3ULL, master), index);
}

/// Counter-based uniform stream: value k is a pure function of (key, k).
class CounterStream {
 public:
  constexpr explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr double uniform(std::uint64_t counter) const noexcept {
    return to_open_unit(absorb(key_, counter));
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return absorb(key_ ^ 0x6a09e667f3bcc908ULL, counter);
  }

 private:
  std::uint64_t key_;
};

}  // namespace kpzc
