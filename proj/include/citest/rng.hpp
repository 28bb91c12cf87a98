#pragma once

#include <cstdint>
#include <initializer_list>

#include "citest/math.hpp"

namespace citest {

namespace detail {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer: full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based pseudo-random stream (splitmix64 core). A stream is
/// identified by a key derived from a seed plus a path of stream ids, so any
/// substream is reproducible in isolation and streams can be consumed in
/// parallel without shared state.
class rng_stream {
 public:
  explicit rng_stream(std::uint64_t key) : key_(key) {}

  /// Derives the stream for (seed, id path) by chained mixing.
  static rng_stream from_path(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t key = detail::mix64(seed + detail::golden_gamma);
    for (std::uint64_t id : path) {
      key = detail::mix64(key ^ detail::mix64(id + detail::golden_gamma));
    }
    return rng_stream(key);
  }

  std::uint64_t next_u64() {
    counter_ += detail::golden_gamma;
    return detail::mix64(key_ + counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe input for quantile transforms.
  double next_uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw by inverse-CDF transform.
  double next_normal() { return norm_quantile(next_uniform_open()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace citest
