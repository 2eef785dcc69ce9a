#pragma once

#include <array>
#include <cstdint>

namespace fpp {

/// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/// Combines a parent seed with a child index into a new 64-bit seed:
/// splitmix64(splitmix64(seed) ^ splitmix64(index + golden_gamma)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  /// State words are successive splitmix64 outputs starting from `seed`.
  explicit Xoshiro256StarStar(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return UINT64_MAX; }
  result_type operator()();

 private:
  std::array<std::uint64_t, 4> state_;
};

/// Reproducible random stream identified by (seed, stream_id).
///
/// The engine is seeded with derive_seed(seed, stream_id), so identical pairs
/// replay bit-identical draws on every platform. Uniforms are built from the
/// top 53 bits of each engine word rather than through
/// std::uniform_real_distribution, whose output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1); exact zeros are rejected.
  double uniform_open();

  /// Uniform integer in [0, bound) by rejection (bound > 0).
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Independent child stream keyed on this stream's identity and `index`.
  /// Does not consume draws from this stream.
  RngStream substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Xoshiro256StarStar engine_;
};

}  // namespace fpp
